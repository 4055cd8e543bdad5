"""系数引擎 - 任意 n 下 Q_t / R_t 的闭式计算

I(cx+y, m_i, m_j, m_k) = (m_i m_j m_k)(ξ_ij c + η_ij)(ξ_ik c + η_ik)(ξ_jk c + η_jk)，
c^s 系数由二项式三重和给出。精确大整数路径是记录路径，F_p[n] 上的拟多项式路径用于交叉校验。
"""

import logging
import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from itertools import combinations
from typing import Dict, List, Tuple

import numpy as np
from sympy import Poly, Symbol

from app.algebra.covariants import Covariant, bracket
from app.algebra.forms import X_RING, Coords, HomForm, LinearForm, basis
from app.algebra.scalars import (
    IntegralityError,
    binom_exact,
    divide_and_reduce,
    normalize_scalar,
    reduce_mod,
)

logger = logging.getLogger(__name__)

N = Symbol("n")
X = LinearForm.coordinate(0)

Triple = Tuple[int, int, int]


class DivisibilityError(ArithmeticError):
    """拟多项式不能被二项式除数整除"""


@dataclass(frozen=True)
class XiEta:
    """(cx+y, m_a, m_b) = ξ c + η"""

    xi: int
    eta: int


@dataclass(frozen=True)
class GConfig:
    """固定的 g = Σ m_i^d、精度 p 与 y 列表"""

    case: str
    kind: Covariant
    ms: Tuple[LinearForm, ...]
    p: int
    ys: Tuple[LinearForm, ...]

    @property
    def order(self) -> int:
        return self.kind.order

    @property
    def power(self) -> int:
        return self.kind.power

    @property
    def rows(self) -> int:
        return len(basis(self.order))

    @property
    def cols(self) -> int:
        return len(self.ys) * self.p

    @property
    def period(self) -> int:
        return self.p * (self.p - 1)

    @property
    def triples(self) -> List[Triple]:
        return list(combinations(range(len(self.ms)), 3))

    def degree(self, n: int) -> int:
        return self.kind.degree_for(n)

    def window(self, n: int) -> List[int]:
        """t = d, d−1, …, d−p+1"""
        d = self.degree(n)
        return [d - u for u in range(self.p)]

    def divisor_index(self, u: int) -> int:
        """m = n − ⌈t/3⌉，只依赖 u = d − t"""
        return (u - self.power) // 3

    def divisor(self, n: int, t: int) -> Tuple[int, int]:
        """(m, C(n, m))，m ≤ 0 时除数取 1"""
        m = n - (-(-t // 3))
        return m, (binom_exact(n, m) if m > 0 else 1)

    @property
    def n_min(self) -> int:
        """d − p + 1 ≥ K 成立的最小 n"""
        n = 1
        while self.degree(n) - self.p + 1 < self.kind.threshold(n):
            n += 1
        return n

    def columns(self) -> List[Tuple[int, int]]:
        """列顺序：先 y，再 u = d − t 从 0 到 p−1"""
        return [(y_index, u) for y_index in range(len(self.ys)) for u in range(self.p)]


_G_FORMS = (
    LinearForm.of(1, 3, 9),
    LinearForm.of(-10, 1, 4),
    LinearForm.of(8, 4, 6),
    LinearForm.of(1, 6, -10),
    LinearForm.of(4, -8, -10),
    LinearForm.of(-3, 7, -4),
    LinearForm.of(0, -3, 2),
    LinearForm.of(8, -4, -4),
    LinearForm.of(-10, 4, 6),
)

CASE_D1 = GConfig(
    case="d1",
    kind=Covariant.S,
    ms=_G_FORMS,
    p=11,
    ys=(LinearForm.of(0, 1, 0), LinearForm.of(0, 0, 1)),
)

CASE_D2 = GConfig(
    case="d2",
    kind=Covariant.T,
    ms=_G_FORMS,
    p=19,
    ys=(LinearForm.of(0, 1, 0), LinearForm.of(0, 0, 1), LinearForm.of(0, 1, 1)),
)

CASES: Dict[str, GConfig] = {"d1": CASE_D1, "d2": CASE_D2}


def get_case(case: str) -> GConfig:
    if case not in CASES:
        raise ValueError(f"未知的 case: {case}，可选 {', '.join(CASES)}")
    return CASES[case]


def xi_eta(triple: Triple, y: LinearForm, cfg: GConfig) -> Tuple[XiEta, XiEta, XiEta]:
    """三元组 (i, j, k) 的 (ik, ij, jk) 三个有序对"""
    i, j, k = triple
    ms = cfg.ms
    pairs = ((ms[i], ms[k]), (ms[i], ms[j]), (ms[j], ms[k]))
    return tuple(XiEta(bracket(X, a, b), bracket(y, a, b)) for a, b in pairs)


def coeff_I_power(s: int, n: int, triple: Triple, y: LinearForm, cfg: GConfig) -> int:
    """I(cx+y, m_i, m_j, m_k)^n 中 c^s 的精确系数，triple 下标从 0 开始"""
    if s < 0 or s > 3 * n:
        return 0
    (a, b, c) = xi_eta(triple, y, cfg)
    w = 3 * n - s
    total = 0
    for p1 in range(max(0, w - 2 * n), min(n, w) + 1):
        for p2 in range(max(0, w - p1 - n), min(n, w - p1) + 1):
            p3 = w - p1 - p2
            total += (
                math.comb(n, p1)
                * math.comb(n, p2)
                * math.comb(n, p3)
                * a.xi ** (n - p1)
                * b.xi ** (n - p2)
                * c.xi ** (n - p3)
                * a.eta**p1
                * b.eta**p2
                * c.eta**p3
            )
    i, j, k = triple
    return bracket(cfg.ms[i], cfg.ms[j], cfg.ms[k]) ** n * total


@lru_cache(maxsize=None)
def falling_factorial_poly(k: int, p: int) -> Poly:
    """n(n−1)…(n−k+1) ∈ F_p[n]，k ≤ 0 时为 1"""
    result = Poly(1, N, modulus=p)
    for j in range(max(k, 0)):
        result = result * Poly(N - j, N, modulus=p)
    return result


@lru_cache(maxsize=None)
def binomial_poly(k: int, p: int) -> Poly:
    """C(n, k) ∈ F_p[n]，要求 0 ≤ k < p"""
    if not 0 <= k < p:
        raise ValueError(f"binomial_poly 要求 0 ≤ k < p，得到 k={k}, p={p}")
    return falling_factorial_poly(k, p) * pow(math.factorial(k), -1, p)


@dataclass(frozen=True)
class QuasiPolynomial:
    """Σ ρ^n P(n) over F_p；valid_from 之前的 n 不保证正确"""

    p: int
    terms: Tuple[Tuple[int, Poly], ...] = ()
    valid_from: int = 0

    @property
    def degree(self) -> int:
        return max((poly.degree() for _, poly in self.terms), default=-1)

    def evaluate(self, n: int) -> int:
        if n < self.valid_from:
            raise ValueError(f"n={n} 小于适用下界 {self.valid_from}")
        total = 0
        for rho, poly in self.terms:
            total += pow(rho, n, self.p) * int(poly.eval(n))
        return total % self.p


def _poly_to_dense(poly: Poly, p: int) -> np.ndarray:
    """低次在前的系数向量，长度 p"""
    coeffs = [int(c) % p for c in reversed(poly.all_coeffs())]
    dense = np.zeros(p, dtype=np.int64)
    dense[: len(coeffs)] = coeffs
    return dense


def _dense_to_poly(dense: np.ndarray, p: int) -> Poly:
    return Poly([int(c) for c in reversed(dense.tolist())], N, modulus=p)


@dataclass
class MatrixBuild:
    """一个 n 的 M(n) 及其二项式除法记录"""

    n: int
    matrix: np.ndarray
    divisions: int = 0
    exact_divisions: int = 0
    # 在 Z 上不整除的列：(y_index, t, m)
    inexact: List[Tuple[int, int, int]] = field(default_factory=list)


@dataclass
class RtValue:
    t: int
    divisor_index: int
    divisor: int
    exact: HomForm
    residues: List[int] = field(default_factory=list)
    exact_over_Z: bool = True


class CoefficientEngine:
    """一个 GConfig 的全部缓存：ξ/η、因子向量、F_p[n] 多项式表"""

    def __init__(self, cfg: GConfig):
        self.cfg = cfg
        self.triples = cfg.triples
        self.brackets = [bracket(*(cfg.ms[q] for q in triple)) for triple in self.triples]
        self.xi_eta = [
            [xi_eta(triple, y, cfg) for triple in self.triples] for y in cfg.ys
        ]
        self.factor_vectors = [self._factor_vectors(y) for y in cfg.ys]
        self._quasi_tables: Dict[Tuple[int, int], np.ndarray] = {}
        self._p_polys: Dict[Tuple[int, int], List[Poly]] = {}

    def _factor_vectors(self, y: LinearForm) -> List[np.ndarray]:
        """第 q 个数组的第 T 行：C(power, q) x^{power−q} y^q (m_i m_j m_k)^power"""
        power = self.cfg.power
        x_poly, y_poly = X.as_poly(), y.as_poly()
        vectors = []
        for q in range(power + 1):
            rows = []
            for triple in self.triples:
                product = X_RING.one
                for index in triple:
                    product *= self.cfg.ms[index].as_poly()
                poly = x_poly ** (power - q) * y_poly**q * product**power * math.comb(power, q)
                rows.append(HomForm.from_poly(poly, self.cfg.order).dense())
            vectors.append(np.array(rows, dtype=object))
        return vectors

    def y_index(self, y: LinearForm) -> int:
        for index, candidate in enumerate(self.cfg.ys):
            if candidate == y:
                return index
        raise ValueError(f"y={y.coeffs} 不在 case {self.cfg.case} 的 y 列表中")

    def kappa(self, s: int, n: int, triple_index: int, y_index: int) -> int:
        """c^s 的系数，与 coeff_I_power 相同，但使用缓存的 ξ/η"""
        if s < 0 or s > 3 * n:
            return 0
        a, b, c = self.xi_eta[y_index][triple_index]
        w = 3 * n - s
        total = 0
        for p1 in range(max(0, w - 2 * n), min(n, w) + 1):
            head = math.comb(n, p1) * a.xi ** (n - p1) * a.eta**p1
            for p2 in range(max(0, w - p1 - n), min(n, w - p1) + 1):
                p3 = w - p1 - p2
                total += (
                    head
                    * math.comb(n, p2)
                    * math.comb(n, p3)
                    * b.xi ** (n - p2)
                    * c.xi ** (n - p3)
                    * b.eta**p2
                    * c.eta**p3
                )
        return self.brackets[triple_index] ** n * total

    def q_vector(self, n: int, t: int, y: LinearForm) -> np.ndarray:
        """任意 0 ≤ t ≤ d 的 Q_t，单项式坐标的稠密向量"""
        d = self.cfg.degree(n)
        if not 0 <= t <= d:
            raise ValueError(f"t={t} 不在 [0, {d}] 内")
        y_index = self.y_index(y)
        power = self.cfg.power
        total = np.zeros(self.cfg.rows, dtype=object)
        for triple_index in range(len(self.triples)):
            for q in range(power + 1):
                value = self.kappa(t - (power - q), n, triple_index, y_index)
                if value:
                    total = total + self.factor_vectors[y_index][q][triple_index] * value
        return total * -24

    def Q_t(self, n: int, t: int, y: LinearForm) -> HomForm:
        d = self.cfg.degree(n)
        if not d - self.cfg.p + 1 <= t <= d:
            raise ValueError(f"t={t} 不在窗口 [{d - self.cfg.p + 1}, {d}] 内")
        vector = self.q_vector(n, t, y)
        return HomForm.from_dense(self.cfg.order, vector.tolist(), Coords.MONOMIAL)

    def R_t(self, n: int, t: int, y: LinearForm) -> RtValue:
        """Q_t / C(n, m)，m = n − ⌈t/3⌉，并逐系数约化到 F_p"""
        q_form = self.Q_t(n, t, y)
        m, divisor = self.cfg.divisor(n, t)
        exact = HomForm(
            q_form.degree,
            q_form.kind,
            {i: normalize_scalar(Fraction(v, divisor)) for i, v in q_form.coeffs.items()},
        )
        exact_over_Z = all(v % divisor == 0 for v in q_form.coeffs.values())
        residues = [reduce_mod(v, self.cfg.p).residue for v in exact.dense()]
        return RtValue(t, m, divisor, exact, residues, exact_over_Z)

    def _window_prefix(self, n: int, width: int) -> Tuple[int, List[int]]:
        """base 与每个三元组的 (m_i m_j m_k)^n (ξξξ)^base"""
        base = max(n - width, 0)
        prefixes = []
        for triple_index, bracket_value in enumerate(self.brackets):
            a, b, c = self.xi_eta[0][triple_index]
            prefixes.append(bracket_value**n * (a.xi * b.xi * c.xi) ** base)
        return base, prefixes

    def _scaled_convolution(
        self, n: int, base: int, width: int, triple_index: int, y_index: int
    ) -> List[int]:
        """κ_{3n−w} / 前缀，w = 0..width"""
        sequences = []
        for pair in self.xi_eta[y_index][triple_index]:
            top = min(n, width)
            sequences.append(
                [
                    math.comb(n, k) * pair.xi ** (n - k - base) * pair.eta**k
                    for k in range(top + 1)
                ]
            )
        first, second, third = sequences
        partial = [0] * (width + 1)
        for k1, v1 in enumerate(first):
            if not v1:
                continue
            for k2, v2 in enumerate(second):
                if k1 + k2 > width:
                    break
                partial[k1 + k2] += v1 * v2
        result = [0] * (width + 1)
        for k12, v12 in enumerate(partial):
            if not v12:
                continue
            for k3, v3 in enumerate(third):
                if k12 + k3 > width:
                    break
                result[k12 + k3] += v12 * v3
        return result

    def window_vectors(self, n: int, y_index: int) -> List[np.ndarray]:
        """窗口内全部 Q_t（u = 0..p−1）的精确向量"""
        cfg = self.cfg
        if n < 1:
            raise ValueError(f"n 必须 ≥ 1: {n}")
        width = cfg.p - 1
        base, prefixes = self._window_prefix(n, width)
        scaled = np.empty((len(self.triples), width + 1), dtype=object)
        for triple_index, prefix in enumerate(prefixes):
            conv = self._scaled_convolution(n, base, width, triple_index, y_index)
            for w in range(width + 1):
                scaled[triple_index, w] = prefix * conv[w]

        vectors = []
        for u in range(cfg.p):
            total = np.zeros(cfg.rows, dtype=object)
            for q in range(cfg.power + 1):
                w = u - q
                if w < 0:
                    continue
                total = total + scaled[:, w].dot(self.factor_vectors[y_index][q])
            vectors.append(total * -24)
        return vectors

    def matrix_exact(self, n: int) -> MatrixBuild:
        """M(n) 的记录路径：精确 Q_t，除以 C(n, m)，再约化到 F_p"""
        cfg = self.cfg
        build = MatrixBuild(n=n, matrix=np.zeros((cfg.rows, cfg.cols), dtype=np.int64))
        for y_index in range(len(cfg.ys)):
            vectors = self.window_vectors(n, y_index)
            for u, vector in enumerate(vectors):
                column = y_index * cfg.p + u
                t = cfg.degree(n) - u
                m, divisor = cfg.divisor(n, t)
                exact = True
                for row, value in enumerate(vector):
                    try:
                        residue, row_exact = divide_and_reduce(int(value), divisor, cfg.p)
                    except IntegralityError as exc:
                        raise IntegralityError(f"[{cfg.case}] n={n} t={t}: {exc}") from exc
                    build.matrix[row, column] = residue
                    exact = exact and row_exact
                build.divisions += 1
                build.exact_divisions += int(exact)
                if not exact:
                    build.inexact.append((y_index, t, m))
        logger.debug(
            f"[{cfg.case}] n={n}: M(n) {cfg.rows}x{cfg.cols}, "
            f"整除 {build.exact_divisions}/{build.divisions}"
        )
        return build

    def quasi_poly(self, triple_index: int, w: int, y_index: int) -> QuasiPolynomial:
        """单个三元组在偏移 w = 3n − s 处的 ρ^n P_w(n)"""
        p = self.cfg.p
        if not 0 <= w < p:
            raise ValueError(f"偏移 w={w} 不在 [0, {p}) 内")
        rho = self._rho(triple_index)
        if rho == 0:
            # 每项都含 ξ^{n−p'}，n > w 时整体为 0
            return QuasiPolynomial(p, (), valid_from=w + 1)
        return QuasiPolynomial(p, ((rho, self._p_table(triple_index, y_index)[w]),))

    def _rho(self, triple_index: int) -> int:
        a, b, c = self.xi_eta[0][triple_index]
        return (self.brackets[triple_index] * a.xi * b.xi * c.xi) % self.cfg.p

    def _p_table(self, triple_index: int, y_index: int) -> List[Poly]:
        """P_w(n)，w = 0..p−1，三个 C(n,k) a^k 序列的卷积"""
        key = (triple_index, y_index)
        if key in self._p_polys:
            return self._p_polys[key]
        p = self.cfg.p
        width = p - 1
        sequences = []
        for pair in self.xi_eta[y_index][triple_index]:
            ratio = pair.eta * pow(pair.xi, -1, p) % p
            sequences.append([binomial_poly(k, p) * pow(ratio, k, p) for k in range(width + 1)])
        zero = Poly(0, N, modulus=p)
        partial = [zero] * (width + 1)
        for k1 in range(width + 1):
            for k2 in range(width + 1 - k1):
                partial[k1 + k2] = partial[k1 + k2] + sequences[0][k1] * sequences[1][k2]
        table = [zero] * (width + 1)
        for k12 in range(width + 1):
            for k3 in range(width + 1 - k12):
                table[k12 + k3] = table[k12 + k3] + partial[k12] * sequences[2][k3]
        self._p_polys[key] = table
        return table

    def check_divisibility(self) -> int:
        """对每一列在 F_p[n] 中做多项式除法，返回检查的列数

        不能整除时抛 DivisibilityError；结果缓存在系数表里。
        """
        columns = self.cfg.columns()
        for y_index, u in columns:
            self._quasi_table(u, y_index)
        logger.debug(f"[{self.cfg.case}] F_p[n] 整除检查: {len(columns)} 列")
        return len(columns)

    def _quasi_table(self, u: int, y_index: int) -> np.ndarray:
        """(三元组, 行, n 的幂) 的系数表：R 的每项 G_T(n) 已除去 C(n, m)"""
        key = (u, y_index)
        if key in self._quasi_tables:
            return self._quasi_tables[key]
        cfg = self.cfg
        p = cfg.p
        m = cfg.divisor_index(u)
        divisor = falling_factorial_poly(m, p)
        scale = -24 * math.factorial(max(m, 0)) % p
        table = np.zeros((len(self.triples), cfg.rows, p), dtype=np.int64)
        for triple_index in range(len(self.triples)):
            if self._rho(triple_index) == 0:
                continue
            polys = self._p_table(triple_index, y_index)
            for q in range(cfg.power + 1):
                w = u - q
                if w < 0:
                    continue
                quotient, remainder = polys[w].div(divisor)
                if not remainder.is_zero:
                    raise DivisibilityError(
                        f"[{cfg.case}] P_{w}(n) 不能被 C(n, {m}) 整除, "
                        f"triple {self.triples[triple_index]}"
                    )
                dense = _poly_to_dense(quotient, p)
                weights = np.array(
                    [int(v) % p for v in self.factor_vectors[y_index][q][triple_index]],
                    dtype=np.int64,
                )
                table[triple_index] += np.outer(weights, dense) % p
            table[triple_index] = table[triple_index] * scale % p
        self._quasi_tables[key] = table
        return table

    def entry_quasi_polynomial(self, u: int, y_index: int, row: int) -> QuasiPolynomial:
        """M(n) 的一个元素作为至多 84 项的拟多项式，已除以二项式除数"""
        p = self.cfg.p
        table = self._quasi_table(u, y_index)
        terms = []
        for triple_index in range(len(self.triples)):
            dense = table[triple_index, row]
            if dense.any():
                terms.append((self._rho(triple_index), _dense_to_poly(dense, p)))
        return QuasiPolynomial(p, tuple(terms), valid_from=p)

    def matrix_quasi(self, n: int) -> np.ndarray:
        """拟多项式路径得到的 M(n)，要求 n ≥ p"""
        cfg = self.cfg
        p = cfg.p
        if n < p:
            raise ValueError(f"拟多项式路径要求 n ≥ p，得到 n={n}")
        n_powers = np.array([pow(n, k, p) for k in range(p)], dtype=np.int64)
        rho_powers = np.array(
            [pow(self._rho(index), n, p) for index in range(len(self.triples))], dtype=np.int64
        )
        matrix = np.zeros((cfg.rows, cfg.cols), dtype=np.int64)
        for y_index, u in cfg.columns():
            table = self._quasi_table(u, y_index)
            values = table.dot(n_powers) % p
            matrix[:, y_index * p + u] = rho_powers.dot(values) % p
        return matrix


@lru_cache(maxsize=None)
def engine_for(cfg: GConfig) -> CoefficientEngine:
    return CoefficientEngine(cfg)


def Q_t(n: int, t: int, y: LinearForm, cfg: GConfig) -> HomForm:
    return engine_for(cfg).Q_t(n, t, y)


def R_t(n: int, t: int, y: LinearForm, cfg: GConfig) -> RtValue:
    return engine_for(cfg).R_t(n, t, y)


def quasi_poly(triple: Triple, w: int, y: LinearForm, cfg: GConfig) -> QuasiPolynomial:
    engine = engine_for(cfg)
    return engine.quasi_poly(engine.triples.index(tuple(triple)), w, engine.y_index(y))

