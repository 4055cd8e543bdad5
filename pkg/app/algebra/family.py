"""插值多项式族 f(c) 与 S_d(f(c)+g) 关于 c 的直接展开

f(c) = Σ p_i(c) l_i^d − (cx+y)^d，l_i = b_i x + y，x = x1，y 为 x2、x3 的组合。
直接展开在小 n 下可行，作为系数引擎的对照。
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from typing import NamedTuple, Sequence

from sympy.polys.domains import QQ
from sympy.polys.rings import PolyElement, ring

from app.algebra.covariants import Covariant, Term, bracket, collect_terms
from app.algebra.forms import Coords, HomForm, LinearForm, expand_weighted_powers, from_qq, to_qq
from app.algebra.scalars import Scalar, normalize_scalar

logger = logging.getLogger(__name__)

C_RING, C = ring("c", QQ)
CX_RING, CX_C, CX_X1, CX_X2, CX_X3 = ring("c,x1,x2,x3", QQ)


@dataclass(frozen=True)
class InterpNodes:
    """两两不同的插值节点 b_1..b_K"""

    b: tuple

    def __post_init__(self):
        nodes = tuple(self.b)
        if not nodes:
            raise ValueError("至少需要一个节点")
        if len(set(nodes)) != len(nodes):
            raise ValueError(f"节点重复: {nodes}")
        object.__setattr__(self, "b", nodes)

    @property
    def K(self) -> int:
        return len(self.b)

    @classmethod
    def consecutive(cls, K: int, start: int = 0) -> "InterpNodes":
        return cls(tuple(range(start, start + K)))

    @classmethod
    def powers_of_two(cls, K: int) -> "InterpNodes":
        return cls(tuple(2**i for i in range(K)))


def interp_poly(b: InterpNodes, i: int) -> PolyElement:
    """p_i(c) = Π_{j≠i} (c − b_j)/(b_i − b_j)，i 从 1 开始"""
    if not 1 <= i <= b.K:
        raise ValueError(f"下标 {i} 不在 [1, {b.K}] 内")
    node = b.b[i - 1]
    numerator = C_RING.one
    denominator = Fraction(1)
    for j, other in enumerate(b.b, start=1):
        if j == i:
            continue
        numerator *= C - to_qq(other)
        denominator *= Fraction(node) - Fraction(other)
    return numerator * to_qq(1 / denominator)


def interp_value(b: InterpNodes, i: int, c: Scalar) -> Scalar:
    """p_i(c) 的精确值"""
    if not 1 <= i <= b.K:
        raise ValueError(f"下标 {i} 不在 [1, {b.K}] 内")
    node = Fraction(b.b[i - 1])
    value = Fraction(1)
    for j, other in enumerate(b.b, start=1):
        if j != i:
            value *= (Fraction(c) - other) / (node - other)
    return normalize_scalar(value)


def _check_y(y: LinearForm):
    if y[0] != 0 or y.is_zero():
        raise ValueError(f"y 必须是 x2、x3 的非零组合，得到 {y.coeffs}")


def node_forms(b: InterpNodes, y: LinearForm) -> list[LinearForm]:
    """l_i = b_i x1 + y"""
    return [LinearForm((node, y[1], y[2])) for node in b.b]


def build_f_c(b: InterpNodes, y: LinearForm, d: int, c: Scalar) -> list[Term]:
    """f(c) 的 K+1 个加权幂，最后一项为 −(cx+y)^d"""
    _check_y(y)
    if d <= b.K:
        raise ValueError(f"需要 d > K，得到 d={d}, K={b.K}")
    if c in b.b:
        raise ValueError(f"c={c} 与节点重合")
    terms: list[Term] = [
        (interp_value(b, i, c), form) for i, form in enumerate(node_forms(b, y), start=1)
    ]
    terms.append((-1, LinearForm((c, y[1], y[2]))))
    return terms


def f_c_form(b: InterpNodes, y: LinearForm, d: int, c: Scalar) -> HomForm:
    """展开后的 f(c)，A-坐标"""
    return expand_weighted_powers(build_f_c(b, y, d, c), d)


@dataclass(frozen=True)
class CPolyForm:
    """Σ_t Q_t c^t，每个 Q_t 是固定次数的单项式坐标形式"""

    order: int
    coeffs: tuple

    def coefficient(self, t: int) -> HomForm:
        if 0 <= t < len(self.coeffs):
            return self.coeffs[t]
        return HomForm.zero(self.order)

    @property
    def degree(self) -> int:
        """最高非零次数，零多项式为 -1"""
        for t in range(len(self.coeffs) - 1, -1, -1):
            if not self.coeffs[t].is_zero():
                return t
        return -1

    def is_zero(self) -> bool:
        return self.degree < 0

    def __add__(self, other: "CPolyForm") -> "CPolyForm":
        if self.order != other.order:
            raise ValueError(f"次数不一致: {self.order} vs {other.order}")
        length = max(len(self.coeffs), len(other.coeffs))
        return CPolyForm(
            self.order,
            tuple(self.coefficient(t) + other.coefficient(t) for t in range(length)),
        )

    def scale(self, k) -> "CPolyForm":
        return CPolyForm(self.order, tuple(q.scale(k) for q in self.coeffs))

    @classmethod
    def from_poly(cls, poly: PolyElement, order: int) -> "CPolyForm":
        """CX_RING 中的多项式按 c 的次数拆开"""
        grouped: dict[int, dict] = {}
        for (t, i1, i2, i3), coeff in poly.items():
            grouped.setdefault(t, {})[(i1, i2, i3)] = from_qq(coeff)
        length = max(grouped) + 1 if grouped else 0
        return cls(
            order,
            tuple(HomForm(order, Coords.MONOMIAL, grouped.get(t, {})) for t in range(length)),
        )


class SeriesPart(NamedTuple):
    """按来源拆分的一部分：g_count 为四元组中 g 的形式个数（ε 的次数）"""

    g_count: int
    interp: bool


def Q_series_parts(
    g: Sequence[Term],
    b: InterpNodes,
    y: LinearForm,
    n: int,
    kind: Covariant = Covariant.S,
) -> dict[SeriesPart, CPolyForm]:
    """S_d(f(c)+g)（或 T_d）的全部四元组贡献，按 (ε 次数, 是否含 p_i) 分组

    所有四元组都计入；两个及以上 f 形式的组合在总和里相互抵消。
    """
    _check_y(y)
    d = kind.degree_for(n)
    if d <= b.K:
        raise ValueError(f"需要 d > K，得到 d={d}, K={b.K}")
    g_terms = collect_terms(g)

    # 前 K 个为 l_i（权 p_i(c)），其后为 cx+y（权 −1），再后为 g 的形式
    forms = node_forms(b, y) + [LinearForm((CX_C, y[1], y[2]))]
    forms += [form for _, form in g_terms]
    weights: list = [None] * b.K + [-1] + [weight for weight, _ in g_terms]
    first_g = b.K + 1
    interp_weights = [interp_poly(b, i).set_ring(CX_RING) for i in range(1, b.K + 1)]
    polys = [form.as_poly(CX_RING) ** kind.power for form in forms]

    brackets = {
        triple: bracket(*(forms[q] for q in triple))
        for triple in combinations(range(len(forms)), 3)
    }

    # (签名, g 个数) → 不含 p_i 权重的累加多项式
    buckets: dict[tuple, PolyElement] = {}
    for quad in combinations(range(len(forms)), 4):
        q0, q1, q2, q3 = quad
        value = (
            brackets[(q0, q1, q2)]
            * brackets[(q0, q1, q3)]
            * brackets[(q0, q2, q3)]
            * brackets[(q1, q2, q3)]
        )
        if not value:
            continue
        signature = tuple(q for q in quad if q < b.K)
        constant = 24
        for q in quad:
            if q >= b.K:
                constant *= weights[q]
        contribution = polys[q0] * polys[q1] * polys[q2] * polys[q3] * to_qq(constant)
        contribution *= to_qq(value**n)
        key = (signature, sum(1 for q in quad if q >= first_g))
        if key in buckets:
            buckets[key] += contribution
        else:
            buckets[key] = contribution

    totals: dict[SeriesPart, PolyElement] = {}
    for (signature, g_count), bucket in buckets.items():
        for q in signature:
            bucket = bucket * interp_weights[q]
        part = SeriesPart(g_count, bool(signature))
        totals[part] = totals.get(part, CX_RING.zero) + bucket
    logger.debug(f"Q_series n={n} K={b.K}: {len(buckets)} 个分组")
    return {part: CPolyForm.from_poly(poly, kind.order) for part, poly in totals.items()}


def Q_series_direct(
    g: Sequence[Term],
    b: InterpNodes,
    y: LinearForm,
    n: int,
    kind: Covariant = Covariant.S,
    scale: Scalar = 1,
) -> CPolyForm:
    """S_d(f(c) + scale·g) 的 c-多项式，返回全部 Q_t"""
    return combine_parts(Q_series_parts(g, b, y, n, kind), kind.order, scale)


def combine_parts(parts: dict, order: int, scale: Scalar = 1) -> CPolyForm:
    """按 scale^{g_count} 加权求和"""
    result = CPolyForm(order, ())
    for part, series in parts.items():
        result = result + series.scale(normalize_scalar(Fraction(scale) ** part.g_count))
    return result
