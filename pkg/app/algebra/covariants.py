"""符号法求值 - 括号因子、Clebsch 不变量 I、S_d / T_d

f = Σ λ l^d 时 S_d(f) = 24 Σ_{i<j<k<p} λiλjλkλp S_d(li, lj, lk, lp)，
小次数下另有完整符号展开（expand_S / expand_T），用作对照与三重结构检查。
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from enum import Enum
from functools import lru_cache
from itertools import combinations
from typing import Sequence

from sympy.polys.domains import ZZ
from sympy.polys.rings import ring

from app.algebra.forms import (
    X_RING,
    Coords,
    HomForm,
    LinearForm,
    MultiIndex,
    mul_linears,
    to_qq,
)
from app.algebra.scalars import Scalar

logger = logging.getLogger(__name__)

Term = tuple[Scalar, LinearForm]


class Covariant(str, Enum):
    """S: 四次协变量，d ≡ 1 (mod 3)；T: 八次协变量，d ≡ 2 (mod 3)"""

    S = "S"
    T = "T"

    @property
    def power(self) -> int:
        return 1 if self is Covariant.S else 2

    @property
    def order(self) -> int:
        return 4 * self.power

    def n_for(self, d: int) -> int:
        if d % 3 == 0:
            raise ValueError(f"d={d} ≡ 0 (mod 3) 不在支持范围内")
        residue = 1 if self is Covariant.S else 2
        if d % 3 != residue:
            raise ValueError(f"{self.value}_d 需要 d ≡ {residue} (mod 3)，得到 d={d}")
        return (d - residue) // 3

    def degree_for(self, n: int) -> int:
        return 3 * n + (1 if self is Covariant.S else 2)

    def threshold(self, n: int) -> int:
        """三重结构阈值，同时也是插值节点个数 K"""
        return 2 * n + (3 if self is Covariant.S else 5)


def bracket(u: LinearForm, v: LinearForm, w: LinearForm):
    """(uvw)：三个系数行组成的行列式"""
    a, b, c = u.coeffs, v.coeffs, w.coeffs
    return (
        a[0] * (b[1] * c[2] - b[2] * c[1])
        - a[1] * (b[0] * c[2] - b[2] * c[0])
        + a[2] * (b[0] * c[1] - b[1] * c[0])
    )


def clebsch_I(l1: LinearForm, l2: LinearForm, l3: LinearForm, l4: LinearForm):
    """I = (αβγ)(αβδ)(αγδ)(βγδ)"""
    return bracket(l1, l2, l3) * bracket(l1, l2, l4) * bracket(l1, l3, l4) * bracket(l2, l3, l4)


def S_quadruple(l1: LinearForm, l2: LinearForm, l3: LinearForm, l4: LinearForm, n: int) -> HomForm:
    if n < 0:
        raise ValueError(f"n 必须非负: {n}")
    value = clebsch_I(l1, l2, l3, l4) ** n
    if not value:
        return HomForm.zero(4)
    return mul_linears([l1, l2, l3, l4]).scale(value)


def T_quadruple(l1: LinearForm, l2: LinearForm, l3: LinearForm, l4: LinearForm, n: int) -> HomForm:
    if n < 0:
        raise ValueError(f"n 必须非负: {n}")
    value = clebsch_I(l1, l2, l3, l4) ** n
    if not value:
        return HomForm.zero(8)
    return mul_linears([l1, l2, l3, l4], power=2).scale(value)


def collect_terms(terms: Sequence[Term]) -> list[Term]:
    """合并相同的线性形式，去掉零权重与零形式，保持首次出现的顺序"""
    merged: dict[tuple, Scalar] = {}
    for weight, form in terms:
        if form.is_zero():
            continue
        merged[form.coeffs] = merged.get(form.coeffs, 0) + weight
    return [(weight, LinearForm(coeffs)) for coeffs, weight in merged.items() if weight]


def _quadruple_sum(terms: Sequence[Term], n: int, kind: Covariant) -> HomForm:
    terms = collect_terms(terms)
    polys = [form.as_poly() ** kind.power for _, form in terms]
    total = X_RING.zero
    skipped = 0
    for quad in combinations(range(len(terms)), 4):
        value = clebsch_I(*(terms[q][1] for q in quad))
        if not value:
            skipped += 1
            continue
        weight = value**n
        for q in quad:
            weight *= terms[q][0]
        product = polys[quad[0]] * polys[quad[1]] * polys[quad[2]] * polys[quad[3]]
        total += product * to_qq(24 * weight)
    logger.debug(f"{kind.value}: {len(terms)} 项, 跳过 {skipped} 个 I=0 的四元组")
    return HomForm.from_poly(total, kind.order)


def eval_S(terms: Sequence[Term], d: int) -> HomForm:
    """S_d(Σ λ l^d)，单项式坐标的四次形式"""
    return _quadruple_sum(terms, Covariant.S.n_for(d), Covariant.S)


def eval_T(terms: Sequence[Term], d: int) -> HomForm:
    """T_d(Σ λ l^d)，单项式坐标的八次形式"""
    return _quadruple_sum(terms, Covariant.T.n_for(d), Covariant.T)


@dataclass(frozen=True)
class QuadMonomial:
    """α^i β^j γ^k δ^l x^e 的系数，代入时换成 A_i A_j A_k A_l x^e"""

    i: MultiIndex
    j: MultiIndex
    k: MultiIndex
    l: MultiIndex
    e: MultiIndex
    coeff: int

    @property
    def indices(self) -> tuple[MultiIndex, MultiIndex, MultiIndex, MultiIndex]:
        return (self.i, self.j, self.k, self.l)

    def satisfies_weights(self, n: int) -> bool:
        """三个单参数子群的权方程 i_c + j_c + k_c + l_c = 4n + e_c"""
        return all(
            sum(index[c] for index in self.indices) == 4 * n + self.e[c] for c in range(3)
        )


# 四组符号 α β γ δ 与 x 共 15 个变量
_SYMBOL_RING, *_SYMBOL_GENS = ring(
    "a1,a2,a3,b1,b2,b3,g1,g2,g3,e1,e2,e3,x1,x2,x3", ZZ
)

_EXPANSION_DEGREES = {Covariant.S: (4, 7), Covariant.T: (5, 8)}


def _symbol_bracket(u, v, w):
    return (
        u[0] * (v[1] * w[2] - v[2] * w[1])
        - u[1] * (v[0] * w[2] - v[2] * w[0])
        + u[2] * (v[0] * w[1] - v[1] * w[0])
    )


@lru_cache(maxsize=None)
def _expand(kind: Covariant, d: int) -> tuple[QuadMonomial, ...]:
    if d not in _EXPANSION_DEGREES[kind]:
        raise ValueError(
            f"expand_{kind.value} 只支持 d ∈ {_EXPANSION_DEGREES[kind]}，d={d} 组合上不可行"
        )
    n = kind.n_for(d)
    gens = _SYMBOL_GENS
    alpha, beta, gamma, delta = gens[0:3], gens[3:6], gens[6:9], gens[9:12]
    xs = gens[12:15]

    invariant = (
        _symbol_bracket(alpha, beta, gamma)
        * _symbol_bracket(alpha, beta, delta)
        * _symbol_bracket(alpha, gamma, delta)
        * _symbol_bracket(beta, gamma, delta)
    )
    expression = invariant**n
    for symbol in (alpha, beta, gamma, delta):
        linear = symbol[0] * xs[0] + symbol[1] * xs[1] + symbol[2] * xs[2]
        expression *= linear**kind.power

    monomials = tuple(
        QuadMonomial(
            i=tuple(monom[0:3]),
            j=tuple(monom[3:6]),
            k=tuple(monom[6:9]),
            l=tuple(monom[9:12]),
            e=tuple(monom[12:15]),
            coeff=int(coeff),
        )
        for monom, coeff in expression.items()
    )
    logger.info(f"expand_{kind.value}(d={d}): {len(monomials)} 个单项式")
    return monomials


def expand_S(d: int) -> list[QuadMonomial]:
    """I^n α_x β_x γ_x δ_x 的完整展开，d ∈ {4, 7}"""
    return list(_expand(Covariant.S, d))


def expand_T(d: int) -> list[QuadMonomial]:
    """I^n α_x² β_x² γ_x² δ_x² 的完整展开，d ∈ {5, 8}"""
    return list(_expand(Covariant.T, d))


def substitute_expansion(monomials: Sequence[QuadMonomial], form: HomForm) -> HomForm:
    """把 A-坐标代入展开式，得到单项式坐标的协变量值"""
    a_coords = form.to_a_coords()
    order = sum(monomials[0].e) if monomials else 4
    coeffs: dict[MultiIndex, Scalar] = {}
    for mono in monomials:
        value = mono.coeff
        for index in mono.indices:
            a = a_coords.coefficient(index)
            if not a:
                value = 0
                break
            value *= a
        if value:
            coeffs[mono.e] = coeffs.get(mono.e, 0) + value
    return HomForm(order, Coords.MONOMIAL, coeffs)


@dataclass
class TripleStructureReport:
    kind: Covariant
    d: int
    n: int
    threshold: int
    monomial_count: int
    weight_failures: list[QuadMonomial] = field(default_factory=list)
    violators: list[QuadMonomial] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return not self.weight_failures and not self.violators

    def summary(self) -> str:
        status = "PASSED" if self.passed else "FAILED"
        return (
            f"{self.kind.value}_{self.d} (n={self.n}): {status}, "
            f"{self.monomial_count} 个单项式, 阈值 {self.threshold}, "
            f"权方程失败 {len(self.weight_failures)}, 违例 {len(self.violators)}"
        )


def check_triple_structure(d: int, kind: Covariant = Covariant.S) -> TripleStructureReport:
    """每个单项式里 i1, j1, k1, l1 至多一个 ≥ 阈值（S: 2n+3, T: 2n+5）"""
    monomials = _expand(kind, d)
    n = kind.n_for(d)
    report = TripleStructureReport(
        kind=kind,
        d=d,
        n=n,
        threshold=kind.threshold(n),
        monomial_count=len(monomials),
    )
    for mono in monomials:
        if not mono.satisfies_weights(n):
            report.weight_failures.append(mono)
        if sum(1 for index in mono.indices if index[0] >= report.threshold) >= 2:
            report.violators.append(mono)
    logger.info(report.summary())
    return report
