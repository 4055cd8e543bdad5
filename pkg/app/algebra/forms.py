"""三元齐次形式 - 多重指标、线性形式、单项式基与 A-坐标约定

f = Σ (d!/i!) A_i x^i，于是线性形式的 d 次幂恰有 A_i = l^i。
两套坐标在类型里显式标注，不允许静默混用。
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

from sympy.polys.domains import QQ
from sympy.polys.rings import PolyElement, ring

from app.algebra.scalars import FpElem, Scalar, normalize_scalar, reduce_mod

MultiIndex = tuple[int, int, int]

# x1, x2, x3 上的多项式环，所有线性形式乘积都在这里做
X_RING, X1, X2, X3 = ring("x1,x2,x3", QQ)


class Coords(str, Enum):
    A = "A"
    MONOMIAL = "monomial"


def basis(d: int) -> list[MultiIndex]:
    """|i| = d 的全部多重指标，先按 i1 再按 i2 降序"""
    if d < 0:
        raise ValueError(f"次数必须非负: {d}")
    return [(i1, i2, d - i1 - i2) for i1 in range(d, -1, -1) for i2 in range(d - i1, -1, -1)]


def multinomial(i: MultiIndex) -> int:
    """d!/i!"""
    return math.factorial(sum(i)) // (
        math.factorial(i[0]) * math.factorial(i[1]) * math.factorial(i[2])
    )


def to_qq(value):
    """int / Fraction 转成 QQ 元素；多项式环元素原样返回"""
    if isinstance(value, PolyElement):
        return value
    if isinstance(value, Fraction):
        return QQ(value.numerator, value.denominator)
    if isinstance(value, int):
        return QQ(value)
    return value


def from_qq(value) -> Scalar:
    return normalize_scalar(Fraction(int(QQ.numer(value)), int(QQ.denom(value))))


@dataclass(frozen=True)
class LinearForm:
    """x1, x2, x3 上的线性形式，coeffs 为三个精确标量"""

    coeffs: tuple

    def __post_init__(self):
        coeffs = tuple(self.coeffs)
        if len(coeffs) != 3:
            raise ValueError(f"线性形式需要 3 个系数，得到 {len(coeffs)}")
        object.__setattr__(self, "coeffs", coeffs)

    @classmethod
    def of(cls, a, b, c) -> "LinearForm":
        return cls((a, b, c))

    @classmethod
    def coordinate(cls, k: int) -> "LinearForm":
        """x_{k+1}"""
        return cls(tuple(1 if j == k else 0 for j in range(3)))

    def __getitem__(self, k: int):
        return self.coeffs[k]

    def __add__(self, other: "LinearForm") -> "LinearForm":
        return LinearForm(tuple(a + b for a, b in zip(self.coeffs, other.coeffs)))

    def __sub__(self, other: "LinearForm") -> "LinearForm":
        return LinearForm(tuple(a - b for a, b in zip(self.coeffs, other.coeffs)))

    def __neg__(self) -> "LinearForm":
        return LinearForm(tuple(-a for a in self.coeffs))

    def scale(self, k) -> "LinearForm":
        return LinearForm(tuple(a * k for a in self.coeffs))

    def is_zero(self) -> bool:
        return not any(self.coeffs)

    def substitute(self, matrix: Sequence[Sequence[int]]) -> "LinearForm":
        """l(A x) 的系数向量，即 A^T l"""
        return LinearForm(
            tuple(sum(self.coeffs[i] * matrix[i][k] for i in range(3)) for k in range(3))
        )

    def as_poly(self, poly_ring=X_RING) -> PolyElement:
        gens = poly_ring.gens[-3:]
        result = poly_ring.zero
        for gen, coeff in zip(gens, self.coeffs):
            if coeff:
                result += gen * to_qq(coeff)
        return result


@dataclass(frozen=True)
class HomForm:
    """d 次三元齐次形式，coeffs 只保存非零项"""

    degree: int
    kind: Coords
    coeffs: Mapping[MultiIndex, object] = field(default_factory=dict)

    def __post_init__(self):
        cleaned = {}
        for index, value in self.coeffs.items():
            index = tuple(index)
            if sum(index) != self.degree or min(index) < 0:
                raise ValueError(f"多重指标 {index} 与次数 {self.degree} 不符")
            if value:
                cleaned[index] = value
        object.__setattr__(self, "coeffs", cleaned)

    @classmethod
    def zero(cls, degree: int, kind: Coords = Coords.MONOMIAL) -> "HomForm":
        return cls(degree, kind, {})

    @classmethod
    def from_dense(cls, degree: int, values: Iterable, kind: Coords) -> "HomForm":
        return cls(degree, kind, dict(zip(basis(degree), values)))

    @classmethod
    def from_poly(cls, poly: PolyElement, degree: int) -> "HomForm":
        """X_RING 中的多项式（单项式坐标）"""
        coeffs = {}
        for monom, coeff in poly.items():
            coeffs[tuple(monom[-3:])] = from_qq(coeff)
        return cls(degree, Coords.MONOMIAL, coeffs)

    def coefficient(self, index: MultiIndex):
        return self.coeffs.get(tuple(index), 0)

    def dense(self) -> list:
        return [self.coefficient(i) for i in basis(self.degree)]

    def is_zero(self) -> bool:
        return not self.coeffs

    def to_monomial(self) -> "HomForm":
        if self.kind is Coords.MONOMIAL:
            return self
        return HomForm(
            self.degree,
            Coords.MONOMIAL,
            {i: v * multinomial(i) for i, v in self.coeffs.items()},
        )

    def to_a_coords(self) -> "HomForm":
        if self.kind is Coords.A:
            return self
        return HomForm(
            self.degree,
            Coords.A,
            {i: normalize_scalar(Fraction(v) / multinomial(i)) for i, v in self.coeffs.items()},
        )

    def _check_compatible(self, other: "HomForm"):
        if self.degree != other.degree or self.kind is not other.kind:
            raise ValueError(
                f"形式不兼容: ({self.degree}, {self.kind.value}) vs "
                f"({other.degree}, {other.kind.value})"
            )

    def __add__(self, other: "HomForm") -> "HomForm":
        self._check_compatible(other)
        coeffs = dict(self.coeffs)
        for i, v in other.coeffs.items():
            coeffs[i] = coeffs.get(i, 0) + v
        return HomForm(self.degree, self.kind, coeffs)

    def __neg__(self) -> "HomForm":
        return self.scale(-1)

    def __sub__(self, other: "HomForm") -> "HomForm":
        return self + (-other)

    def scale(self, k) -> "HomForm":
        return HomForm(self.degree, self.kind, {i: v * k for i, v in self.coeffs.items()})

    def as_poly(self, poly_ring=X_RING) -> PolyElement:
        gens = poly_ring.gens[-3:]
        result = poly_ring.zero
        for i, v in self.to_monomial().coeffs.items():
            result += gens[0] ** i[0] * gens[1] ** i[1] * gens[2] ** i[2] * to_qq(v)
        return result

    def substitute(self, matrix: Sequence[Sequence[int]]) -> "HomForm":
        """F(A x)，结果取单项式坐标"""
        images = [LinearForm(tuple(row)).as_poly() for row in matrix]
        result = X_RING.zero
        for i, v in self.to_monomial().coeffs.items():
            result += images[0] ** i[0] * images[1] ** i[1] * images[2] ** i[2] * to_qq(v)
        return HomForm.from_poly(result, self.degree)

    def x1_order(self) -> int | None:
        """能整除该形式的 x1 的最高次数；零形式返回 None"""
        if not self.coeffs:
            return None
        return min(i[0] for i in self.coeffs)

    def reduce(self, p: int) -> "HomForm":
        """逐系数约化到 F_p"""
        return HomForm(
            self.degree, self.kind, {i: reduce_mod(v, p) for i, v in self.coeffs.items()}
        )

    def residues(self, p: int) -> list[int]:
        """按基顺序的 F_p 剩余（单项式坐标）"""
        values = []
        for v in self.to_monomial().dense():
            values.append(v.residue if isinstance(v, FpElem) else reduce_mod(v, p).residue)
        return values


def power_of_linear(l: LinearForm, d: int) -> HomForm:
    """l^d 的 A-坐标：A_i = l1^i1 l2^i2 l3^i3"""
    if d < 1:
        raise ValueError(f"次数必须 ≥ 1: {d}")
    a, b, c = l.coeffs
    return HomForm(d, Coords.A, {i: a ** i[0] * b ** i[1] * c ** i[2] for i in basis(d)})


def expand_weighted_powers(terms: Sequence[tuple[Scalar, LinearForm]], d: int) -> HomForm:
    """Σ λ l^d 的 A-坐标

    |i| = d 固定，把每项化成整数权重与整数线性形式后在整数上累加，最后只做一次除法。
    """
    scaled = []
    for weight, form in terms:
        denominator = math.lcm(*(Fraction(c).denominator for c in form.coeffs))
        integral = tuple(int(Fraction(c) * denominator) for c in form.coeffs)
        scaled.append((Fraction(weight) / denominator**d, integral))
    common = math.lcm(*(w.denominator for w, _ in scaled)) if scaled else 1

    rows = []
    for weight, (a, b, c) in scaled:
        powers = [
            [a**e for e in range(d + 1)],
            [b**e for e in range(d + 1)],
            [c**e for e in range(d + 1)],
        ]
        rows.append((int(weight * common), powers))

    coeffs = {}
    for i in basis(d):
        total = 0
        for weight, powers in rows:
            if weight:
                total += weight * powers[0][i[0]] * powers[1][i[1]] * powers[2][i[2]]
        if total:
            coeffs[i] = normalize_scalar(Fraction(total, common))
    return HomForm(d, Coords.A, coeffs)


def mul_linears(ls: Sequence[LinearForm], power: int = 1) -> HomForm:
    """Π l^power 展开为单项式坐标的形式；power=2 给出八次形式"""
    product = X_RING.one
    for l in ls:
        product *= l.as_poly() ** power
    return HomForm.from_poly(product, len(ls) * power)
