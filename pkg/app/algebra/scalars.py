"""精确算术底座 - 大整数、有理数、素域 F_p、二项式系数与 p-整约化"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Union

from sympy import isprime, multiplicity

# ExactInt 即 Python int，ExactRat 即已约分的 Fraction
ExactInt = int
ExactRat = Fraction
Scalar = Union[int, Fraction]


class IntegralityError(ArithmeticError):
    """分母被 p 整除：计算离开了 p-整的范围"""


@dataclass(frozen=True)
class FpElem:
    """素域 F_p 中的元素，residue 始终在 [0, p) 内"""

    residue: int
    modulus: int

    def __post_init__(self):
        if not 0 <= self.residue < self.modulus:
            raise ValueError(f"residue {self.residue} 不在 [0, {self.modulus}) 内")

    def _coerce(self, other) -> int:
        if isinstance(other, FpElem):
            if other.modulus != self.modulus:
                raise ValueError(f"模不一致: {self.modulus} != {other.modulus}")
            return other.residue
        if isinstance(other, int):
            return other % self.modulus
        return NotImplemented

    def _new(self, value: int) -> "FpElem":
        return FpElem(value % self.modulus, self.modulus)

    def __add__(self, other):
        value = self._coerce(other)
        if value is NotImplemented:
            return NotImplemented
        return self._new(self.residue + value)

    __radd__ = __add__

    def __sub__(self, other):
        value = self._coerce(other)
        if value is NotImplemented:
            return NotImplemented
        return self._new(self.residue - value)

    def __rsub__(self, other):
        value = self._coerce(other)
        if value is NotImplemented:
            return NotImplemented
        return self._new(value - self.residue)

    def __mul__(self, other):
        value = self._coerce(other)
        if value is NotImplemented:
            return NotImplemented
        return self._new(self.residue * value)

    __rmul__ = __mul__

    def __neg__(self) -> "FpElem":
        return self._new(-self.residue)

    def inverse(self) -> "FpElem":
        if self.residue == 0:
            raise ZeroDivisionError(f"0 在 F_{self.modulus} 中不可逆")
        return self._new(pow(self.residue, -1, self.modulus))

    def __truediv__(self, other):
        value = self._coerce(other)
        if value is NotImplemented:
            return NotImplemented
        return self * self._new(value).inverse()

    def __pow__(self, exponent: int) -> "FpElem":
        if exponent < 0:
            return self.inverse() ** (-exponent)
        return self._new(pow(self.residue, exponent, self.modulus))

    def __bool__(self) -> bool:
        return self.residue != 0

    def __int__(self) -> int:
        return self.residue

    def __repr__(self) -> str:
        return f"F{self.modulus}({self.residue})"


class PrimeField:
    """F_p 的上下文对象，构造时检查一次 p 是否为素数"""

    def __init__(self, p: int):
        if not isinstance(p, int):
            raise TypeError("p 必须是整数")
        if not isprime(p):
            raise ValueError(f"p={p} 不是素数")
        self.p = p

    def __call__(self, value: Scalar) -> FpElem:
        return reduce_mod(value, self.p)

    def __repr__(self) -> str:
        return f"PrimeField({self.p})"

    def __eq__(self, other) -> bool:
        return isinstance(other, PrimeField) and other.p == self.p

    def __hash__(self) -> int:
        return hash(self.p)

    @property
    def zero(self) -> FpElem:
        return FpElem(0, self.p)

    @property
    def one(self) -> FpElem:
        return FpElem(1, self.p)


def binom_exact(n: int, k: int) -> int:
    """C(n, k)，k < 0 或 k > n 时为 0"""
    if k < 0 or k > n:
        return 0
    return math.comb(n, k)


def binom_mod(n: int, k: int, p: int) -> FpElem:
    """C(n, k) mod p，按下降阶乘乘以 (k!)^{-1} 计算，要求 k < p"""
    if k >= p:
        raise ValueError(f"binom_mod 要求 k < p，得到 k={k}, p={p}")
    if k < 0:
        return FpElem(0, p)
    falling = 1
    for j in range(k):
        falling = falling * (n - j) % p
    return FpElem(falling * pow(math.factorial(k), -1, p) % p, p)


def reduce_mod(q: Scalar, p: int) -> FpElem:
    """把 p-整的有理数约化到 F_p"""
    q = Fraction(q)
    if q.denominator % p == 0:
        raise IntegralityError(f"{q} is not {p}-integral")
    return FpElem(q.numerator * pow(q.denominator, -1, p) % p, p)


def divide_and_reduce(value: int, divisor: int, p: int) -> tuple[int, bool]:
    """value / divisor 约化到 F_p，返回 (剩余, 是否在 Z 上整除)

    与 reduce_mod(Fraction(value, divisor), p) 相同，但只剥离 divisor 的 p-部分，
    不对大整数做 gcd。
    """
    if divisor == 0:
        raise ZeroDivisionError("除数为 0")
    exact = value % divisor == 0
    if value == 0:
        return 0, exact
    v = multiplicity(p, divisor)
    if v:
        p_part = p**v
        if value % p_part:
            raise IntegralityError(f"quotient by C = {divisor} is not {p}-integral")
        value //= p_part
        divisor //= p_part
    return value * pow(divisor, -1, p) % p, exact


def normalize_scalar(value: Scalar) -> Scalar:
    """Fraction 分母为 1 时归一为 int"""
    if isinstance(value, Fraction) and value.denominator == 1:
        return value.numerator
    return value
