"""纯代数层：精确标量、三元形式、协变量、插值族"""

from app.algebra.covariants import (
    Covariant,
    QuadMonomial,
    bracket,
    check_triple_structure,
    clebsch_I,
    eval_S,
    eval_T,
    expand_S,
    expand_T,
)
from app.algebra.forms import Coords, HomForm, LinearForm, basis, power_of_linear
from app.algebra.scalars import FpElem, IntegralityError, PrimeField

__all__ = [
    "Coords",
    "Covariant",
    "FpElem",
    "HomForm",
    "IntegralityError",
    "LinearForm",
    "PrimeField",
    "QuadMonomial",
    "basis",
    "bracket",
    "check_triple_structure",
    "clebsch_I",
    "eval_S",
    "eval_T",
    "expand_S",
    "expand_T",
    "power_of_linear",
]
