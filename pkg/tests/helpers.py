"""测试共用的随机输入"""

import os
import random

import pytest

from app.algebra.forms import LinearForm

slow = pytest.mark.skipif(
    os.environ.get("COVCERT_SLOW") != "1", reason="设置 COVCERT_SLOW=1 运行耗时用例"
)


def random_unimodular(rng: random.Random, steps: int = 6) -> list[list[int]]:
    """若干初等行变换的乘积，行列式为 1"""
    matrix = [[1, 0, 0], [0, 1, 0], [0, 0, 1]]
    for _ in range(steps):
        i, j = rng.sample(range(3), 2)
        k = rng.choice([-2, -1, 1, 2])
        matrix[i] = [a + k * b for a, b in zip(matrix[i], matrix[j])]
    return matrix


def random_form(rng: random.Random, bound: int = 3) -> LinearForm:
    while True:
        form = LinearForm(tuple(rng.randint(-bound, bound) for _ in range(3)))
        if not form.is_zero():
            return form


def random_terms(rng: random.Random, count: int, bound: int = 3) -> list:
    return [(rng.choice([-3, -2, -1, 1, 2, 3]), random_form(rng, bound)) for _ in range(count)]
