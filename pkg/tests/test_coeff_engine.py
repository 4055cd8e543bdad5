"""系数引擎：κ_s、Q_t、R_t 与 F_p[n] 拟多项式"""

import math

import numpy as np
import pytest

from app.algebra.covariants import Covariant, clebsch_I
from app.algebra.family import C, CX_C, CX_RING, CPolyForm
from app.algebra.forms import LinearForm, from_qq
from app.services.coeff_engine import (
    CASE_D1,
    CASE_D2,
    GConfig,
    Q_t,
    R_t,
    coeff_I_power,
    engine_for,
    falling_factorial_poly,
    get_case,
    quasi_poly,
    xi_eta,
)
from tests.helpers import slow

Y2 = LinearForm.of(0, 1, 0)
Y3 = LinearForm.of(0, 0, 1)
DEGENERATE = (2, 3, 8)


def test_cases():
    assert (CASE_D1.rows, CASE_D1.cols, CASE_D1.period, CASE_D1.n_min) == (15, 22, 110, 12)
    assert (CASE_D2.rows, CASE_D2.cols, CASE_D2.period, CASE_D2.n_min) == (45, 57, 342, 21)
    assert len(CASE_D1.triples) == 84
    assert get_case("d2") is CASE_D2
    with pytest.raises(ValueError):
        get_case("d3")


def test_window_and_divisor_index():
    assert CASE_D1.window(12) == list(range(37, 26, -1))
    for cfg in (CASE_D1, CASE_D2):
        for n in range(cfg.n_min, cfg.n_min + 7):
            for u in range(cfg.p):
                m, divisor = cfg.divisor(n, cfg.degree(n) - u)
                assert m == cfg.divisor_index(u)
                assert divisor == (math.comb(n, m) if m > 0 else 1)


def test_degenerate_pair():
    xi, _, _ = xi_eta(DEGENERATE, Y2, CASE_D1)
    assert xi.xi == 0
    assert xi.eta != 0


def test_coeff_top_degree():
    n = 2
    a, b, c = xi_eta((0, 1, 2), Y2, CASE_D1)
    expected = (-166) ** n * (a.xi * b.xi * c.xi) ** n
    assert coeff_I_power(3 * n, n, (0, 1, 2), Y2, CASE_D1) == expected
    assert coeff_I_power(3 * n + 1, n, (0, 1, 2), Y2, CASE_D1) == 0
    assert coeff_I_power(-1, n, (0, 1, 2), Y2, CASE_D1) == 0


@pytest.mark.parametrize("n", range(7))
@pytest.mark.parametrize("y", [Y2, Y3])
def test_coeff_matches_univariate_expansion(n, y):
    engine = engine_for(CASE_D1)
    y_index = engine.y_index(y)
    line = LinearForm((C, y[1], y[2]))
    for triple_index, triple in enumerate(CASE_D1.triples):
        i, j, k = (CASE_D1.ms[q] for q in triple)
        poly = clebsch_I(line, i, j, k) ** n
        for s in range(3 * n + 1):
            expected = from_qq(poly.coeff(C**s))
            assert coeff_I_power(s, n, triple, y, CASE_D1) == expected
            assert engine.kappa(s, n, triple_index, y_index) == expected


def test_degenerate_triple_drops_top_coefficients():
    n = 5
    for s in range(2 * n + 1, 3 * n + 1):
        assert coeff_I_power(s, n, DEGENERATE, Y2, CASE_D1) == 0
    assert coeff_I_power(2 * n, n, DEGENERATE, Y2, CASE_D1) != 0


@pytest.mark.parametrize("cfg", [CASE_D1, CASE_D2])
def test_q_vector_matches_direct_sum(cfg):
    """n = 2 时直接在 CX_RING 中展开 −24 Σ I^n (cx+y)^power (m_i m_j m_k)^power"""
    n = 2
    y = Y2
    line = LinearForm((CX_C, y[1], y[2]))
    total = CX_RING.zero
    for triple in cfg.triples:
        i, j, k = (cfg.ms[q] for q in triple)
        value = clebsch_I(line, i, j, k)
        product = line.as_poly(CX_RING) * i.as_poly(CX_RING) * j.as_poly(CX_RING)
        product *= k.as_poly(CX_RING)
        total += value**n * product**cfg.power
    series = CPolyForm.from_poly(total * -24, cfg.order)

    engine = engine_for(cfg)
    for t in range(cfg.degree(n) + 1):
        assert series.coefficient(t).dense() == engine.q_vector(n, t, y).tolist()


@pytest.mark.parametrize("cfg", [CASE_D1, CASE_D2])
def test_top_coefficient_divisible_by_x1(cfg):
    n = cfg.n_min
    for y in cfg.ys:
        form = Q_t(n, cfg.degree(n), y, cfg)
        assert form.x1_order() >= cfg.power


def test_Q_t_window_enforced():
    with pytest.raises(ValueError):
        Q_t(12, 26, Y2, CASE_D1)
    with pytest.raises(ValueError):
        engine_for(CASE_D1).y_index(LinearForm.of(0, 1, 1))


def test_equivariance_under_shear():
    """A 固定 x1 与 x2；g 换成 g∘A 后 Q_t 变为 Q_t∘A"""
    matrix = [[1, 0, 0], [0, 1, 0], [2, -3, 1]]
    moved = GConfig(
        case="shear",
        kind=Covariant.S,
        ms=tuple(m.substitute(matrix) for m in CASE_D1.ms),
        p=11,
        ys=(Y2,),
    )
    n = 3
    for t in CASE_D1.window(n):
        assert Q_t(n, t, Y2, moved) == Q_t(n, t, Y2, CASE_D1).substitute(matrix)


class TestRt:
    def test_top_of_window_has_unit_divisor(self):
        n = 12
        value = R_t(n, 3 * n, Y2, CASE_D1)
        assert (value.divisor_index, value.divisor) == (0, 1)
        assert value.exact == Q_t(n, 3 * n, Y2, CASE_D1)
        assert value.exact_over_Z

    def test_divides_by_n(self):
        n = 12
        t = CASE_D1.degree(n) - 4
        value = R_t(n, t, Y2, CASE_D1)
        assert (value.divisor_index, value.divisor) == (1, n)
        assert value.exact.scale(n) == Q_t(n, t, Y2, CASE_D1)

    def test_residues_match_matrix(self):
        n = 13
        engine = engine_for(CASE_D1)
        matrix = engine.matrix_exact(n).matrix
        for u in (0, 4, 10):
            column = matrix[:, engine.y_index(Y3) * CASE_D1.p + u]
            value = R_t(n, CASE_D1.degree(n) - u, Y3, CASE_D1)
            assert value.residues == column.tolist()


@pytest.mark.parametrize("cfg, n", [(CASE_D1, 12), (CASE_D1, 3), (CASE_D2, 21)])
def test_window_vectors_match_q_vector(cfg, n):
    engine = engine_for(cfg)
    for y_index, y in enumerate(cfg.ys):
        vectors = engine.window_vectors(n, y_index)
        assert len(vectors) == cfg.p
        for u, vector in enumerate(vectors):
            assert vector.tolist() == engine.q_vector(n, cfg.degree(n) - u, y).tolist()


class TestQuasiPolynomial:
    def test_offset_zero(self):
        poly = quasi_poly((0, 1, 2), 0, Y2, CASE_D1)
        assert poly.degree == 0
        rho, _ = poly.terms[0]
        assert rho == 10
        assert poly.evaluate(5) == pow(10, 5, 11)

    @pytest.mark.parametrize("w", [0, 3, 10])
    @pytest.mark.parametrize("y", [Y2, Y3])
    def test_matches_exact_coefficient(self, w, y):
        for triple in CASE_D1.triples:
            poly = quasi_poly(triple, w, y, CASE_D1)
            assert poly.degree <= w
            for n in range(max(poly.valid_from, 1), 40):
                if 3 * n < w:
                    continue
                expected = coeff_I_power(3 * n - w, n, triple, y, CASE_D1) % 11
                assert poly.evaluate(n) == expected

    @pytest.mark.parametrize("w", [2, 5, 9])
    def test_divisible_by_falling_factorial(self, w):
        divisor = falling_factorial_poly(-(-w // 3), 11)
        for triple in CASE_D1.triples[:20]:
            poly = quasi_poly(triple, w, Y2, CASE_D1)
            for _, table_poly in poly.terms:
                _, remainder = table_poly.div(divisor)
                assert remainder.is_zero

    def test_degenerate_triple(self):
        poly = quasi_poly(DEGENERATE, 4, Y2, CASE_D1)
        assert poly.terms == ()
        assert poly.valid_from == 5
        assert poly.evaluate(7) == 0
        with pytest.raises(ValueError):
            poly.evaluate(2)

    def test_offset_range(self):
        with pytest.raises(ValueError):
            quasi_poly((0, 1, 2), 11, Y2, CASE_D1)

    def test_entry_matches_exact_matrix(self):
        engine = engine_for(CASE_D1)
        for n in (13, 40):
            matrix = engine.matrix_exact(n).matrix
            for y_index, u in [(0, 0), (0, 7), (1, 10)]:
                for row in (0, 6, 14):
                    entry = engine.entry_quasi_polynomial(u, y_index, row)
                    assert entry.evaluate(n) == matrix[row, y_index * 11 + u]


def test_matrix_quasi_matches_exact_d1():
    engine = engine_for(CASE_D1)
    for n in (12, 27):
        assert np.array_equal(engine.matrix_quasi(n), engine.matrix_exact(n).matrix)
    with pytest.raises(ValueError):
        engine.matrix_quasi(10)


@slow
def test_matrix_quasi_matches_exact_d2():
    engine = engine_for(CASE_D2)
    assert np.array_equal(engine.matrix_quasi(21), engine.matrix_exact(21).matrix)


@pytest.mark.parametrize(
    "cfg, n",
    [(CASE_D1, n) for n in (12, 13, 14, 29, 52, 85, 121)]
    + [(CASE_D2, 21), (CASE_D2, 22)]
    + [pytest.param(CASE_D2, n, marks=slow) for n in (38, 61, 94, 362)],
)
def test_periodicity(cfg, n):
    engine = engine_for(cfg)
    first = engine.matrix_exact(n)
    shifted = engine.matrix_exact(n + cfg.period)
    assert first.matrix.shape == (cfg.rows, cfg.cols)
    assert np.array_equal(first.matrix, shifted.matrix)
    assert first.divisions == cfg.cols


def test_check_divisibility_covers_every_column():
    engine = engine_for(CASE_D1)
    assert engine.check_divisibility() == CASE_D1.cols
