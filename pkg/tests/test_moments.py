import random
from fractions import Fraction

import numpy as np
import pytest

import oracles
from conftest import PQ_GRID
from pqapprox import (
    PQParams,
    RatPoly,
    StructureViolation,
    absolute_moment,
    central_moment_ordinary,
    central_moment_pq,
    estimate_constants,
    lemma2_residual,
    lemma3_decompose,
    q_bernstein_oracle,
)
from pqapprox.moments import decomposition_coefficients_float, moment_grid, shifted_pq_moment

HALF = PQParams.exact(1, Fraction(1, 2))


class TestExamples:
    def test_low_orders(self):
        for pq in PQ_GRID:
            params = PQParams.exact(*pq)
            assert central_moment_pq(5, 0, params).poly == RatPoly([1])
            assert central_moment_pq(5, 1, params).poly.is_zero()

    def test_second_pq_moment_small_case(self):
        poly = central_moment_pq(2, 2, HALF).poly
        assert poly(0) == 0 and poly(1) == 0
        x = Fraction(1, 2)
        assert poly(x) == oracles.pq_moment(2, 2, 1, Fraction(1, 2), x)

    def test_ordinary_moments(self):
        x = Fraction(1, 2)
        assert central_moment_ordinary(2, 0, HALF, x) == 1
        assert central_moment_ordinary(2, 1, HALF).poly.is_zero()
        assert central_moment_ordinary(2, 2, HALF, x) == Fraction(1, 6)
        assert central_moment_ordinary(2, 2, HALF).poly(x) == Fraction(1, 6)

    def test_absolute_moments(self):
        x = Fraction(1, 2)
        assert absolute_moment(2, 0, HALF, x) == 1
        for m in (1, 2, 3):
            assert absolute_moment(6, m, HALF, 0) == 0
        assert absolute_moment(2, 2, HALF, x, kind="ordinary") == Fraction(1, 6)
        assert absolute_moment(2, 2, HALF, x, kind="pq") == Fraction(1, 6)

    @pytest.mark.parametrize("n,m,pq", [
        (3, 1, (Fraction(3, 4), Fraction(1, 2))),
        (5, 3, (Fraction(1), Fraction(2, 3))),
        (8, 5, (Fraction(9, 10), Fraction(1, 2))),
    ])
    def test_recurrence_residual_vanishes(self, n, m, pq):
        assert lemma2_residual(n, m, PQParams.exact(*pq)).is_zero()

    def test_decomposition(self):
        dec2 = lemma3_decompose(6, 2, HALF)
        assert len(dec2.b) == 1 and dec2.exponent == 1
        dec3 = lemma3_decompose(4, 3, HALF)
        assert dec3.residual.is_zero() and len(dec3.b) == 2
        for x in (Fraction(1, 5), Fraction(2, 3)):
            assert dec3.reconstruct(HALF)(x) == oracles.pq_moment(4, 3, 1, Fraction(1, 2), x)
        with pytest.raises(ValueError):
            lemma3_decompose(4, 1, HALF)

    def test_constant_estimates(self):
        fixed = [PQParams(1.0, 0.9), PQParams(0.95, 0.9)]
        assert estimate_constants(1, [8, 16], fixed).C_hat == 0.0
        # at p = 1 the second moment is exactly x(1-x)/[n]
        for n in (8, 32):
            dec = lemma3_decompose(n, 2, PQParams.exact(1, Fraction(9, 10)))
            c2 = estimate_constants(2, [n], [PQParams(1.0, 0.9)]).C_hat
            assert c2 == pytest.approx(float(dec.b[0]), rel=1e-10)
        est = estimate_constants(3, [4, 8, 16, 32, 64], fixed)
        assert np.isfinite(est.C_hat) and np.isfinite(est.K_hat)
        head = estimate_constants(3, [4, 8, 16], fixed)
        assert est.C_hat <= 1.05 * head.C_hat

    def test_rational_mode_required(self):
        with pytest.raises(ValueError):
            central_moment_pq(3, 2, PQParams(0.9, 0.5))
        with pytest.raises(ValueError):
            lemma2_residual(3, 2, PQParams(0.9, 0.5))


def test_shift_is_substitution():
    params = PQParams.exact(Fraction(9, 10), Fraction(2, 3))
    for m in range(4):
        base = central_moment_pq(5, m, params).poly
        assert shifted_pq_moment(5, m, params, Fraction(10, 9)) == base.scale_argument(Fraction(10, 9))


@pytest.mark.parametrize("pq", PQ_GRID)
def test_symbolic_matches_brute_force(pq):
    params = PQParams.exact(*pq)
    rng = random.Random(11)
    for n in (1, 3, 6):
        for m in range(6):
            poly = central_moment_pq(n, m, params).poly
            for _ in range(4):
                x = Fraction(rng.randint(1, 99), 100)
                assert poly(x) == oracles.pq_moment(n, m, *pq, x)


@pytest.mark.parametrize("pq", PQ_GRID)
def test_moments_vanish_at_endpoints_and_degree(pq):
    params = PQParams.exact(*pq)
    for n in (2, 5, 9):
        for m in range(2, 7):
            poly = central_moment_pq(n, m, params).poly
            assert poly(0) == 0 and poly(1) == 0
            assert poly.degree <= max(n, m)
            ordinary = central_moment_ordinary(n, m, params).poly
            assert ordinary(0) == 0 and ordinary(1) == 0


def test_structure_violation_is_signalled(monkeypatch):
    import pqapprox.moments as mod
    from pqapprox.moments import MomentPoly

    monkeypatch.setattr(mod, "central_moment_pq", lambda n, m, p: MomentPoly(n, m, "pq", RatPoly([1, 1])))
    with pytest.raises(StructureViolation):
        mod.lemma3_decompose(3, 2, HALF)


def test_float_grid_matches_exact():
    ex = PQParams.exact(Fraction(9, 10), Fraction(2, 3))
    xs = [Fraction(i, 8) for i in range(9)]
    for m in range(5):
        poly = central_moment_pq(7, m, ex).poly
        got = moment_grid(7, m, ex.to_float(), [float(x) for x in xs])
        np.testing.assert_allclose(got, [float(poly(x)) for x in xs], rtol=1e-11, atol=1e-15)
        absolute = [float(absolute_moment(7, m, ex, x)) for x in xs]
        np.testing.assert_allclose(moment_grid(7, m, ex.to_float(), [float(x) for x in xs], absolute=True),
                                   absolute, rtol=1e-11, atol=1e-15)


@pytest.mark.parametrize("params", [PQParams(1.0, 0.9), PQParams(0.95, 0.9)], ids=["p=1", "p=0.95"])
def test_constant_ratio_stable_under_doubling(params):
    for m in range(1, 6):
        c32 = estimate_constants(m, [32], [params]).C_hat
        c256 = estimate_constants(m, [32, 64, 128, 256], [params]).C_hat
        assert c256 <= 1.05 * c32 + 1e-12


def test_odd_absolute_moment_cauchy_schwarz_envelope():
    params = [PQParams(1.0, 0.9), PQParams(0.95, 0.9)]
    ns = [16, 32, 64]
    k3 = estimate_constants(3, ns, params).K_hat
    c4 = estimate_constants(4, ns, params).C_hat
    c2 = estimate_constants(2, ns, params).C_hat
    assert k3 <= 1.1 * np.sqrt(c4 * c2)


def test_q_reduction_of_moments():
    rng = np.random.default_rng(3)
    for _ in range(20):
        n = int(rng.integers(1, 40))
        q = float(rng.uniform(0.1, 0.95))
        x = float(rng.uniform(0, 1))
        params = PQParams(1.0, q)
        for m in range(5):
            ref_ord = q_bernstein_oracle(lambda t: (t - x) ** m, n, q, x)
            pq_factor = lambda t: np.prod([t - q**s * x for s in range(m)]) if m else 1.0
            ref_pq = q_bernstein_oracle(pq_factor, n, q, x)
            assert abs(moment_grid(n, m, params, [x], kind="ordinary")[0] - ref_ord) <= 1e-12
            assert abs(moment_grid(n, m, params, [x], kind="pq")[0] - ref_pq) <= 1e-12


@pytest.mark.parametrize("pq", [(1.0, 0.5), (0.75, 0.5), (0.9, 2 / 3), (1.0, 0.9), (0.99, 0.98)])
def test_decomposition_coefficients_bounded(pq):
    params = PQParams(*pq)
    for m in (2, 3, 4, 5):
        early = max(np.abs(decomposition_coefficients_float(n, m, params)).max() for n in (10, 25, 50))
        late = max(np.abs(decomposition_coefficients_float(n, m, params)).max() for n in (100, 150, 200))
        assert np.isfinite(late) and late <= 1.05 * early


def test_float_coefficients_match_exact():
    ex = PQParams.exact(Fraction(9, 10), Fraction(2, 3))
    for m in (2, 3, 4, 5):
        exact = [float(b) for b in lemma3_decompose(9, m, ex).b]
        np.testing.assert_allclose(decomposition_coefficients_float(9, m, ex), exact, rtol=1e-8, atol=1e-12)
