from fractions import Fraction

import numpy as np
import pytest

from pqapprox import PQParams, RatPoly, corpus, pq_int
from pqapprox.convergence import (
    DegenerateFit,
    ExperimentRecord,
    convergence_verdict,
    fit_rate,
    make_sequence,
    modulus,
    run_bound_experiment,
    theorem10_check,
    remainder_terms,
    voronovskaja_table,
)
from pqapprox.moments import central_moment_ordinary
from pqapprox.operators import FunctionBundle, apply_higher

OMR = make_sequence("one-minus-reciprocal")


def _brute_modulus(f, delta, grid_size):
    xs = np.arange(grid_size + 1) / grid_size
    v = f(xs)
    best = 0.0
    for i in range(len(xs)):
        for j in range(i, len(xs)):
            if xs[j] - xs[i] <= delta + 1e-12:
                best = max(best, abs(v[j] - v[i]))
    return best


class TestModulus:
    def test_constant(self):
        assert modulus(lambda t: 3.0, 0.3) == 0.0

    def test_identity(self):
        assert modulus(lambda t: t, 0.25) == pytest.approx(0.25, abs=1 / 1024)

    def test_abs(self):
        f = corpus.get("abs").f
        assert abs(modulus(f, 1 / 8) - 1 / 8) <= 1 / 1024
        assert modulus(f, 1 / 8, 64) == pytest.approx(_brute_modulus(f, 1 / 8, 64))

    def test_rejects_bad_input(self):
        with pytest.raises(ValueError):
            modulus(lambda t: t, 0.0)
        with pytest.raises(ValueError):
            modulus(lambda t: t, 0.1, grid_size=32)

    @pytest.mark.parametrize("name", sorted(corpus.CORPUS))
    def test_monotone_and_subadditive(self, name):
        f = corpus.get(name).f
        # grid-aligned deltas: the lag for 2*delta is then exactly twice the lag for delta
        deltas = [k / 1024 for k in (1, 10, 31, 100, 205, 410)]
        vals = [modulus(f, d) for d in deltas]
        assert all(b >= a for a, b in zip(vals, vals[1:]))
        for d, w in zip(deltas, vals):
            assert modulus(f, 2 * d) <= 2 * w + 2 / 1024

    def test_off_grid_delta_on_slope_one_function(self):
        f = corpus.get("abs").f
        for d in (0.001, 0.03, 0.2):
            assert modulus(f, 2 * d) <= 2 * modulus(f, d) + 2 / 1024

    def test_matches_brute_force(self):
        f = corpus.get("sqrtabs").f
        for d in (0.05, 0.2, 0.7):
            assert modulus(f, d, 96) == pytest.approx(_brute_modulus(f, d, 96), abs=1e-15)


class TestSequences:
    def test_one_minus_reciprocal(self):
        params = OMR(2)
        assert params.p == pytest.approx(2 / 3) and params.q == pytest.approx(1 / 2)
        assert float(pq_int(10, OMR(10))) > float(pq_int(5, OMR(5)))
        brackets = [float(pq_int(n, OMR(n))) for n in (2, 4, 8, 16, 64, 256, 1024)]
        assert all(b > a for a, b in zip(brackets, brackets[1:]))
        with pytest.raises(ValueError):
            OMR(1)

    def test_fixed(self):
        seq = make_sequence("fixed", 1, 0.9)
        for n in (3, 50, 700):
            assert (seq(n).p, seq(n).q) == (1.0, 0.9)
        with pytest.raises(ValueError):
            make_sequence("fixed", 0.8, 0.9)

    def test_custom_validation(self):
        good = make_sequence("custom", generator=lambda n: (1 - 1 / n**2, 1 - 1 / n))
        assert good(10).q == pytest.approx(0.9)
        bad = make_sequence("custom", generator=lambda n: (0.5, 0.7))
        with pytest.raises(ValueError, match="n=4"):
            bad(4)
        with pytest.raises(ValueError):
            make_sequence("custom")
        with pytest.raises(ValueError):
            make_sequence("geometric")


class TestBoundExperiment:
    def test_identity_reproduced(self):
        recs = run_bound_experiment(corpus.get("t"), 0, OMR, [8, 16, 32])
        assert all(rec.sup_error <= 1e-14 for rec in recs)
        assert all(rec.ratio <= 1e-12 for rec in recs)

    def test_square_with_r2(self):
        recs = run_bound_experiment(corpus.get("t2"), 2, OMR, [8, 16, 32])
        assert all(rec.sup_error <= 1e-12 for rec in recs)
        assert all(rec.bound == 0 and rec.ratio == 0 for rec in recs)

    def test_sin_ratio_bounded(self):
        recs = run_bound_experiment(corpus.get("sin"), 1, OMR, [8, 16, 32, 64, 128])
        last = [rec.ratio for rec in recs[-3:]]
        assert max(last) / min(last) <= 3
        for rec in recs:
            assert np.isfinite([rec.sup_error, rec.omega, rec.bound, rec.ratio]).all()
            assert rec.bound > 0

    def test_preconditions(self):
        with pytest.raises(ValueError):
            run_bound_experiment(corpus.get("abs"), 1, OMR, [8, 16])
        with pytest.raises(ValueError):
            run_bound_experiment(corpus.get("sin"), 0, OMR, [16, 8])

    def test_worker_count_does_not_change_results(self):
        a = run_bound_experiment(corpus.get("exp"), 1, OMR, [8, 16, 32, 64], workers=1)
        b = run_bound_experiment(corpus.get("exp"), 1, OMR, [8, 16, 32, 64], workers=3)
        assert a == b


class TestFitRate:
    def test_degenerate(self):
        recs = run_bound_experiment(corpus.get("one"), 0, OMR, [8, 16, 32, 64])
        with pytest.raises(DegenerateFit):
            fit_rate(recs)

    def test_ignores_zero_records(self):
        recs = [ExperimentRecord(n, 0.9, 0.8, float(n), 1 / n, 1.0, 1.0, 1.0) for n in (2, 4, 8, 16)]
        recs.append(ExperimentRecord(32, 0.9, 0.8, 32.0, 0.0, 1.0, 1.0, 0.0))
        fit = fit_rate(recs)
        assert fit.slope == pytest.approx(-1.0) and fit.r_squared == pytest.approx(1.0)

    def test_abs_rate(self):
        fit = fit_rate(run_bound_experiment(corpus.get("abs"), 0, OMR, [16, 32, 64, 128, 256]))
        assert -0.65 <= fit.slope <= -0.35

    def test_sin_rate(self):
        fit = fit_rate(run_bound_experiment(corpus.get("sin"), 0, OMR, [16, 32, 64, 128, 256]))
        assert fit.slope == pytest.approx(-1.0, abs=0.2)


class TestVerdict:
    def test_fixed_pq_is_not_convergent(self):
        for p, q in ((1.0, 0.9), (0.95, 0.9)):
            recs = run_bound_experiment(corpus.get("sin"), 0, make_sequence("fixed", p, q), [16, 32, 64, 128, 256])
            verdict = convergence_verdict(recs)
            assert not verdict.vanishing
            assert verdict.bracket_growth < 1.05

    def test_default_scheme_is_convergent(self):
        recs = run_bound_experiment(corpus.get("sin"), 0, OMR, [16, 32, 64, 128, 256])
        verdict = convergence_verdict(recs)
        assert verdict.vanishing and verdict.bracket_growth > 3

    def test_needs_three_records(self):
        with pytest.raises(ValueError):
            convergence_verdict(run_bound_experiment(corpus.get("sin"), 0, OMR, [16, 32]))


class TestVoronovskaja:
    def test_linear_has_zero_deviation(self):
        for row in voronovskaja_table(corpus.get("t"), OMR, [16, 64, 256]):
            assert row.deviation <= 1e-10

    def test_square_at_p_one(self):
        # [n](B t^2 - x^2) = x(1-x) exactly when p = 1
        seq = make_sequence("custom", generator=lambda n: (1.0, 1 - 1 / n))
        for row in voronovskaja_table(corpus.get("t2"), seq, [16, 64, 256]):
            assert row.deviation <= 1e-9
        params = PQParams.exact(1, Fraction(15, 16))
        ordinary = central_moment_ordinary(16, 2, params).poly
        assert ordinary * pq_int(16, params) == RatPoly([0, 1, -1])

    def test_rejects_rough(self):
        with pytest.raises(ValueError):
            voronovskaja_table(corpus.get("abs"), OMR, [16])

    @pytest.mark.parametrize("name", ["exp", "sin", "t3"])
    def test_decreasing_when_p_power_tends_to_one(self, name):
        seq = make_sequence("custom", generator=lambda n: (1 - 1 / n**2, 1 - 1 / n))
        devs = [row.deviation for row in voronovskaja_table(corpus.get(name), seq, [16, 64, 256])]
        assert devs[0] > devs[1] > devs[2] and devs[2] * 3 <= devs[0]

    @pytest.mark.parametrize("name", ["exp", "sin", "t3"])
    def test_corrected_limit_decreases(self, name):
        devs = [row.deviation for row in voronovskaja_table(corpus.get(name), OMR, [16, 64, 256], corrected=True)]
        assert devs[0] > devs[1] > devs[2] and devs[2] * 3 <= devs[0]


class TestRemainderCheck:
    def test_low_degree_polynomial(self):
        params = PQParams(0.95, 0.9)
        for r in (0, 1, 2):
            for name in ("one", "t"):
                if corpus.get(name).r_max >= r + 2:
                    res = theorem10_check(corpus.get(name), r, params, 32, grid_size=256)
                    assert res.lhs_sup <= 1e-12

    def test_cubic_with_r1_against_exact(self):
        bundle = corpus.get("t3")
        ex = PQParams.exact(Fraction(9, 10), Fraction(2, 3))
        n = 7
        xs = [Fraction(i, 10) for i in range(11)]
        got = remainder_terms(bundle, 1, n, ex.to_float(), [float(x) for x in xs])
        for x, g in zip(xs, got):
            m2 = central_moment_ordinary(n, 2, ex, x)
            m3 = central_moment_ordinary(n, 3, ex, x)
            # f'' = 6x, f''' = 6, sign (-1)^1
            want = apply_higher(bundle, 1, n, ex, x) - x**3 + 6 * x * m2 / 2 + 6 * m3 / 6
            assert g == pytest.approx(float(want), abs=1e-13)

    @pytest.mark.parametrize("r", [1, 2, 3])
    def test_taylor_coefficient_is_exact_for_degree_r_plus_2(self, r):
        poly = RatPoly.monomial(r + 2)
        bundle = FunctionBundle.from_poly(poly, r_max=r + 2, name="mono")
        params = PQParams(0.9, 2 / 3)
        xs = np.linspace(0, 1, 33)
        taylor = remainder_terms(bundle, r, 12, params, xs, coefficient="taylor")
        stated = remainder_terms(bundle, r, 12, params, xs, coefficient="stated")
        assert np.max(np.abs(taylor)) <= 1e-13
        assert np.max(np.abs(stated)) > 1e-6

    def test_conventions_agree_at_r0(self):
        params = PQParams(1.0, 0.9)
        xs = np.linspace(0, 1, 65)
        a = remainder_terms(corpus.get("sin"), 0, 20, params, xs, coefficient="stated")
        b = remainder_terms(corpus.get("sin"), 0, 20, params, xs, coefficient="taylor")
        np.testing.assert_array_equal(a, b)

    def test_sin_ratio_bounded(self):
        ratios = [theorem10_check(corpus.get("sin"), 0, OMR(n), n).ratio for n in (16, 64, 256)]
        assert all(np.isfinite(ratios)) and max(ratios) <= 3 * ratios[0]

    def test_rejects_missing_derivatives(self):
        with pytest.raises(ValueError):
            theorem10_check(corpus.get("abs"), 0, PQParams(1.0, 0.9), 16)
        with pytest.raises(ValueError):
            remainder_terms(corpus.get("sin"), 0, 16, PQParams(1.0, 0.9), [0.5], coefficient="other")
