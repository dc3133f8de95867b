import math

import numpy as np
import pytest

from frozen_constants import LORENTZ_EXTRAP_C, PSI_CONDITION_C, PSI_CONDITION_P_RANGE
from htlab.besov import StepFunction
from htlab.errors import NumericalError, TruncationWarning
from htlab.hankel import SingularSpectrum
from htlab.lorentz import (
    PsiFunction,
    a_psi,
    default_h_grid,
    extrapolation_functional,
    harmonic_norm_curve,
    k_psi,
    lorentz_quasinorm,
    partial_sum_ratio,
    psi_condition_constant,
    psi_derivative_norm,
    sandwich_check,
    spectrum_norm_curve,
)
from sandwich_fixtures import fixtures

PSI1 = PsiFunction(1.0)
PSI_HALF = PsiFunction(0.5)
HARMONIC = SingularSpectrum(1.0 / np.arange(1, 10**6 + 1))


class TestPsi:
    def test_parse(self):
        assert PsiFunction.parse("log") == PSI1
        assert PsiFunction.parse("logpow:0.5") == PSI_HALF
        for bad in ("exp", "logpow:0", "logpow:2", "logpow:x"):
            with pytest.raises(ValueError):
                PsiFunction.parse(bad)

    @pytest.mark.parametrize("psi", [PSI1, PSI_HALF, PsiFunction(0.25)])
    def test_increasing_concave(self, psi):
        t = np.linspace(0, 50, 2001)
        v = psi(t)
        assert v[0] == 0
        assert np.all(np.diff(v) > 0)
        assert np.all(np.diff(v, 2) <= 1e-12)

    @pytest.mark.parametrize("psi", [PSI1, PSI_HALF])
    def test_psi_of_exp_overflow_safe(self, psi):
        s = np.array([0.5, 3.0, 30.0])
        assert np.allclose(psi.psi_of_exp(s), psi(np.exp(s)), rtol=1e-14)
        assert psi.psi_of_exp(2.0**16) == pytest.approx((2.0**16) ** psi.beta, rel=1e-15)
        assert np.isfinite(psi.psi_of_exp(1e300))

    def test_derivative(self):
        t = np.array([0.5, 2.0, 100.0])
        for psi in (PSI1, PSI_HALF):
            fd = (psi(t + 1e-6) - psi(t - 1e-6)) / 2e-6
            assert np.allclose(psi.derivative(t), fd, rtol=1e-6)

    @pytest.mark.parametrize("psi", [PSI1, PSI_HALF])
    def test_tilde(self, psi):
        t = np.array([1.0, 10.0, 40.0])
        assert np.allclose(psi.tilde(t), psi(2.0**t - 1), rtol=1e-13)
        big = psi.tilde(1e6)
        assert big == pytest.approx((1e6 * math.log(2)) ** psi.beta, rel=1e-15)
        assert psi.tilde_ratio(7.0) == pytest.approx(psi.tilde(7.0) / psi.tilde_derivative(7.0))


class TestDilation:
    def test_examples(self):
        assert a_psi(PSI1, math.e) == pytest.approx(math.e, rel=1e-6)
        assert a_psi(PSI_HALF, 4.0) == pytest.approx(2.0, rel=1e-6)
        assert a_psi(PSI1, 1.0) == 1.0
        assert a_psi(PSI_HALF, 1.0) == 1.0

    def test_k_psi(self):
        assert k_psi(PSI1) == pytest.approx(1.0, abs=1e-6)
        assert k_psi(PSI_HALF) == pytest.approx(0.5, abs=1e-6)

    def test_rejects_alpha_below_one(self):
        with pytest.raises(ValueError):
            a_psi(PSI1, 0.5)

    @pytest.mark.parametrize("psi", [PSI1, PSI_HALF])
    def test_multiplicative(self, psi):
        for a, b in [(1.25, 2.0), (2.0, math.e), (1.5, 1.5)]:
            assert a_psi(psi, a * b) == pytest.approx(a_psi(psi, a) * a_psi(psi, b), rel=1e-6)

    @pytest.mark.parametrize("psi", [PSI1, PSI_HALF])
    def test_tends_to_one(self, psi):
        vals = [a_psi(psi, a) for a in (1.5, 1.25, 1.125, 1.0625)]
        assert all(b < a for a, b in zip(vals, vals[1:]))
        assert all(v >= 1 for v in vals)


class TestPartialSums:
    def test_harmonic_example(self):
        # H_{10**4} / log(1 + 10**4)
        ref = sum(1.0 / k for k in range(1, 10**4 + 1)) / math.log(1 + 10**4)
        assert partial_sum_ratio(HARMONIC, PSI1, 1.0, 1e4) == pytest.approx(ref, rel=1e-12)
        assert ref == pytest.approx(1.0627, abs=1e-4)

    def test_small_t(self):
        assert partial_sum_ratio(HARMONIC, PSI1, 1.0, 0.5) == 0.0

    def test_pair(self):
        s = SingularSpectrum(np.array([1.0, 1.0]))
        assert partial_sum_ratio(s, PSI1, 1.0, 2.0) == pytest.approx(2 / math.log(3), rel=1e-14)

    def test_truncation_flag(self):
        s = SingularSpectrum(np.array([1.0, 0.5]))
        with pytest.warns(TruncationWarning):
            partial_sum_ratio(s, PSI1, 1.0, 10.0)

    def test_exact_spectrum_not_flagged(self, recwarn):
        s = SingularSpectrum(np.array([1.0, 0.5]), exact=True)
        partial_sum_ratio(s, PSI1, 1.0, 10.0)
        assert not [w for w in recwarn if issubclass(w.category, TruncationWarning)]

    def test_step_function_agrees_with_spectrum(self):
        v = 1.0 / np.arange(1, 101)
        s = SingularSpectrum(v, exact=True)
        h = StepFunction.from_values(np.arange(101.0), v)
        for t in (3.0, 17.0, 100.0):
            assert partial_sum_ratio(h, PSI1, 1.0, t) == pytest.approx(
                partial_sum_ratio(s, PSI1, 1.0, t), rel=1e-12
            )


class TestQuasinorm:
    @pytest.mark.parametrize("n", [1, 5, 40])
    def test_constant(self, n):
        s = SingularSpectrum(np.ones(n), exact=True)
        assert lorentz_quasinorm(s, PSI1) == pytest.approx(n / math.log(1 + n), rel=1e-14)

    def test_zero(self):
        assert lorentz_quasinorm(SingularSpectrum(np.zeros(4)), PSI1) == 0.0

    def test_harmonic(self):
        assert lorentz_quasinorm(HARMONIC, PSI1) == pytest.approx(1 / math.log(2), rel=1e-12)

    def test_dominates_partial_sums(self, rng):
        v = np.sort(rng.exponential(size=500))[::-1]
        s = SingularSpectrum(v, exact=True)
        for p in (1.0, 2.0):
            q = lorentz_quasinorm(s, PSI_HALF, p)
            for t in rng.uniform(0.5, 600, 50):
                assert partial_sum_ratio(s, PSI_HALF, p, t) <= q * (1 + 1e-12)


class TestExtrapolation:
    def test_harmonic(self):
        res = extrapolation_functional(harmonic_norm_curve(), PSI1, 1.0)
        v = dict(zip(res.h_grid, res.per_h))
        assert 0.99 <= v[2.0**-10] <= 1.01
        assert res.tail_limsup == pytest.approx(1.0, abs=1e-3)

    def test_spectrum_curve_matches_closed_form(self):
        s = SingularSpectrum(1.0 / np.arange(1, 10**6 + 1))
        c = spectrum_norm_curve(s)
        from scipy.special import zeta

        assert c(3.0) == pytest.approx(zeta(3.0) ** (1 / 3), rel=1e-10)

    def test_finite_spectrum_vanishes(self):
        s = SingularSpectrum(np.array([1.0, 0.5, 0.25]), exact=True)
        res = extrapolation_functional(spectrum_norm_curve(s), PSI1, 1.0, default_h_grid(2.0**-16))
        assert res.tail_limsup <= 1e-3
        assert np.all(np.diff(res.per_h[3:]) < 0)

    def test_zero(self):
        res = extrapolation_functional(spectrum_norm_curve(np.zeros(3)), PSI1, 1.0)
        assert not np.any(res.per_h)

    def test_grid(self):
        g = default_h_grid()
        assert g[0] == 0.5 and g[-1] == 2.0**-16 and len(g) == 16
        with pytest.raises(ValueError):
            extrapolation_functional(harmonic_norm_curve(), PSI1, 1.0, [2.0])

    def test_curve_failure_propagates(self):
        with pytest.raises(NumericalError):
            extrapolation_functional(lambda q: float("nan"), PSI1, 1.0)

    def test_mutual_bound_with_quasinorm(self):
        cases = [(HARMONIC, harmonic_norm_curve())]
        for r in (0.5, 0.9, 0.99):
            s = SingularSpectrum(r ** np.arange(200.0))
            cases.append((s, spectrum_norm_curve(s)))
        for s, curve in cases:
            for p in (1.0, 2.0):
                ratio = extrapolation_functional(curve, PSI1, p).sup_value / lorentz_quasinorm(s, PSI1, p)
                assert 1 / LORENTZ_EXTRAP_C <= ratio <= LORENTZ_EXTRAP_C


class TestSandwich:
    @pytest.fixture(scope="class")
    @staticmethod
    def results():
        return {name: (sandwich_check(H, psi, p), expected) for name, (H, psi, p, expected) in fixtures().items()}

    def test_spec_examples(self, results):
        r, _ = results["indicator"]
        assert r.lim_psi < 1e-3 and r.limsup_extrap < 1e-3
        r, _ = results["inverse_linear"]
        assert r.lim_psi == pytest.approx(1.0, rel=1e-9)
        assert 1 - 1e-5 <= r.ratio <= math.e
        r, _ = results["inverse_square"]
        assert r.lim_psi < 1e-3

    def test_lim_psi_matches_closed_form(self, results):
        for name, (r, expected) in results.items():
            if expected:
                assert r.lim_psi == pytest.approx(expected, rel=1e-5), name

    def test_literal_and_power_forms_agree(self, results):
        # the (1+h) and (p+h) bookkeepings share the h -> 0 limit
        for name, (r, _) in results.items():
            assert r.limsup_extrap == pytest.approx(r.limsup_extrap_power, rel=2e-3), name

    def test_gauge_gamma_factor(self, results):
        # int_0^t H = 2 psi(t) for psi = log(1+t)**(1/2): the extrapolated side
        # carries Gamma(1 + k_psi) = Gamma(3/2)
        r, _ = results["sqrt_log_half_gauge"]
        assert r.ratio == pytest.approx(math.gamma(1.5), rel=1e-3)

    def test_proved_direction_for_p_one(self, results):
        for name, (r, _) in results.items():
            if fixtures_p(name) == 1.0:
                assert 1 / math.e - 0.05 <= r.ratio <= 1 + 0.05, name

    def test_finite_support_within_bounds(self):
        h = StepFunction.from_values([0.0, 1.0], [1.0])
        assert sandwich_check(h, PSI1).within_bounds


def fixtures_p(name):
    return {"inverse_sqrt_p2": 2.0, "dyadic_p2": 2.0}.get(name, 1.0)


class TestCondition:
    @pytest.mark.parametrize("beta", [1.0, 0.5])
    def test_recorded_constant(self, beta):
        psi = PsiFunction(beta)
        lo, hi = PSI_CONDITION_P_RANGE[beta]
        ps = np.linspace(lo, hi, 200)
        c = psi_condition_constant(psi, ps)
        assert 0 < c <= PSI_CONDITION_C[beta]

    def test_derivative_norm_quadrature(self):
        from scipy.integrate import quad

        for psi, p in ((PSI1, 1.5), (PSI1, 3.0), (PSI_HALF, 1.5)):
            ref = quad(lambda t: psi.derivative(t) ** p, 0, np.inf, limit=400)[0] ** (1 / p)
            assert psi_derivative_norm(psi, p) == pytest.approx(ref, rel=1e-6)

    def test_half_gauge_not_integrable_for_large_p(self):
        assert psi_derivative_norm(PSI_HALF, 2.5) == math.inf
