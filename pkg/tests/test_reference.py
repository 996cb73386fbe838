import math

import numpy as np
import pytest
from scipy.stats import spearmanr

from spinbell.reference import (
    SeparabilityParams,
    ccl_closed,
    ccl_limit,
    corr_uv_closed,
    cq_closed_p,
    cq_closed_w,
    gamma_factors,
    short_time_coeffs,
)
from spinbell.spinspace import PhasePoint, w_from_phase_point


class TestCqClosed:
    def test_peak_value(self):
        assert cq_closed_w(1.0, 1.0, math.pi) == pytest.approx(0.5)

    def test_recurrences(self):
        for n in range(5):
            assert cq_closed_w(0.3 + 0.7j, 2.0, 2 * math.pi * n) == pytest.approx(0.0, abs=1e-15)

    def test_direct_substitution(self):
        w = 1 / math.sqrt(2)
        assert cq_closed_w(w, w, math.pi) == pytest.approx(2 / 1.5**4, abs=1e-15)

    @pytest.mark.parametrize(
        "p0A,p0B,tau,expected",
        [(0.0, 0.0, math.pi, 0.5), (1.0, 0.3, 2.2, 0.0), (0.5, 0.5, math.pi, 9 / 32)],
    )
    def test_momentum_form(self, p0A, p0B, tau, expected):
        assert cq_closed_p(p0A, p0B, tau) == pytest.approx(expected, abs=1e-15)

    def test_w_and_p_forms_agree(self):
        rng = np.random.default_rng(14)
        for _ in range(100):
            q0a, q0b = rng.uniform(0, 2 * math.pi, 2)
            p0a, p0b = rng.uniform(-0.999, 0.999, 2)
            tau = rng.uniform(0, 20)
            wa = w_from_phase_point(PhasePoint(q0a, p0a)).w
            wb = w_from_phase_point(PhasePoint(q0b, p0b)).w
            assert cq_closed_w(wa, wb, tau) == pytest.approx(
                cq_closed_p(p0a, p0b, tau), abs=1e-14
            )


class TestCclClosed:
    def test_zero_shape_parameter(self):
        for tau in (0.0, 1.0, 50.0):
            assert ccl_closed(0.0, 0.3, -0.4, tau) == 0.0

    def test_quarter_at_equatorial_centers(self):
        assert ccl_closed(1.0, 0.0, 0.0, math.pi) == pytest.approx(0.25, abs=1e-15)

    def test_long_time_limit(self):
        for delta, p0a, p0b in [(1.0, 0.0, 0.0), (0.5, 0.3, -0.6), (0.8, 0.9, 0.1)]:
            alpha = 0.5 * (p0a**2 + p0b**2)
            assert ccl_closed(delta, p0a, p0b, 1e7) == pytest.approx(
                ccl_limit(delta, alpha), abs=1e-9
            )

    def test_zero_at_start_and_series_branch_matches_direct_formula(self):
        assert ccl_closed(0.9, 0.2, -0.5, 0.0) == 0.0

        def direct(delta, p0a, p0b, tau):  # safe to evaluate naively at tau ~ 0.1
            alpha = 0.5 * (p0a**2 + p0b**2)
            beta = p0a**2 * p0b**2
            x = (1 - alpha) * (1 - (math.sin(tau) / tau) ** 2)
            y = (beta - alpha) * (math.cos(tau) - math.sin(tau) / tau) ** 2
            return delta**2 / (3 + delta**2) * (x + delta**2 / tau**2 * y)

        for tau in (0.0999999, 0.1000001):  # series branch below, direct above
            assert ccl_closed(0.9, 0.2, -0.5, tau) == pytest.approx(
                direct(0.9, 0.2, -0.5, tau), rel=1e-9
            )

    def test_monotone_in_delta(self):
        taus = np.linspace(0.01, 6 * math.pi, 200)
        prev = ccl_closed(0.2, 0.0, 0.0, taus)
        for d in (0.6, 1.0):
            cur = ccl_closed(d, 0.0, 0.0, taus)
            assert np.all(cur >= prev)
            prev = cur

    def test_rejects_bad_arguments(self):
        with pytest.raises(ValueError):
            ccl_closed(1.5, 0.0, 0.0, 1.0)
        with pytest.raises(ValueError):
            ccl_closed(0.5, 0.0, 0.0, -1.0)


class TestShortTime:
    @pytest.mark.parametrize(
        "p0A,p0B,expected",
        [
            (0.0, 0.0, (1 / 8, 1 / 12)),
            (1.0, 1.0, (0.0, 0.0)),
            (1.0, 0.0, (0.0, 1 / 36)),
        ],
    )
    def test_coefficients(self, p0A, p0B, expected):
        assert short_time_coeffs(p0A, p0B) == pytest.approx(expected, abs=1e-15)

    def test_quadratic_law_against_closed_forms(self):
        rng = np.random.default_rng(15)
        tau = 1e-3
        for _ in range(10):
            p0a, p0b = rng.uniform(-0.7, 0.7, 2)
            omega_q, omega_cl = short_time_coeffs(p0a, p0b)
            assert cq_closed_p(p0a, p0b, tau) / tau**2 == pytest.approx(omega_q, rel=1e-6)
            assert ccl_closed(1.0, p0a, p0b, tau) / tau**2 == pytest.approx(omega_cl, rel=1e-6)


class TestGammaFactors:
    @pytest.mark.parametrize(
        "n,delta,expected",
        [
            (0, 0.7, (1.0, 0.7)),
            (2, 0.9, (0.0, 0.0)),
            (8, 0.5, (1.0, 0.0)),
            (1, 1.0, (math.cos(math.pi / 4), 2 / math.pi)),
        ],
    )
    def test_values(self, n, delta, expected):
        assert gamma_factors(n, delta) == pytest.approx(expected, abs=1e-15)

    def test_classical_factor_decays_quantum_revives(self):
        gq8, gcl8 = gamma_factors(8, 1.0)
        assert gq8 == pytest.approx(1.0)  # full revival
        assert abs(gcl8) < 1e-15
        odd = [abs(gamma_factors(n, 1.0)[1]) for n in (1, 3, 5, 7)]
        assert all(a > b for a, b in zip(odd, odd[1:]))  # 1/n falloff

    def test_rejects_negative_index(self):
        with pytest.raises(ValueError):
            gamma_factors(-1, 0.5)


class TestCorrUV:
    def test_quantum_entries(self):
        uv = corr_uv_closed(math.pi, 1.0)
        assert uv.u_q == pytest.approx(0.25)
        assert uv.v_q == pytest.approx(0.25)

    def test_recurrence_time_classical_memory(self):
        # at tau = 2pi the quantum covariances vanish but the classical do not
        uv = corr_uv_closed(2 * math.pi, 0.8)
        assert uv.u_q == pytest.approx(0.0, abs=1e-15)
        assert uv.v_q == pytest.approx(0.0, abs=1e-15)
        assert uv.u_cl == pytest.approx(0.8**2 / (2 * math.pi) ** 4, rel=1e-12)
        assert uv.u_cl > 0

    def test_classical_values(self):
        uv = corr_uv_closed(math.pi, 1.0)
        assert uv.u_cl == pytest.approx(1 / math.pi**4, rel=1e-12)
        assert uv.v_cl == pytest.approx(1 / (3 * math.pi), rel=1e-12)

    def test_zero_shape_parameter(self):
        uv = corr_uv_closed(3.3, 0.0)
        assert uv.u_cl == 0.0 and uv.v_cl == 0.0

    def test_zero_time_limits(self):
        uv = corr_uv_closed(0.0, 0.9)
        assert uv.u_cl == 0.0 and uv.v_cl == 0.0

    def test_series_guard_is_seamless(self):
        # the guarded helpers switch branches at |tau| = 0.1
        for tau in (0.0999999, 0.1000001):
            uv = corr_uv_closed(tau, 1.0)
            direct_u = ((math.sin(tau) / tau - math.cos(tau)) / tau**2) ** 2 - (
                math.sin(tau) / tau
            ) ** 2 / 9
            direct_v = (math.sin(tau) / tau - math.cos(tau)) / (3 * tau)
            assert uv.u_cl == pytest.approx(direct_u, rel=1e-9)
            assert uv.v_cl == pytest.approx(direct_v, rel=1e-12)

    def test_small_time_quadratic_laws(self):
        # u_cl = 2 delta^2 tau^2/135 + O(tau^4), v_cl = delta tau/9 + O(tau^3)
        uv = corr_uv_closed(1e-5, 1.0)
        assert uv.u_cl == pytest.approx(2e-10 / 135, rel=1e-8)
        assert uv.v_cl == pytest.approx(1e-5 / 9, rel=1e-9)


class TestCclLimit:
    @pytest.mark.parametrize(
        "delta,alpha,expected",
        [(1.0, 0.0, 0.25), (0.3, 1.0, 0.0), (0.5, 0.0, 1 / 13)],
    )
    def test_values(self, delta, alpha, expected):
        assert ccl_limit(delta, alpha) == pytest.approx(expected, abs=1e-15)

    def test_bounds_the_closed_form(self):
        rng = np.random.default_rng(16)
        taus = np.linspace(0.0, 30 * math.pi, 3000)
        for _ in range(20):
            d = rng.uniform(0.05, 1.0)
            p0a, p0b = rng.uniform(-0.95, 0.95, 2)
            limit = ccl_limit(d, 0.5 * (p0a**2 + p0b**2))
            assert np.max(ccl_closed(d, p0a, p0b, taus)) <= limit + 1e-9


def test_separability_params():
    pars = SeparabilityParams.from_momenta(0.6, -0.8)
    assert pars.alpha == pytest.approx(0.5)
    assert pars.beta == pytest.approx(0.2304)
    with pytest.raises(ValueError):
        SeparabilityParams(alpha=0.1, beta=0.5)  # violates beta <= alpha^2


def test_mimicry_monotone_subsample():
    # normalized classical inseparability tracks normalized entanglement on [0, pi]
    rng = np.random.default_rng(18)
    taus = np.linspace(1e-4, math.pi, 200)
    eps = np.sin(taus / 2) ** 2
    for _ in range(20):
        d = rng.uniform(0.05, 1.0)
        p0a, p0b = rng.uniform(-0.9, 0.9, 2)
        frac = ccl_closed(d, p0a, p0b, taus) / ccl_limit(d, 0.5 * (p0a**2 + p0b**2))
        assert spearmanr(eps, frac).statistic >= 0.999
