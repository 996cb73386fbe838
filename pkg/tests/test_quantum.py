import math

import numpy as np
import pytest

from spinbell.quantum import (
    J_MAX,
    SpinConvention,
    TwoQubitState,
    coherent_completeness,
    coherent_state,
    correlation_function_q,
    cq_numeric,
    evolve,
    husimi_reduced,
    pauli_correlation_matrix,
    product_state,
    purity,
    reduce,
    spin_expectation,
    spin_variance,
)
from spinbell.reference import cq_closed_w
from spinbell.spinspace import CoherentLabel, PhasePoint, classical_spin, phase_point_from_w

BELL = TwoQubitState(np.array([1, 0, 0, 1]) / math.sqrt(2))  # (|--> + |++>)/sqrt(2)

# independent 4x4 oracle machinery: Pauli matrices in the (-, +) ordering
SX = np.array([[0, 1], [1, 0]], dtype=complex)
SY = np.array([[0, 1j], [-1j, 0]], dtype=complex)
SZ = np.array([[-1, 0], [0, 1]], dtype=complex)
ID2 = np.eye(2, dtype=complex)


def oracle_covariance(psi, nA, nB, scale):
    """Brute-force covariance from explicit kron matrices."""
    oa = scale * (nA[0] * SX + nA[1] * SY + nA[2] * SZ)
    ob = scale * (nB[0] * SX + nB[1] * SY + nB[2] * SZ)
    v = psi.amplitudes
    joint = (v.conj() @ np.kron(oa, ob) @ v).real
    ma = (v.conj() @ np.kron(oa, ID2) @ v).real
    mb = (v.conj() @ np.kron(ID2, ob) @ v).real
    return joint - ma * mb


class TestCoherentState:
    def test_lowest_weight(self):
        assert coherent_state(0.0, 0.5).amplitudes == pytest.approx([1, 0])

    def test_equal_superposition(self):
        amps = coherent_state(1.0, 0.5).amplitudes
        assert amps == pytest.approx(np.array([1, 1]) / math.sqrt(2))

    def test_tilted_superposition(self):
        # amplitudes (1, w)/sqrt(1+|w|^2) at w = 1/sqrt(2)
        amps = coherent_state(1 / math.sqrt(2), 0.5).amplitudes
        assert amps == pytest.approx([math.sqrt(2 / 3), math.sqrt(1 / 3)])

    def test_infinity_is_highest_weight(self):
        amps = coherent_state(CoherentLabel.infinity(), 2.0).amplitudes
        assert amps == pytest.approx([0, 0, 0, 0, 1])

    def test_normalized_for_large_j_and_w(self):
        rng = np.random.default_rng(2)
        for j in (0.5, 1.0, 7.5, 50.0):
            for _ in range(5):
                w = complex(rng.normal(scale=10), rng.normal(scale=10))
                amps = coherent_state(w, j).amplitudes
                assert abs(np.linalg.norm(amps) - 1.0) < 1e-12

    def test_rejects_oversized_j(self):
        with pytest.raises(ValueError):
            coherent_state(1.0, J_MAX + 1)
        with pytest.raises(ValueError):
            coherent_state(1.0, 0.7)  # not a half-integer


class TestSpinMoments:
    @pytest.mark.parametrize(
        "w,j,expected",
        [
            (0j, 0.5, (0, 0, -0.5)),
            (1.0 + 0j, 0.5, (0.5, 0, 0)),
            (1.0 + 0j, 5.0, (5, 0, 0)),
        ],
    )
    def test_expectation(self, w, j, expected):
        assert spin_expectation(w, j) == pytest.approx(expected, abs=1e-12)

    @pytest.mark.parametrize("w,j", [(0.37 - 2.2j, 0.5), (2 + 3j, 3.0), (0j, 1.0)])
    def test_variance_equals_j(self, w, j):
        assert spin_variance(w, j) == pytest.approx(j, abs=1e-10)

    def test_classical_limit(self):
        # <J>/j is j-independent and equals the classical spin vector
        w = 0.6 + 1.1j
        target = classical_spin(phase_point_from_w(w))
        for j in (0.5, 1.0, 5.0, 20.0):
            assert spin_expectation(w, j) / j == pytest.approx(target, abs=1e-10)
            assert spin_variance(w, j) / j**2 == pytest.approx(1 / j, abs=1e-10)


class TestEvolve:
    def test_identity_at_zero(self):
        psi = product_state(0.3 + 0.5j, 2.0)
        assert evolve(psi, 0.0).amplitudes == pytest.approx(psi.amplitudes)

    def test_full_period_is_global_phase(self):
        psi = product_state(0.9, -0.4 + 0.2j)
        out = evolve(psi, 4 * math.pi)
        assert out.amplitudes == pytest.approx(-psi.amplitudes, abs=1e-12)
        for side in ("A", "B"):
            assert reduce(out, side).entries == pytest.approx(
                reduce(psi, side).entries, abs=1e-12
            )

    def test_quarter_period_phases(self):
        psi = evolve(product_state(1.0, 1.0), math.pi)
        expected = 0.5 * np.exp(1j * math.pi / 4 * np.array([-1, 1, 1, -1]))
        assert psi.amplitudes == pytest.approx(expected)

    def test_unitarity_on_grid(self):
        psi = product_state(1.3 - 0.8j, 0.45)
        for tau in np.linspace(0, 8 * math.pi, 40):
            assert abs(np.linalg.norm(evolve(psi, tau).amplitudes) - 1) < 1e-13


class TestReduceAndPurity:
    def test_product_state_reduces_pure(self):
        psi = product_state(0.7 + 0.1j, -1.4)
        for side in ("A", "B"):
            assert purity(reduce(psi, side)) == pytest.approx(1.0, abs=1e-12)

    def test_bell_state_reduces_maximally_mixed(self):
        for side in ("A", "B"):
            assert reduce(BELL, side).entries == pytest.approx(np.eye(2) / 2, abs=1e-15)

    def test_half_purity_at_quarter_period(self):
        psi = evolve(product_state(1.0, 1.0), math.pi)
        assert purity(reduce(psi, "A")) == pytest.approx(0.5, abs=1e-12)

    def test_purity_values(self):
        assert purity(np.diag([0.75, 0.25])) == pytest.approx(0.625)
        assert purity(np.eye(2) / 2) == pytest.approx(0.5)


class TestCqNumeric:
    def test_zero_at_start(self):
        assert cq_numeric(0.2 + 0.1j, 5.0, 0.0) == pytest.approx(0.0, abs=1e-14)

    def test_matches_direct_substitution(self):
        expected = 2 / 1.5**4  # = 0.395061...
        assert cq_numeric(1 / math.sqrt(2), 1 / math.sqrt(2), math.pi) == pytest.approx(
            expected, abs=1e-12
        )

    def test_polar_state_never_entangles(self):
        inf = CoherentLabel.infinity()
        for tau in (0.5, math.pi, 11.0):
            assert cq_numeric(inf, 0.7 + 0.2j, tau) == pytest.approx(0.0, abs=1e-13)

    def test_agrees_with_closed_form(self):
        rng = np.random.default_rng(4)
        for _ in range(20):
            wa = complex(rng.normal(), rng.normal())
            wb = complex(rng.normal(), rng.normal())
            for tau in rng.uniform(0, 6 * math.pi, 25):
                assert cq_numeric(wa, wb, tau) == pytest.approx(
                    cq_closed_w(wa, wb, tau), abs=1e-12
                )

    def test_swap_symmetry_and_periodicity(self):
        wa, wb = 1.2 - 0.3j, 0.1 + 0.8j
        for tau in np.linspace(0, 4 * math.pi, 30):
            assert cq_numeric(wa, wb, tau) == pytest.approx(cq_numeric(wb, wa, tau), abs=1e-12)
            assert cq_numeric(wa, wb, tau) == pytest.approx(
                cq_numeric(wa, wb, tau + 4 * math.pi), abs=1e-12
            )
        for n in range(4):
            assert cq_numeric(wa, wb, 2 * math.pi * n) == pytest.approx(0.0, abs=1e-12)


class TestCorrelationMatrix:
    def test_product_up_state(self):
        psi = product_state(CoherentLabel.infinity(), CoherentLabel.infinity())
        t = pauli_correlation_matrix(psi).entries
        expected = np.zeros((3, 3))
        expected[2, 2] = 1.0
        assert t == pytest.approx(expected, abs=1e-14)

    def test_bell_state(self):
        t = pauli_correlation_matrix(BELL).entries
        assert t == pytest.approx(np.diag([1.0, -1.0, 1.0]), abs=1e-14)

    def test_initial_x_polarized(self):
        t = pauli_correlation_matrix(product_state(1.0, 1.0)).entries
        assert t[0, 0] == pytest.approx(1.0)
        assert t[1, 1] == pytest.approx(0.0, abs=1e-15)
        assert t[2, 2] == pytest.approx(0.0, abs=1e-15)

    def test_bilinearity_against_oracle(self):
        rng = np.random.default_rng(17)
        psi = evolve(product_state(0.8 + 0.5j, 1.1 - 0.6j), 2.1)
        t = pauli_correlation_matrix(psi).entries
        for _ in range(20):
            na = rng.normal(size=3)
            na /= np.linalg.norm(na)
            nb = rng.normal(size=3)
            nb /= np.linalg.norm(nb)
            oa = na[0] * SX + na[1] * SY + na[2] * SZ
            ob = nb[0] * SX + nb[1] * SY + nb[2] * SZ
            oracle = (psi.amplitudes.conj() @ np.kron(oa, ob) @ psi.amplitudes).real
            assert na @ t @ nb == pytest.approx(oracle, abs=1e-13)


class TestCovariance:
    def test_separable_state_uncorrelated(self):
        psi = product_state(0.4 + 0.3j, 2.0)
        rng = np.random.default_rng(23)
        for _ in range(10):
            na, nb = rng.normal(size=(2, 3))
            assert correlation_function_q(psi, na, nb) == pytest.approx(0.0, abs=1e-13)

    @pytest.mark.parametrize("tau", [0.5, 1.0, math.pi, 5.0])
    def test_oracle_confirms_spin_half_convention(self, tau):
        # the stated covariances sin^2(tau/2)/4 and sin(tau/2)/4 belong to the
        # n.sigma/2 normalization; n.sigma gives exactly four times as much
        psi = evolve(product_state(1.0, 1.0), tau)
        ex, ey, ez = np.eye(3)
        u = correlation_function_q(psi, ex, ex)
        assert u == pytest.approx(oracle_covariance(psi, ex, ex, 0.5), abs=1e-14)
        assert u == pytest.approx(math.sin(tau / 2) ** 2 / 4, abs=1e-12)
        v = correlation_function_q(psi, ey, ez)
        assert v == pytest.approx(oracle_covariance(psi, ey, ez, 0.5), abs=1e-14)
        assert v == pytest.approx(math.sin(tau / 2) / 4, abs=1e-12)
        assert correlation_function_q(psi, ez, ey) == pytest.approx(v, abs=1e-12)
        pauli = correlation_function_q(psi, ex, ex, SpinConvention.PAULI)
        assert pauli == pytest.approx(4 * u, abs=1e-12)

    def test_remaining_entries_vanish(self):
        psi = evolve(product_state(1.0, 1.0), 1.3)
        ex, ey, ez = np.eye(3)
        for na, nb in [(ey, ey), (ez, ez), (ex, ey), (ex, ez), (ey, ex), (ez, ex)]:
            assert correlation_function_q(psi, na, nb) == pytest.approx(0.0, abs=1e-14)


class TestHusimi:
    def test_pure_coherent_state(self):
        x0 = PhasePoint(0.8, 0.3)
        psi = coherent_state(1.2 - 0.4j, 0.5)  # any single-qubit pure state works
        rho = np.outer(psi.amplitudes, psi.amplitudes.conj())
        x_star = phase_point_from_w(1.2 - 0.4j)
        # peak value 2/(4pi) at the state's own phase point
        assert husimi_reduced(rho, x_star) == pytest.approx(1 / (2 * math.pi), abs=1e-12)
        # general point: (1 + n(x).n(x0))/(4pi)
        f = classical_spin(x0) @ classical_spin(x_star)
        assert husimi_reduced(rho, x0) == pytest.approx((1 + f) / (4 * math.pi), abs=1e-12)

    def test_maximally_mixed_is_flat(self):
        rho = np.eye(2) / 2
        for q, p in [(0.0, 0.0), (2.2, 0.9), (4.0, -0.99)]:
            assert husimi_reduced(rho, PhasePoint(q, p)) == pytest.approx(
                1 / (4 * math.pi), abs=1e-14
            )

    def test_normalization_by_quadrature(self):
        rho = reduce(evolve(product_state(0.8, 1.3 + 0.2j), 1.9), "A")
        qs = np.arange(32) * 2 * math.pi / 32
        ps, wps = np.polynomial.legendre.leggauss(32)
        total = sum(
            (2 * math.pi / 32) * wp * husimi_reduced(rho, PhasePoint(q, p))
            for q in qs
            for p, wp in zip(ps, wps)
        )
        assert total == pytest.approx(1.0, abs=1e-8)

    @pytest.mark.parametrize("n", range(9))
    def test_stroboscopic_interference_factor(self, n):
        tau = n * math.pi / 2
        rho = reduce(evolve(product_state(1.0, 1.0), tau), "A")
        gamma = math.cos(n * math.pi / 4)
        for q, p in [(0.0, 0.0), (1.1, 0.4), (3.0, -0.7)]:
            expected = (1 + gamma * math.sqrt(1 - p * p) * math.cos(q)) / (4 * math.pi)
            assert husimi_reduced(rho, PhasePoint(q, p)) == pytest.approx(expected, abs=1e-12)


def test_completeness_integral_trend():
    errs = []
    for radius in (50.0, 200.0):
        m = coherent_completeness(radius)
        assert abs(m[0, 1]) < 1e-14 and abs(m[1, 0]) < 1e-14  # angular symmetry
        errs.append(float(np.max(np.abs(m - np.eye(2)))))
    assert errs[0] < 2e-2 and errs[1] < 2e-2
    assert errs[1] < errs[0]  # the 1/|w|^2 tail shrinks with the cutoff radius
