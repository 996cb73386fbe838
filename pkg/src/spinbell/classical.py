"""Classical hidden-variable engine: Liouville dynamics of a spin-pair density.

The model propagates an initial product density

    rho0(x) = pd(x_A; x0A) * pd(x_B; x0B),
    pd(x; x0) = (1 + delta * f(x, x0)) / (4 pi),

along the exact Hamiltonian flow of H = p_A p_B (q_A gains tau * p_B, q_B
gains tau * p_A, momenta frozen).  The trajectories are the deterministic
hidden variables; the initial density is the epistemic state standing in for
the hidden-variable measure, and the shape parameter delta acts as one more
hidden variable controlling how much correlation the model can produce.
delta = 1 reproduces the Husimi function of a coherent state, delta = sqrt(3)
the (sign-indefinite) Wigner function.

All statistics are deterministic quadrature: a periodic trapezoidal rule in
each angle (exact here, the integrands are low-degree trigonometric
polynomials in q) and Gauss-Legendre in each momentum.  The flow shear is
never wrapped; densities are evaluated through cos(q - ...), which is exactly
2pi-periodic, so no explicit reduction of q is needed.  Every 4D integral the
measures require factorizes over the pairwise couplings (q_A, p_B) and
(q_B, p_A) into 2D tensor contractions, which is what makes tau sweeps cheap;
`integrate_phase_space` keeps the generic (slow) 4D rule for cross-checks.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable

import numpy as np

from .spinspace import PhasePoint, as_unit_vector, classical_spin

FOUR_PI = 4.0 * math.pi
DEFAULT_GATE_TOL = 1e-8


class QuadratureConvergenceError(RuntimeError):
    """Doubling the quadrature moved the result by more than the tolerance."""


@dataclass(frozen=True)
class DistributionSpec:
    """Epistemic state: shape parameter delta plus the two distribution centers.

    delta must lie in [0, 1] for probability semantics.  Larger values (the
    Wigner case delta = sqrt(3)) are allowed only through `quasi_density`,
    which marks the object as potentially negative.
    """

    delta: float
    x0A: PhasePoint
    x0B: PhasePoint
    quasi: bool = False

    def __post_init__(self):
        if self.delta < 0:
            raise ValueError("delta must be nonnegative")
        if self.delta > 1.0 and not self.quasi:
            raise ValueError(
                f"delta = {self.delta} > 1 is not a probability density; "
                "use DistributionSpec.quasi_density if you mean it"
            )

    @classmethod
    def quasi_density(cls, delta: float, x0A: PhasePoint, x0B: PhasePoint) -> "DistributionSpec":
        return cls(delta, x0A, x0B, quasi=True)

    @property
    def is_quasi(self) -> bool:
        return self.delta > 1.0


@dataclass(frozen=True)
class QuadratureSpec:
    """Tensor-product rule sizes: n_q uniform angle nodes, n_p Gauss-Legendre nodes."""

    n_q: int = 64
    n_p: int = 64

    def __post_init__(self):
        if self.n_q < 8 or self.n_q % 2:
            raise ValueError("n_q must be even and >= 8")
        if self.n_p < 4:
            raise ValueError("n_p must be >= 4")

    def doubled(self) -> "QuadratureSpec":
        return QuadratureSpec(2 * self.n_q, 2 * self.n_p)


DEFAULT_QUAD = QuadratureSpec()


@lru_cache(maxsize=32)
def _q_nodes(n_q: int):
    q = np.arange(n_q) * (2.0 * math.pi / n_q)
    return q, 2.0 * math.pi / n_q


@lru_cache(maxsize=32)
def _p_nodes(n_p: int):
    return np.polynomial.legendre.leggauss(n_p)


def f_kernel(x: PhasePoint, x0: PhasePoint) -> float:
    """Overlap kernel p p0 + cos(q - q0) sqrt((1-p^2)(1-p0^2)); the dot product
    of the two classical spin vectors, so it lies in [-1, 1]."""
    return float(
        x.p * x0.p
        + math.cos(x.q - x0.q) * math.sqrt((1 - x.p**2) * (1 - x0.p**2))
    )


def _pd_vals(q, p, q0: float, p0: float, delta: float):
    """Vectorized density (1 + delta f)/4pi at angles q, momenta p (broadcastable)."""
    amp = math.sqrt(max(0.0, 1.0 - p0 * p0))
    f = p * p0 + np.cos(q - q0) * np.sqrt(np.clip(1.0 - p * p, 0.0, None)) * amp
    return (1.0 + delta * f) / FOUR_PI


def pdelta(x: PhasePoint, x0: PhasePoint, delta: float) -> float:
    """Single-spin density value (1 + delta f(x, x0))/(4 pi).

    Nonnegative everywhere iff delta <= 1; normalized to 1 over dq dp.
    """
    if delta < 0:
        raise ValueError("delta must be nonnegative")
    return float(_pd_vals(x.q, x.p, x0.q, x0.p, delta))


@dataclass(frozen=True)
class FlowMap:
    """Linear phase-space flow for the p_A p_B coupling at time tau."""

    tau: float

    def matrix(self) -> np.ndarray:
        t = self.tau
        return np.array(
            [
                [1.0, 0.0, 0.0, t],
                [0.0, 1.0, 0.0, 0.0],
                [0.0, t, 1.0, 0.0],
                [0.0, 0.0, 0.0, 1.0],
            ]
        )

    def apply(self, x4):
        return flow(x4, self.tau)

    def inverse(self) -> "FlowMap":
        return FlowMap(-self.tau)


def flow(x4, tau: float):
    """Propagate (q_A, p_A, q_B, p_B) by the shear (q_A + tau p_B, p_A, q_B + tau p_A, p_B).

    The map is affine and is NOT wrapped; densities wrap implicitly through
    their cosine dependence on the angles.  Accepts scalars or broadcastable
    arrays; returns a 4-tuple of the same shapes.
    """
    qa, pa, qb, pb = x4
    return (qa + tau * pb, pa, qb + tau * pa, pb)


def evolved_density(spec: DistributionSpec, x4, tau: float):
    """Joint density at time tau: the initial product density evaluated at flow(x, -tau)."""
    qa, pa, qb, pb = flow(x4, -tau)
    return _pd_vals(qa, pa, spec.x0A.q, spec.x0A.p, spec.delta) * _pd_vals(
        qb, pb, spec.x0B.q, spec.x0B.p, spec.delta
    )


def integrate_phase_space(
    integrand: Callable,
    quad: QuadratureSpec = DEFAULT_QUAD,
    tolerance: float | None = None,
) -> float:
    """Integrate f(q_A, p_A, q_B, p_B) over [0,2pi]^2 x [-1,1]^2.

    ``integrand`` must accept four broadcastable arrays.  The rule is the
    tensor product of the periodic trapezoidal rule in each angle and
    Gauss-Legendre in each momentum; evaluation is chunked over q_A to bound
    memory.  With ``tolerance`` set, the integral is recomputed at doubled
    resolution and a shift beyond the tolerance raises
    QuadratureConvergenceError; the refined value is returned.
    """

    def _once(spec: QuadratureSpec) -> float:
        q, wq = _q_nodes(spec.n_q)
        p, wp = _p_nodes(spec.n_p)
        wpp = wp[None, :, None, None] * wp[None, None, None, :]
        total = 0.0
        block = max(1, (1 << 21) // (spec.n_p * spec.n_q * spec.n_p))
        for start in range(0, spec.n_q, block):
            qa = q[start : start + block][:, None, None, None]
            vals = integrand(qa, p[None, :, None, None], q[None, None, :, None], p[None, None, None, :])
            vals = np.broadcast_to(vals, (qa.shape[0], spec.n_p, spec.n_q, spec.n_p))
            total += float(np.sum(vals * wpp))
        return total * wq * wq

    coarse = _once(quad)
    if tolerance is None:
        return coarse
    fine = _once(quad.doubled())
    if abs(fine - coarse) > tolerance:
        raise QuadratureConvergenceError(
            f"integral moved by {abs(fine - coarse):.3e} (> {tolerance:.1e}) "
            f"when doubling {quad}"
        )
    return fine


def _centers(spec: DistributionSpec, subsystem: str):
    if subsystem == "A":
        return spec.x0A, spec.x0B
    if subsystem == "B":
        return spec.x0B, spec.x0A
    raise ValueError(f"subsystem must be 'A' or 'B', got {subsystem!r}")


def _partner_weight(spec: DistributionSpec, other: PhasePoint, quad: QuadratureSpec):
    """Angle-integrated partner density on the momentum nodes: (1 + d p p0)/2."""
    q, wq = _q_nodes(quad.n_q)
    p, _ = _p_nodes(quad.n_p)
    return wq * np.sum(_pd_vals(q[:, None], p[None, :], other.q, other.p, spec.delta), axis=0)


def marginal_density(
    spec: DistributionSpec,
    subsystem: str,
    x,
    tau: float,
    quad: QuadratureSpec = DEFAULT_QUAD,
):
    """Marginal of the evolved joint density over the other subsystem.

    ``x`` is a PhasePoint or a pair of broadcastable (q, p) arrays.  The
    partner integrals reduce to a single Gauss-Legendre sum over the partner
    momentum, since its angle integrates out exactly.
    """
    own, other = _centers(spec, subsystem)
    if isinstance(x, PhasePoint):
        qs, ps = x.q, x.p
        scalar = True
    else:
        qs, ps = np.asarray(x[0], dtype=float), np.asarray(x[1], dtype=float)
        scalar = False
    p, wp = _p_nodes(quad.n_p)
    h = _partner_weight(spec, other, quad)
    qs = np.asarray(qs, dtype=float)
    ps = np.asarray(ps, dtype=float)
    vals = _pd_vals(qs[..., None] - tau * p, ps[..., None], own.q, own.p, spec.delta)
    out = np.sum(wp * h * vals, axis=-1)
    return float(out) if scalar else out


def _marginal_sq_integral(
    spec: DistributionSpec, subsystem: str, tau: float, quad: QuadratureSpec
) -> float:
    """Integral of the squared marginal over its own (q, p) plane.

    Uses the separable form marg(q, p) = [S0 a(p) + C(p) (Kc cos(q−q0) +
    Ks sin(q−q0))]/4pi, where Kc, Ks are the partner-momentum quadratures of
    cos(tau p), sin(tau p); this is the exact 2D contraction of the 4D rule.
    """
    own, other = _centers(spec, subsystem)
    q, wq = _q_nodes(quad.n_q)
    p, wp = _p_nodes(quad.n_p)
    h = _partner_weight(spec, other, quad)
    s0 = float(np.sum(wp * h))
    kc = float(np.sum(wp * h * np.cos(tau * p)))
    ks = float(np.sum(wp * h * np.sin(tau * p)))
    a = 1.0 + spec.delta * p * own.p
    c = spec.delta * np.sqrt(np.clip(1.0 - p * p, 0.0, None) * (1.0 - own.p**2))
    sc = np.cos(q - own.q) * kc + np.sin(q - own.q) * ks
    marg = (s0 * a[None, :] + c[None, :] * sc[:, None]) / FOUR_PI
    return float(wq * np.sum(wp[None, :] * marg * marg))


def _joint_sq_integral(spec: DistributionSpec, tau: float, quad: QuadratureSpec) -> float:
    """4D integral of the squared joint density via the pairwise 2D contractions."""
    q, wq = _q_nodes(quad.n_q)
    p, wp = _p_nodes(quad.n_p)
    ga = _pd_vals(
        q[:, None, None] - tau * p[None, None, :], p[None, :, None],
        spec.x0A.q, spec.x0A.p, spec.delta,
    )  # (n_q, p_A, p_B)
    gb = _pd_vals(
        q[:, None, None] - tau * p[None, None, :], p[None, :, None],
        spec.x0B.q, spec.x0B.p, spec.delta,
    )  # (n_q, p_B, p_A)
    ga2 = wq * np.sum(ga * ga, axis=0)  # (p_A, p_B)
    gb2 = wq * np.sum(gb * gb, axis=0)  # (p_B, p_A)
    return float(np.einsum("ab,ba,a,b->", ga2, gb2, wp, wp))


def classical_purity(
    spec: DistributionSpec,
    subsystem: str,
    tau: float,
    quad: QuadratureSpec = DEFAULT_QUAD,
) -> float:
    """Squared-density integral at time tau over its value at tau = 0.

    subsystem "A"/"B" gives the marginal purity (<= 1, the mixing signal);
    "joint" stays at 1 for every tau because the volume-preserving flow only
    permutes density values.
    """
    if subsystem == "joint":
        return _joint_sq_integral(spec, tau, quad) / _joint_sq_integral(spec, 0.0, quad)
    return _marginal_sq_integral(spec, subsystem, tau, quad) / _marginal_sq_integral(
        spec, subsystem, 0.0, quad
    )


def ccl_numeric(
    spec: DistributionSpec,
    tau: float,
    quad: QuadratureSpec = DEFAULT_QUAD,
    gate: float | None = None,
) -> float:
    """Symmetrized classical inseparability 1 - (P_A + P_B)/2 from quadrature.

    The interaction-free reference marginals are static here (no free
    Hamiltonian), so their purity is exactly 1 and drops out.  With ``gate``
    set, the value is recomputed at doubled quadrature and a drift beyond the
    gate raises QuadratureConvergenceError.
    """

    def _value(q: QuadratureSpec) -> float:
        pa = classical_purity(spec, "A", tau, q)
        pb = classical_purity(spec, "B", tau, q)
        return 1.0 - 0.5 * (pa + pb)

    coarse = _value(quad)
    if gate is None:
        return coarse
    fine = _value(quad.doubled())
    if abs(fine - coarse) > gate:
        raise QuadratureConvergenceError(
            f"inseparability moved by {abs(fine - coarse):.3e} (> {gate:.1e}) "
            f"when doubling {quad} at tau = {tau}"
        )
    return fine


def _spin_components(q: np.ndarray, p: np.ndarray) -> np.ndarray:
    """Classical spin components on the (q, p) grid; shape (3, n_q, n_p)."""
    s = np.sqrt(np.clip(1.0 - p * p, 0.0, None))
    return np.array(
        [
            s[None, :] * np.cos(q)[:, None],
            s[None, :] * np.sin(q)[:, None],
            np.broadcast_to(p[None, :], (q.size, p.size)).copy(),
        ]
    )


def _corr_engine(spec: DistributionSpec, tau: float, quad: QuadratureSpec):
    """Correlation matrix T_ij = <J_i(x_A) J_j(x_B)> and both first moments.

    The evolved density couples each angle only to the partner momentum, so
    every required 4D integral splits into products of 1D momentum sums once
    the angle quadratures are expressed through cos(tau p), sin(tau p)
    profiles.  All sums remain plain quadrature sums.
    """
    q, wq = _q_nodes(quad.n_q)
    p, wp = _p_nodes(quad.n_p)
    mu = np.stack([np.ones_like(p), np.cos(tau * p), np.sin(tau * p)])  # partner weights
    spin = _spin_components(q, p)

    profiles = {}
    angle_integrated = {}
    for label, own in (("A", spec.x0A), ("B", spec.x0B)):
        a = 1.0 + spec.delta * p * own.p
        c = spec.delta * np.sqrt(np.clip(1.0 - p * p, 0.0, None) * (1.0 - own.p**2))
        q0 = wq * np.sum(spin, axis=1)
        qc = wq * np.sum(np.cos(q - own.q)[None, :, None] * spin, axis=1)
        qs = wq * np.sum(np.sin(q - own.q)[None, :, None] * spin, axis=1)
        profiles[label] = np.stack(
            [a[None, :] * q0, c[None, :] * qc, c[None, :] * qs]
        ) / FOUR_PI  # (profile m, component i, node)
        angle_integrated[label] = _partner_weight(spec, own, quad)

    la = np.einsum("a,mia,na->imn", wp, profiles["A"], mu)
    lb = np.einsum("b,njb,mb->jnm", wp, profiles["B"], mu)
    t = np.einsum("imn,jnm->ij", la, lb)

    m_a = np.einsum(
        "a,mia,m->i", wp, profiles["A"],
        np.einsum("b,mb,b->m", wp, mu, angle_integrated["B"]),
    )
    m_b = np.einsum(
        "b,mjb,m->j", wp, profiles["B"],
        np.einsum("a,ma,a->m", wp, mu, angle_integrated["A"]),
    )
    return t, m_a, m_b


@dataclass(frozen=True)
class ClassicalCorrelationMatrix:
    """3x3 matrix of joint classical spin expectations from the evolved density."""

    entries: np.ndarray

    def __post_init__(self):
        t = np.asarray(self.entries, dtype=float)
        object.__setattr__(self, "entries", t)
        if t.shape != (3, 3):
            raise ValueError("correlation matrix must be 3x3")
        if np.max(np.abs(t)) > 1.0 + 1e-6:
            raise ValueError("classical correlation entries must lie in [-1, 1]")


def classical_correlation_matrix(
    spec: DistributionSpec,
    tau: float,
    quad: QuadratureSpec = DEFAULT_QUAD,
    gate: float | None = None,
) -> ClassicalCorrelationMatrix:
    """T_ij = int d^4x rho(x, tau) J_i(x_A) J_j(x_B); a^T T b gives any <ab>."""
    t, _, _ = _corr_engine(spec, tau, quad)
    if gate is not None:
        t_fine, _, _ = _corr_engine(spec, tau, quad.doubled())
        drift = float(np.max(np.abs(t_fine - t)))
        if drift > gate:
            raise QuadratureConvergenceError(
                f"correlation matrix moved by {drift:.3e} (> {gate:.1e}) "
                f"when doubling {quad} at tau = {tau}"
            )
        t = t_fine
    return ClassicalCorrelationMatrix(t)


def classical_first_moments(
    spec: DistributionSpec, tau: float, quad: QuadratureSpec = DEFAULT_QUAD
):
    """Single-spin expectations (<J(x_A)>, <J(x_B)>) under the evolved density."""
    _, m_a, m_b = _corr_engine(spec, tau, quad)
    return m_a, m_b


def correlation_function_cl(
    spec: DistributionSpec,
    tau: float,
    nA,
    nB,
    quad: QuadratureSpec = DEFAULT_QUAD,
) -> float:
    """Covariance <ab> - <a><b> of the projected classical spins along nA, nB."""
    va, vb = as_unit_vector(nA), as_unit_vector(nB)
    t, m_a, m_b = _corr_engine(spec, tau, quad)
    return float(va @ t @ vb - (va @ m_a) * (vb @ m_b))


def pdelta_min_on_grid(delta: float, x0: PhasePoint, n: int = 201) -> float:
    """Minimum of the single-spin density on an n x n (q, p) scan grid."""
    q = np.linspace(0.0, 2.0 * math.pi, n)
    p = np.linspace(-1.0, 1.0, n)
    vals = _pd_vals(q[:, None], p[None, :], x0.q, x0.p, delta)
    return float(np.min(vals))
