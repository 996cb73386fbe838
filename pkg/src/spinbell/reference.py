"""Closed-form results used as oracles for the numeric engines.

Small-tau care: several classical expressions are differences of O(1)
quantities that only survive at O(tau^2) or O(tau^6), so naive evaluation
loses all digits near tau = 0.  They are rewritten through the helpers

    jinc(t) = sin(t)/t
    g1(t)   = (sin(t)/t - cos(t)) / t^2        -> 1/3   at t = 0
    g2(t)   = (1 - jinc(t)^2) / t^2            -> 1/3   at t = 0
    g3(t)   = g1(t) - jinc(t)/3                -> 0     at t = 0

each of which switches to its Taylor series below |t| = 0.1:

    g1 = 1/3 - t^2/30 + t^4/840 - t^6/45360 + O(t^8)
    g2 = 1/3 - 2 t^2/45 + t^4/315 - 2 t^6/14175 + O(t^8)
    g3 = t^2/45 - t^4/630 + t^6/22680 - t^8/1496880 + O(t^10)

At the crossover both branches agree to ~1e-13 relative.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np


def _branch(t, cutoff, small_fn, big_fn):
    arr = np.atleast_1d(np.asarray(t, dtype=float))
    out = np.empty_like(arr)
    m = np.abs(arr) < cutoff
    if m.any():
        out[m] = small_fn(arr[m])
    if (~m).any():
        out[~m] = big_fn(arr[~m])
    if np.ndim(t) == 0:
        return float(out[0])
    return out.reshape(np.shape(t))


def _jinc(t):
    return np.sinc(np.asarray(t, dtype=float) / np.pi)


def _g1(t):
    return _branch(
        t, 0.1,
        lambda s: 1 / 3 + s**2 * (-1 / 30 + s**2 * (1 / 840 - s**2 / 45360)),
        lambda b: (np.sin(b) / b - np.cos(b)) / b**2,
    )


def _g2(t):
    return _branch(
        t, 0.1,
        lambda s: 1 / 3 + s**2 * (-2 / 45 + s**2 * (1 / 315 - 2 * s**2 / 14175)),
        lambda b: (1.0 - (np.sin(b) / b) ** 2) / b**2,
    )


def _g3(t):
    return _branch(
        t, 0.1,
        lambda s: s**2 * (1 / 45 + s**2 * (-1 / 630 + s**2 * (1 / 22680 - s**2 / 1496880))),
        lambda b: _g1(b) - _jinc(b) / 3.0,
    )


@dataclass(frozen=True)
class SeparabilityParams:
    """alpha = (p0A^2 + p0B^2)/2 and beta = p0A^2 p0B^2 of the two centers."""

    alpha: float
    beta: float

    def __post_init__(self):
        if not (0.0 <= self.alpha <= 1.0 and 0.0 <= self.beta <= 1.0):
            raise ValueError("alpha and beta must lie in [0, 1]")
        if self.beta > self.alpha**2 + 1e-12:  # AM-GM: pA^2 pB^2 <= alpha^2
            raise ValueError("inconsistent (alpha, beta) pair")

    @classmethod
    def from_momenta(cls, p0A: float, p0B: float) -> "SeparabilityParams":
        return cls(0.5 * (p0A**2 + p0B**2), p0A**2 * p0B**2)


def cq_closed_w(w0A: complex, w0B: complex, tau) -> float:
    """Entanglement 8|wA|^2|wB|^2 sin^2(tau/2) / ((1+|wA|^2)^2 (1+|wB|^2)^2)."""
    ra, rb = abs(w0A) ** 2, abs(w0B) ** 2
    val = 8.0 * ra * rb * np.sin(np.asarray(tau, dtype=float) / 2.0) ** 2
    val = val / ((1.0 + ra) ** 2 * (1.0 + rb) ** 2)
    return float(val) if np.ndim(tau) == 0 else val


def cq_closed_p(p0A: float, p0B: float, tau) -> float:
    """Entanglement (1/2)(1 - p0A^2)(1 - p0B^2) sin^2(tau/2)."""
    if abs(p0A) > 1 or abs(p0B) > 1:
        raise ValueError("momenta must lie in [-1, 1]")
    val = 0.5 * (1.0 - p0A**2) * (1.0 - p0B**2) * np.sin(np.asarray(tau, dtype=float) / 2.0) ** 2
    return float(val) if np.ndim(tau) == 0 else val


def ccl_closed(delta: float, p0A: float, p0B: float, tau) -> float:
    """Classical inseparability in closed form.

    Equals delta^2/(3 + delta^2) * [X + (delta^2/tau^2) Y] with
    X = (1 - alpha)(1 - jinc^2) and Y = (beta - alpha)(cos - jinc)^2, written
    here as tau^2 [(1-alpha) g2 + delta^2 (beta-alpha) g1^2] so that the
    removable singularity at tau = 0 (value 0) needs no special case.
    """
    if not 0.0 <= delta <= 1.0:
        raise ValueError("delta must lie in [0, 1]")
    if np.any(np.asarray(tau) < 0):
        raise ValueError("tau must be nonnegative")
    pars = SeparabilityParams.from_momenta(p0A, p0B)
    t = np.asarray(tau, dtype=float)
    bracket = (1.0 - pars.alpha) * _g2(t) + delta**2 * (pars.beta - pars.alpha) * np.square(_g1(t))
    val = delta**2 / (3.0 + delta**2) * t**2 * bracket
    return float(val) if np.ndim(tau) == 0 else val


def ccl_limit(delta: float, alpha: float) -> float:
    """Long-time limit delta^2 (1 - alpha)/(3 + delta^2) of the classical measure."""
    if not 0.0 <= delta <= 1.0:
        raise ValueError("delta must lie in [0, 1]")
    if not 0.0 <= alpha <= 1.0:
        raise ValueError("alpha must lie in [0, 1]")
    return delta**2 * (1.0 - alpha) / (3.0 + delta**2)


def short_time_coeffs(p0A: float, p0B: float):
    """Quadratic growth coefficients (omega_q, omega_cl) of both measures.

    For tau << 1, C(tau) = omega tau^2 with omega_q = (1 - 2 alpha + beta)/8
    and omega_cl = (3 - 4 alpha + beta)/36.  The classical coefficient is the
    one at unit shape parameter; for general delta it scales as
    delta^2/(3+delta^2) * [(1-alpha)/3 + delta^2 (beta-alpha)/9].
    """
    pars = SeparabilityParams.from_momenta(p0A, p0B)
    omega_q = (1.0 - 2.0 * pars.alpha + pars.beta) / 8.0
    omega_cl = (3.0 - 4.0 * pars.alpha + pars.beta) / 36.0
    return omega_q, omega_cl


def gamma_factors(n: int, delta: float):
    """Phase-sensitivity factors of the two marginals at stroboscopic times.

    At tau_n = n pi/2 (centers on the equator), the marginal keeps an
    oscillatory term with amplitude Gamma_q(n) = cos(n pi/4) quantum side and
    Gamma_cl(n) = delta sin(n pi/2)/(n pi/2) classical side; n = 0 gives the
    limits (1, delta).  The quantum factor revives forever, the classical one
    dies off like 1/n.
    """
    if n < 0 or int(n) != n:
        raise ValueError("n must be a nonnegative integer")
    gamma_q = float(np.cos(n * np.pi / 4.0))
    gamma_cl = float(delta * np.sinc(n / 2.0))
    return gamma_q, gamma_cl


class CorrUV(NamedTuple):
    u_q: float
    v_q: float
    u_cl: float
    v_cl: float


def corr_uv_closed(tau, delta: float) -> CorrUV:
    """The four covariance entries for both engines at equatorial centers (w0 = 1).

    The covariance matrix has u on (x,x), v on (y,z) and (z,y), zeros
    elsewhere.  Quantum (spin-1/2 normalization): u_q = sin^2(tau/2)/4,
    v_q = sin(tau/2)/4.  Classical: u_cl = delta^2 (g1^2 - jinc^2/9) =
    delta^2 g3 (g1 + jinc/3) and v_cl = (delta/3) tau g1, both 0 at tau = 0.
    """
    if np.any(np.asarray(tau) < 0):
        raise ValueError("tau must be nonnegative")
    t = np.asarray(tau, dtype=float)
    u_q = np.sin(t / 2.0) ** 2 / 4.0
    v_q = np.sin(t / 2.0) / 4.0
    g1 = _g1(t)
    u_cl = delta**2 * _g3(t) * (g1 + _jinc(t) / 3.0)
    v_cl = delta / 3.0 * t * g1
    if np.ndim(tau) == 0:
        return CorrUV(float(u_q), float(v_q), float(u_cl), float(v_cl))
    return CorrUV(u_q, v_q, u_cl, v_cl)
