"""Bell-test layer: the CHSH combination, its bound for bounded observables,
and maximization over measurement settings.

Both engines hand a 3x3 correlation matrix T to this module (quantum Pauli
expectations or classical phase-space expectations); nothing here knows which
theory produced it.  Because every joint expectation is the bilinear form
a^T T b in unit measurement directions, the global maximum is available in
closed form from the two largest singular values, and a derivative-free
multistart optimizer provides the independent cross-check.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import minimize

from .spinspace import Direction, wrap_angle

TSIRELSON = 2.0 * math.sqrt(2.0)


class DegenerateNormalizationError(ValueError):
    """The CHSH series never exceeds 2, so the violation quantifier is undefined."""


@dataclass(frozen=True)
class MeasurementSetting:
    """The measurement directions of a CHSH run as polar/azimuth angles.

    The six free angles follow the convention that Alice's first direction is
    pinned to z; ``theta_a``/``phi_a`` default to that but are kept explicit
    so that a frame-free argmax (as returned by the closed-form maximizer)
    can be represented too.
    """

    theta_a_prime: float
    theta_b: float
    theta_b_prime: float
    phi_a_prime: float
    phi_b: float
    phi_b_prime: float
    theta_a: float = 0.0
    phi_a: float = 0.0

    def __post_init__(self):
        for name in (
            "theta_a_prime", "theta_b", "theta_b_prime",
            "phi_a_prime", "phi_b", "phi_b_prime", "theta_a", "phi_a",
        ):
            val = float(getattr(self, name))
            if not math.isfinite(val):
                raise ValueError(f"{name} must be finite")
            object.__setattr__(self, name, wrap_angle(val))

    def vectors(self):
        """Unit vectors (a, a', b, b')."""
        return (
            Direction(self.theta_a, self.phi_a).unit_vector(),
            Direction(self.theta_a_prime, self.phi_a_prime).unit_vector(),
            Direction(self.theta_b, self.phi_b).unit_vector(),
            Direction(self.theta_b_prime, self.phi_b_prime).unit_vector(),
        )


@dataclass(frozen=True)
class ObservableBounds:
    """Spectrum bounds of one observable."""

    o_min: float
    o_max: float

    def __post_init__(self):
        if self.o_min > self.o_max:
            raise ValueError("o_min must not exceed o_max")

    @property
    def bar(self) -> float:
        return max(abs(self.o_min), abs(self.o_max))


@dataclass(frozen=True)
class BmaxResult:
    """Maximized CHSH value, the realizing setting, and optimizer diagnostics."""

    value: float
    setting: MeasurementSetting
    method: str
    landscape_ok: bool = True
    top_two_gap: float = 0.0


def _as_matrix(t) -> np.ndarray:
    m = np.asarray(getattr(t, "entries", t), dtype=float)
    if m.shape != (3, 3):
        raise ValueError("correlation matrix must be 3x3")
    return m


def chsh_value(t, setting: MeasurementSetting) -> float:
    """|a.T(b + b') + a'.T(b - b')| for the given setting (a defaults to z)."""
    m = _as_matrix(t)
    a, ap, b, bp = setting.vectors()
    return float(abs(a @ m @ (b + bp) + ap @ m @ (b - bp)))


def chsh_classical_bound(
    bounds_a: ObservableBounds,
    bounds_a_prime: ObservableBounds,
    bounds_b: ObservableBounds,
    bounds_b_prime: ObservableBounds,
) -> float:
    """Local-hidden-variable ceiling 2 max(abar, abar') max(bbar, bbar')."""
    return (
        2.0
        * max(bounds_a.bar, bounds_a_prime.bar)
        * max(bounds_b.bar, bounds_b_prime.bar)
    )


def _direction_angles(v: np.ndarray):
    n = np.linalg.norm(v)
    if n == 0.0:
        return 0.0, 0.0
    v = v / n
    return math.acos(min(1.0, max(-1.0, v[2]))), wrap_angle(math.atan2(v[1], v[0]))


def _setting_from_vectors(a, ap, b, bp) -> MeasurementSetting:
    ta, fa = _direction_angles(a)
    tap, fap = _direction_angles(ap)
    tb, fb = _direction_angles(b)
    tbp, fbp = _direction_angles(bp)
    return MeasurementSetting(
        theta_a_prime=tap, theta_b=tb, theta_b_prime=tbp,
        phi_a_prime=fap, phi_b=fb, phi_b_prime=fbp,
        theta_a=ta, phi_a=fa,
    )


def bmax_closed_form(t) -> BmaxResult:
    """Global CHSH maximum 2 sqrt(s1^2 + s2^2) from the two top singular values.

    Writing b + b' = 2 cos(x) c and b - b' = 2 sin(x) c' with orthonormal
    (c, c'), the objective is 2 cos(x) a.Tc + 2 sin(x) a'.Tc', maximized by
    aligning (a, c) and (a', c') with the top two singular pairs and
    tan(x) = s2/s1.  The reconstructed argmax therefore lives in the frame of
    the singular vectors; the optimizer below checks it independently.
    """
    m = _as_matrix(t)
    u, s, vt = np.linalg.svd(m)
    value = 2.0 * math.hypot(s[0], s[1])
    x = math.atan2(s[1], s[0])
    b = math.cos(x) * vt[0] + math.sin(x) * vt[1]
    bp = math.cos(x) * vt[0] - math.sin(x) * vt[1]
    setting = _setting_from_vectors(u[:, 0], u[:, 1], b, bp)
    return BmaxResult(value=value, setting=setting, method="closed_form")


def _unit_from(theta: float, phi: float) -> np.ndarray:
    st = math.sin(theta)
    return np.array([st * math.cos(phi), st * math.sin(phi), math.cos(theta)])


_PRESET_STARTS = (
    (math.pi / 2, 0.0, math.pi / 2, math.pi / 2),
    (math.pi / 4, 0.0, 3 * math.pi / 4, 0.0),
    (math.pi / 2, math.pi / 4, math.pi / 2, 7 * math.pi / 4),
    (0.0, 0.0, math.pi / 2, 0.0),
)


def bmax_optimize(
    t,
    seed: int,
    restarts: int = 16,
    pin_a_to_z: bool = False,
) -> BmaxResult:
    """Maximize the CHSH value by seeded multistart Nelder-Mead.

    The search runs over the four angles of (b, b'); for given (b, b') the
    optimal a and a' align with T(b+b') and T(b-b') exactly, so they are
    eliminated analytically rather than searched.  By default the a-side is
    free, which makes the result comparable to `bmax_closed_form` for any
    matrix; ``pin_a_to_z`` instead holds a = z (the frame convention in which
    settings are usually quoted).  For the states this package studies both
    variants agree; on a generic matrix the pinned maximum can be strictly
    smaller.

    Deterministic for fixed (t, seed, restarts).  If the two best restarts
    disagree by more than 1e-4 the landscape is flagged via
    ``landscape_ok=False`` instead of silently returning the larger value.
    """
    if restarts < 8:
        raise ValueError("restarts must be at least 8")
    m = _as_matrix(t)
    z = np.array([0.0, 0.0, 1.0])

    def objective(x):
        b = _unit_from(x[0], x[1])
        bp = _unit_from(x[2], x[3])
        u = m @ (b + bp)
        v = m @ (b - bp)
        first = abs(u @ z) if pin_a_to_z else np.linalg.norm(u)
        return -(first + np.linalg.norm(v))

    rng = np.random.default_rng(seed)
    starts = [np.array(p) for p in _PRESET_STARTS[: min(len(_PRESET_STARTS), restarts)]]
    while len(starts) < restarts:
        ct = rng.uniform(-1.0, 1.0, 2)
        ph = rng.uniform(0.0, 2.0 * math.pi, 2)
        starts.append(np.array([math.acos(ct[0]), ph[0], math.acos(ct[1]), ph[1]]))

    best_val, best_x = -np.inf, starts[0]
    values = []
    for x0 in starts:
        res = minimize(
            objective, x0, method="Nelder-Mead",
            options=dict(xatol=1e-8, fatol=1e-13, maxiter=2500, maxfev=5000),
        )
        values.append(-res.fun)
        if -res.fun > best_val:
            best_val, best_x = -res.fun, res.x

    values.sort(reverse=True)
    gap = values[0] - values[1]
    b = _unit_from(best_x[0], best_x[1])
    bp = _unit_from(best_x[2], best_x[3])
    u = m @ (b + bp)
    v = m @ (b - bp)
    nv = np.linalg.norm(v)
    ap = v / nv if nv > 0 else z
    if pin_a_to_z:
        a = z
        if (u @ z) < 0:
            ap = -ap
    else:
        nu = np.linalg.norm(u)
        a = u / nu if nu > 0 else z
    return BmaxResult(
        value=float(best_val),
        setting=_setting_from_vectors(a, ap, b, bp),
        method="optimizer",
        landscape_ok=bool(gap <= 1e-4),
        top_two_gap=float(gap),
    )


def violation_quantifier(bmax_series) -> np.ndarray:
    """Normalize a CHSH-maximum series to (B - 2)/(max B - 2).

    Raises DegenerateNormalizationError when the series never rises above
    2 + 1e-9 (a local model: there is no violation to normalize by).
    """
    series = np.asarray(bmax_series, dtype=float)
    if series.size == 0:
        raise ValueError("series must be nonempty")
    peak = float(np.max(series))
    if peak <= 2.0 + 1e-9:
        raise DegenerateNormalizationError(
            f"max CHSH value {peak} never exceeds 2; violation quantifier undefined"
        )
    return (series - 2.0) / (peak - 2.0)
