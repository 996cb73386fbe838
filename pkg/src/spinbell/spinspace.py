"""Sphere geometry shared by the quantum and classical engines.

Three equivalent ways to point at the unit sphere are used throughout:

* ``Direction(theta, phi)``   -- polar/azimuth angles of a measurement axis,
* ``PhasePoint(q, p)``        -- canonical coordinates (azimuth, cos(polar)),
* ``CoherentLabel``           -- the stereographic complex coordinate
  ``w = exp(-i q) * sqrt((1 + p) / (1 - p))`` labelling a spin coherent
  state, with the north pole (p = +1) mapped to the point at infinity.

All conversions are pure functions; values are freely shareable.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np

TWO_PI = 2.0 * math.pi


def wrap_angle(x: float) -> float:
    """Reduce an angle to the half-open interval [0, 2*pi)."""
    return float(x) % TWO_PI


def circular_distance(a: float, b: float) -> float:
    """Shortest distance between two angles on the circle."""
    d = abs(wrap_angle(a) - wrap_angle(b))
    return min(d, TWO_PI - d)


@dataclass(frozen=True)
class Direction:
    """A unit direction given by polar angle theta in [0, pi] and azimuth phi in [0, 2*pi)."""

    theta: float
    phi: float

    def __post_init__(self):
        th = float(self.theta) % TWO_PI
        ph = float(self.phi)
        if th > math.pi:
            th = TWO_PI - th
            ph += math.pi
        object.__setattr__(self, "theta", th)
        object.__setattr__(self, "phi", wrap_angle(ph))

    def unit_vector(self) -> np.ndarray:
        return direction_to_cartesian(self)


def direction_to_cartesian(d: Direction) -> np.ndarray:
    """Cartesian unit vector (sin t cos f, sin t sin f, cos t) for a direction."""
    st = math.sin(d.theta)
    return np.array([st * math.cos(d.phi), st * math.sin(d.phi), math.cos(d.theta)])


def as_unit_vector(n) -> np.ndarray:
    """Accept a Direction or a length-3 array-like; return a unit 3-vector."""
    if isinstance(n, Direction):
        return n.unit_vector()
    v = np.asarray(n, dtype=float)
    norm = np.linalg.norm(v)
    if not (norm > 0):
        raise ValueError("direction vector must be nonzero")
    return v / norm


@dataclass(frozen=True)
class PhasePoint:
    """Canonical coordinates of one classical spin: q in [0, 2*pi), p in [-1, 1]."""

    q: float
    p: float

    def __post_init__(self):
        p = float(self.p)
        if abs(p) > 1.0 + 1e-12:
            raise ValueError(f"momentum coordinate out of range: p={p}")
        object.__setattr__(self, "q", wrap_angle(self.q))
        object.__setattr__(self, "p", min(1.0, max(-1.0, p)))


@dataclass(frozen=True)
class CoherentLabel:
    """Stereographic coordinate of a spin coherent state; may be the point at infinity."""

    w: complex = 0j
    at_infinity: bool = False

    @classmethod
    def infinity(cls) -> "CoherentLabel":
        return cls(0j, at_infinity=True)

    @classmethod
    def of(cls, w) -> "CoherentLabel":
        if isinstance(w, CoherentLabel):
            return w
        return cls(complex(w))


def w_from_phase_point(x: PhasePoint) -> CoherentLabel:
    """Forward map (q, p) -> w = exp(-i q) sqrt((1+p)/(1-p)); p=+1 maps to infinity."""
    if x.p >= 1.0:
        return CoherentLabel.infinity()
    if x.p <= -1.0:
        return CoherentLabel(0j)
    r = math.sqrt((1.0 + x.p) / (1.0 - x.p))
    return CoherentLabel(r * cmath.exp(-1j * x.q))


def phase_point_from_w(w) -> PhasePoint:
    """Inverse stereographic map.

    Returns (q, p) with q = -arg(w) wrapped to [0, 2*pi) and
    p = (|w|^2 - 1)/(|w|^2 + 1).  By convention w = 0 maps to the south
    pole (0, -1) and the point at infinity to the north pole (0, +1);
    q is undefined at the poles, so a fixed q = 0 keeps round trips total.
    """
    label = CoherentLabel.of(w)
    if label.at_infinity:
        return PhasePoint(0.0, 1.0)
    z = label.w
    if z == 0:
        return PhasePoint(0.0, -1.0)
    a = abs(z)
    if a > 1e150:  # avoid overflow of |w|^2
        return PhasePoint(wrap_angle(-cmath.phase(z)), 1.0)
    r2 = a * a
    return PhasePoint(wrap_angle(-cmath.phase(z)), (r2 - 1.0) / (r2 + 1.0))


def classical_spin(x: PhasePoint) -> np.ndarray:
    """Classical spin vector (sqrt(1-p^2) cos q, sqrt(1-p^2) sin q, p); unit norm."""
    s = math.sqrt(max(0.0, 1.0 - x.p * x.p))
    return np.array([s * math.cos(x.q), s * math.sin(x.q), x.p])
