import math

import numpy as np
import pytest

from spinbell.spinspace import (
    CoherentLabel,
    Direction,
    PhasePoint,
    circular_distance,
    classical_spin,
    direction_to_cartesian,
    phase_point_from_w,
    w_from_phase_point,
)


@pytest.mark.parametrize(
    "theta,phi,expected",
    [
        (0.0, 1.234, (0, 0, 1)),
        (math.pi / 2, 0.0, (1, 0, 0)),
        (math.pi / 2, math.pi / 2, (0, 1, 0)),
    ],
)
def test_direction_to_cartesian_axes(theta, phi, expected):
    assert direction_to_cartesian(Direction(theta, phi)) == pytest.approx(expected, abs=1e-15)


def test_direction_wraps_out_of_range_angles():
    d = Direction(3 * math.pi / 2, 0.0)  # same ray as theta=pi/2, phi=pi
    assert d.theta == pytest.approx(math.pi / 2)
    assert d.phi == pytest.approx(math.pi)
    assert np.linalg.norm(direction_to_cartesian(d)) == pytest.approx(1.0, abs=1e-14)


def test_direction_unit_norm_random():
    rng = np.random.default_rng(11)
    for _ in range(300):
        d = Direction(rng.uniform(-10, 10), rng.uniform(-10, 10))
        assert abs(np.linalg.norm(direction_to_cartesian(d)) - 1.0) < 1e-14


@pytest.mark.parametrize(
    "w,q,p",
    [
        (1.0 + 0j, 0.0, 0.0),
        (0j, 0.0, -1.0),
        (1 / math.sqrt(2) + 0j, 0.0, -1 / 3),  # (|w|^2-1)/(|w|^2+1) = -1/3
    ],
)
def test_phase_point_from_w(w, q, p):
    x = phase_point_from_w(w)
    assert circular_distance(x.q, q) < 1e-14
    assert x.p == pytest.approx(p, abs=1e-14)
    if abs(p) < 1:  # cross-check with the forward map
        back = w_from_phase_point(x)
        assert back.w == pytest.approx(w, abs=1e-14)


def test_infinity_maps_to_north_pole():
    assert phase_point_from_w(CoherentLabel.infinity()).p == 1.0
    assert w_from_phase_point(PhasePoint(0.3, 1.0)).at_infinity


def test_round_trip_phase_point():
    rng = np.random.default_rng(5)
    for _ in range(500):
        x = PhasePoint(rng.uniform(0, 2 * math.pi), rng.uniform(-0.9999, 0.9999))
        y = phase_point_from_w(w_from_phase_point(x))
        assert circular_distance(x.q, y.q) < 1e-12
        assert abs(x.p - y.p) < 1e-12


@pytest.mark.parametrize(
    "q,p,expected",
    [
        (0.0, 0.0, (1, 0, 0)),
        (1.7, 1.0, (0, 0, 1)),
        (math.pi / 2, 0.0, (0, 1, 0)),
    ],
)
def test_classical_spin(q, p, expected):
    assert classical_spin(PhasePoint(q, p)) == pytest.approx(expected, abs=1e-15)


def test_classical_spin_unit_norm():
    rng = np.random.default_rng(3)
    for _ in range(500):
        x = PhasePoint(rng.uniform(0, 2 * math.pi), rng.uniform(-1, 1))
        assert abs(np.linalg.norm(classical_spin(x)) - 1.0) < 1e-14


def test_stereographic_consistency():
    # classical spin at the label of n(theta, phi) is n(theta, phi) itself
    rng = np.random.default_rng(8)
    for _ in range(300):
        theta = rng.uniform(0.01, math.pi - 0.01)
        phi = rng.uniform(0, 2 * math.pi)
        w = complex(np.exp(-1j * phi)) / math.tan(theta / 2)
        lhs = classical_spin(phase_point_from_w(w))
        rhs = direction_to_cartesian(Direction(theta, phi))
        assert np.max(np.abs(lhs - rhs)) < 1e-12


def test_phase_point_validation():
    with pytest.raises(ValueError):
        PhasePoint(0.0, 1.5)
    assert PhasePoint(2 * math.pi + 0.25, 0.0).q == pytest.approx(0.25)
