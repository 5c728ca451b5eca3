import math

import pytest
from hypothesis import given, settings, strategies as st

from mecpath.frenet import (FrenetState, GlobalPose, SingularityError, check_existence,
                            frenet_derivative, pose_derivative, side_sign)


def test_curvature_only_example():
    d = frenet_derivative(0.1, 0.0, 3.0, FrenetState(0.0, 0.0, 0.0))
    assert tuple(d) == pytest.approx((0.3, 3.0, 0.0))


def test_straight_aligned():
    assert tuple(frenet_derivative(0.0, 0.0, 3.0, FrenetState(0.0, 5.0, 7.5))) == (0.0, 3.0, 0.0)


def test_lateral_speed():
    assert frenet_derivative(0.0, 0.0, 3.0, FrenetState(math.pi / 6, 0, 0)).z == pytest.approx(1.5)


@settings(max_examples=100, deadline=None)
@given(st.floats(-1.5, 1.5), st.floats(-10, 10))
def test_straight_path_reduction(theta, z):
    d = frenet_derivative(0.0, 0.0, 3.0, FrenetState(theta, 0.0, z))
    assert d.s_r == pytest.approx(3 * math.cos(theta))
    assert d.z == pytest.approx(3 * math.sin(theta))


@settings(max_examples=100, deadline=None)
@given(st.floats(-1.5, 1.5), st.floats(-0.2, 0.2), st.floats(-4.0, 4.0))
def test_reference_point_moves_forward(theta, kr, z):
    if check_existence(kr, z):
        assert frenet_derivative(0.0, kr, 3.0, FrenetState(theta, 0.0, z)).s_r > 0


@pytest.mark.parametrize("kr,z,expected", [(0.0, 3.0, True), (0.074, 13.6, False), (0.1, -5.0, True)])
def test_existence_examples(kr, z, expected):
    assert check_existence(kr, z, 1e-3) is expected


def test_existence_violation_raises():
    with pytest.raises(SingularityError):
        frenet_derivative(0.0, 0.074, 3.0, FrenetState(0.0, 0.0, 13.6))


@pytest.mark.parametrize("theta_o,kappa,expected", [
    (0.0, 0.0, (3.0, 0.0, 0.0)),
    (math.pi / 2, 0.0, (0.0, 3.0, 0.0)),
    (0.0, 0.1, (3.0, 0.0, 0.3)),
])
def test_pose_examples(theta_o, kappa, expected):
    assert tuple(pose_derivative(3.0, kappa, GlobalPose(0, 0, theta_o))) == pytest.approx(expected, abs=1e-12)


def test_side_sign():
    assert side_sign(0.0, 1.0, 0.0, 0.0, 0.0) == 1.0
    assert side_sign(0.0, -1.0, 0.0, 0.0, 0.0) == -1.0
    # heading north: left is west
    assert side_sign(-1.0, 0.0, 0.0, 0.0, math.pi / 2) == 1.0
