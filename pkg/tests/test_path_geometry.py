import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from mecpath.path_geometry import (CurvatureSegment, PathDomainError, PathPoint, SegmentKind,
                                   TargetPath, builtin_path, curvature, curvature_rate,
                                   reconstruct, reconstruct_arrays)

P1 = builtin_path(1)
P2 = builtin_path(2)


@pytest.mark.parametrize("path,s,expected", [
    (P1, 5.0, 0.0),
    (P1, 12.0, 0.0),
    (P2, 10.0, 0.1 * math.sin(0.4)),
])
def test_curvature_examples(path, s, expected):
    assert curvature(path, s) == pytest.approx(expected, abs=1e-12)


def test_path2_breakpoint_values():
    assert curvature(P2, 10.0) == pytest.approx(0.038942, abs=1e-6)
    assert curvature(P2, np.nextafter(10.0, 0)) == 0.0
    assert curvature_rate(P2, 10.0) == pytest.approx(0.1 * 0.06 * math.cos(0.4), rel=1e-12)
    assert curvature_rate(P2, 10.0) == pytest.approx(0.0055260, abs=1e-6)


def test_curvature_rate_examples():
    assert curvature_rate(P1, 5.0) == 0.0
    assert curvature_rate(P1, 12.0) == pytest.approx(0.0, abs=1e-15)


def test_lengths_and_peak():
    assert P1.length == 150.0
    assert P2.length == 207.0
    s_peak = (math.pi + 1.8) / 0.15
    assert curvature(P1, s_peak) == pytest.approx(0.074)
    s = np.linspace(0, 150, 20001)
    assert max(curvature(P1, v) for v in s[::50]) <= 0.074 + 1e-12


@pytest.mark.parametrize("s", [-1e-9, -1.0, 150.0 + 1e-9, math.inf])
def test_domain_error_names_s(s):
    with pytest.raises(PathDomainError) as info:
        curvature(P1, s)
    assert info.value.s == s
    assert repr(s) in str(info.value)
    with pytest.raises(PathDomainError):
        curvature_rate(P1, s)


@settings(max_examples=200, deadline=None)
@given(st.floats(min_value=12.5, max_value=149.5))
def test_rate_matches_finite_difference_path1(s):
    h = 1e-5
    fd = (curvature(P1, s + h) - curvature(P1, s - h)) / (2 * h)
    assert curvature_rate(P1, s) == pytest.approx(fd, abs=1e-8)


@settings(max_examples=200, deadline=None)
@given(st.floats(min_value=10.5, max_value=206.5))
def test_rate_matches_finite_difference_path2(s):
    h = 1e-5
    fd = (curvature(P2, s + h) - curvature(P2, s - h)) / (2 * h)
    assert curvature_rate(P2, s) == pytest.approx(fd, abs=1e-8)


def test_reconstruct_straight_start():
    pts = reconstruct(P1, 0.01)
    assert len(pts) == 15001
    head = [p for p in pts if p.s <= 12.0]
    assert all(p.eta_r == pytest.approx(-3.0, abs=1e-12) for p in head)
    assert all(p.xi_r == pytest.approx(p.s, abs=1e-9) for p in head)
    assert all(p.theta_r == 0.0 for p in head)


def test_path2_first_points_are_flat():
    s, xi, eta, theta = reconstruct_arrays(P2, 0.01)
    assert len(s) == 20701
    assert np.all(eta[:1001] == -3.0)


def test_path1_heading_and_shape():
    s, xi, eta, theta = reconstruct_arrays(P1, 0.01)
    # closed-form integral of 0.037 (1 - cos(0.15 s - 1.8)) over [12, 150]
    total = 0.037 * (138.0 - (math.sin(0.15 * 150 - 1.8) - math.sin(0.0)) / 0.15)
    assert theta[-1] == pytest.approx(total, abs=1e-9)
    width, height = np.ptp(xi), np.ptp(eta)
    assert 40 < width < 60 and 40 < height < 60
    # the loop comes back towards its start rather than running away
    assert math.hypot(xi[-1] - xi[0], eta[-1] - eta[0]) < 0.5 * max(width, height)


def test_reconstruct_circle_against_closed_form():
    r = 10.0
    path = TargetPath((CurvatureSegment(0.0, math.pi * r, SegmentKind.CONSTANT, 1 / r),),
                      PathPoint(0.0, 0.0, 0.0, 0.0))
    s, xi, eta, theta = reconstruct_arrays(path, 0.05)
    assert s[-1] == path.length
    np.testing.assert_allclose(xi, r * np.sin(s / r), atol=1e-9)
    np.testing.assert_allclose(eta, r * (1 - np.cos(s / r)), atol=1e-9)
    np.testing.assert_allclose(theta, s / r, atol=1e-12)


def test_reconstruct_lands_on_length_when_ds_does_not_divide():
    s, *_ = reconstruct_arrays(P1, 0.7)
    assert s[-1] == 150.0
    assert np.all(np.diff(s) > 0)


def test_segments_must_tile():
    a = CurvatureSegment(0.0, 5.0)
    with pytest.raises(ValueError, match="tile"):
        TargetPath((a, CurvatureSegment(6.0, 8.0)))
    with pytest.raises(ValueError, match="s=0"):
        TargetPath((CurvatureSegment(1.0, 2.0),))
    with pytest.raises(ValueError):
        CurvatureSegment(3.0, 3.0)
    with pytest.raises(ValueError):
        TargetPath(())


def test_builtin_lookup():
    assert builtin_path("path2").length == 207.0
    assert builtin_path(" 1 ").name == "path1"
    with pytest.raises(ValueError):
        builtin_path(3)
    with pytest.raises(ValueError):
        builtin_path("square")


def test_segment_kind_parse():
    assert SegmentKind.parse("Raised-Cosine") is SegmentKind.RAISED_COSINE
    with pytest.raises(ValueError, match="unknown segment kind"):
        SegmentKind.parse("spline")
