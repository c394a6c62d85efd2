"""Tests for contour families, signed distance, and level-set profiles."""

import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from deltaprime.exceptions import DomainError, GeometryError
from deltaprime.geometry import (
    Contour,
    contour_from_spec,
    distance_profiles,
    in_radius,
    make_circle,
    make_ellipse_by_perimeter,
    make_perturbed_circle,
    offset_polyline,
)

from oracles import (
    ELLIPSE_AREA_ASPECT2,
    ELLIPSE_SEMI_MAJOR,
    ellipse_perimeter_ref,
)

_TWO_PI = 2.0 * math.pi


def test_circle_measures():
    c = make_circle(2.5)
    assert c.length == pytest.approx(_TWO_PI * 2.5, rel=1e-13)
    assert c.area == pytest.approx(math.pi * 2.5**2, rel=1e-13)
    assert np.allclose(c.centroid, 0.0, atol=1e-13)
    s = np.linspace(0.0, 1.0, 17)
    assert np.allclose(c.curvature(s), 1.0 / 2.5, rtol=1e-12)
    assert in_radius(c) == 2.5


def test_circle_signed_distance():
    c = make_circle(1.0)
    pts = np.array([[0.0, 0.0], [0.5, 0.0], [0.0, 2.0], [-3.0, 4.0]])
    expected = np.array([1.0, 0.5, -1.0, -4.0])
    assert np.allclose(c.signed_distance(pts), expected, atol=1e-11)
    assert c.signed_distance(np.array([0.25, 0.0])) == pytest.approx(0.75, abs=1e-11)


def test_ellipse_by_perimeter():
    for aspect, a_ref in ELLIPSE_SEMI_MAJOR.items():
        c = make_ellipse_by_perimeter(_TWO_PI, aspect)
        assert c.length == pytest.approx(_TWO_PI, rel=1e-12)
        assert c.meta["a"] == pytest.approx(a_ref, rel=1e-12)
        assert c.meta["b"] == pytest.approx(a_ref / aspect, rel=1e-12)
        assert ellipse_perimeter_ref(c.meta["a"], c.meta["b"]) == pytest.approx(
            _TWO_PI, rel=1e-12
        )
        assert in_radius(c) == c.meta["b"]
    c2 = make_ellipse_by_perimeter(_TWO_PI, 2.0)
    assert c2.area == pytest.approx(ELLIPSE_AREA_ASPECT2, rel=1e-12)


def test_ellipse_rejects_bad_aspect():
    with pytest.raises(DomainError):
        make_ellipse_by_perimeter(_TWO_PI, 1.0)
    with pytest.raises(DomainError):
        make_ellipse_by_perimeter(_TWO_PI, 25.0)
    with pytest.raises(DomainError):
        make_ellipse_by_perimeter(-1.0, 2.0)


def test_perturbed_circle():
    for mode in (2, 3, 4):
        c = make_perturbed_circle(_TWO_PI, mode, 0.1)
        assert c.length == pytest.approx(_TWO_PI, rel=1e-12)
        rho0 = c.meta["rho0"]
        # radial graph r(theta) = rho0 (1 + eps cos(m theta))
        s = np.linspace(0.0, 1.0, 257)
        pos = c.position(s)
        r = np.linalg.norm(pos, axis=1)
        theta = np.arctan2(pos[:, 1], pos[:, 0])
        assert np.allclose(r, rho0 * (1.0 + 0.1 * np.cos(mode * theta)), rtol=1e-12)
        assert in_radius(c) == pytest.approx(rho0 * 0.9, rel=1e-6)


def test_perturbed_rejects_bad_parameters():
    with pytest.raises(DomainError):
        make_perturbed_circle(_TWO_PI, 1, 0.1)
    with pytest.raises(GeometryError):
        make_perturbed_circle(_TWO_PI, 4, 1.2)


def test_contour_from_spec():
    assert contour_from_spec({"type": "circle", "R": 2.0}).meta["R"] == 2.0
    by_len = contour_from_spec({"type": "circle", "length": _TWO_PI})
    assert by_len.meta["R"] == pytest.approx(1.0, rel=1e-15)
    e = contour_from_spec({"type": "ellipse", "length": _TWO_PI, "aspect": 2.0})
    assert e.kind == "ellipse"
    p = contour_from_spec(
        {"type": "perturbed", "length": _TWO_PI, "mode": 3, "eps": 0.1}
    )
    assert p.kind == "perturbed"
    with pytest.raises(DomainError):
        contour_from_spec({"type": "square"})
    with pytest.raises(DomainError):
        contour_from_spec({"type": "ellipse", "length": _TWO_PI})
    with pytest.raises(DomainError):
        contour_from_spec({"R": 1.0})


def test_contour_regularity_guards():
    # a figure-eight style coefficient set is rejected
    cos_c = np.array([[0.0, 0.0], [0.0, 0.0], [1.0, 0.0]])
    sin_c = np.array([[0.0, 0.0], [0.0, 1.0], [0.0, 0.0]])
    with pytest.raises(GeometryError):
        Contour(cos_c, sin_c)
    # clockwise orientation is rejected
    cos_r = np.array([[0.0, 0.0], [1.0, 0.0]])
    sin_r = np.array([[0.0, 0.0], [0.0, -1.0]])
    with pytest.raises(GeometryError):
        Contour(cos_r, sin_r)


def test_arclength_parametrization():
    c = make_ellipse_by_perimeter(_TWO_PI, 3.0)
    s = np.sort(c.equal_arclength_params(64))
    # integrate the speed between consecutive parameters: every arc
    # piece must carry the same length L/64
    nodes, weights = np.polynomial.legendre.leggauss(32)
    bounds = np.concatenate([s, [s[0] + 1.0]])
    for a, b in zip(bounds[:-1], bounds[1:]):
        mid, half = 0.5 * (a + b), 0.5 * (b - a)
        arc = half * float(np.dot(weights, c.speed(mid + half * nodes)))
        # the dense-grid arc table carries a small trapezoid bias, far
        # below any spacing the mesh generator consumes
        assert arc == pytest.approx(c.length / 64.0, rel=1e-5)
    back = c.param_at_arclength(c.length * np.arange(64) / 64.0)
    assert np.allclose(np.sort(back), s, atol=1e-10)


def test_signed_distance_lipschitz_and_projection():
    c = make_perturbed_circle(_TWO_PI, 3, 0.1)
    rng = np.random.default_rng(7)
    p = rng.uniform(-2.0, 2.0, size=(200, 2))
    q = p + rng.uniform(-0.3, 0.3, size=(200, 2))
    dp = c.signed_distance(p)
    dq = c.signed_distance(q)
    gap = np.linalg.norm(p - q, axis=1)
    assert np.all(np.abs(dp - dq) <= gap * (1.0 + 1e-9) + 1e-12)
    # boundary samples have zero distance
    s = np.linspace(0.0, 1.0, 97)
    assert np.max(np.abs(c.signed_distance(c.position(s)))) < 1e-10


def test_profile_invariants_all_families():
    contours = [
        make_circle(1.0),
        make_ellipse_by_perimeter(_TWO_PI, 1.5),
        make_perturbed_circle(_TWO_PI, 4, 0.1),
    ]
    for c in contours:
        L0 = c.length
        for side, sgn in (("inner", -1.0), ("outer", 1.0)):
            tab = distance_profiles(c, side, n=128)
            assert tab.t[0] == 0.0
            assert tab.A[0] == 0.0
            assert tab.L[0] == pytest.approx(L0, rel=1e-12)
            assert np.all(np.diff(tab.A) >= -1e-9 * L0 * L0)
            assert np.all(tab.L >= 0.0)
            # parallel-curve comparison holds at every grid point
            assert np.all(tab.L <= L0 + sgn * _TWO_PI * tab.t + 1e-9 * L0)
            assert np.all(
                tab.A <= L0 * tab.t + sgn * math.pi * tab.t**2 + 1e-9 * L0 * L0
            )
        inner = distance_profiles(c, "inner", n=128)
        # the inner sublevel sets exhaust the enclosed area
        assert inner.A[-1] <= c.area * (1.0 + 1e-9)


def test_profiles_circle_exact():
    c = make_circle(1.0)
    tab = distance_profiles(c, "inner", n=64)
    assert np.allclose(tab.L, c.length - _TWO_PI * tab.t, rtol=1e-12, atol=1e-12)
    assert np.allclose(
        tab.A, c.length * tab.t - math.pi * tab.t**2, rtol=1e-12, atol=1e-12
    )
    tab = distance_profiles(c, "outer", T=4.0, n=64)
    assert np.allclose(tab.L, c.length + _TWO_PI * tab.t, rtol=1e-12)
    assert np.allclose(tab.A, c.length * tab.t + math.pi * tab.t**2, rtol=1e-12)


def test_profiles_convex_outer_is_steiner():
    e = make_ellipse_by_perimeter(_TWO_PI, 2.0)
    tab = distance_profiles(e, "outer", T=3.0, n=128)
    assert np.allclose(tab.L, e.length + _TWO_PI * tab.t, rtol=1e-9)
    assert np.allclose(tab.A, e.length * tab.t + math.pi * tab.t**2, rtol=1e-9)


def test_profile_argument_guards():
    c = make_circle(1.0)
    with pytest.raises(DomainError):
        distance_profiles(c, "sideways")
    with pytest.raises(DomainError):
        distance_profiles(c, "inner", T=1.5)
    with pytest.raises(DomainError):
        distance_profiles(c, "outer", T=-1.0)


def test_profile_csv_rows():
    tab = distance_profiles(make_circle(1.0), "inner", n=8)
    rows = list(tab.csv_rows())
    assert rows[0] == "t,A,L"
    assert len(rows) == 10


def test_isoperimetric_defect_nonnegative():
    contours = [
        make_circle(0.3),
        make_circle(1.0),
        make_ellipse_by_perimeter(_TWO_PI, 1.2),
        make_ellipse_by_perimeter(_TWO_PI, 3.0),
        make_perturbed_circle(_TWO_PI, 2, 0.1),
        make_perturbed_circle(_TWO_PI, 4, 0.1),
    ]
    for c in contours:
        defect = c.length**2 - 4.0 * math.pi * c.area
        assert defect >= -1e-12 * c.length**2
    circle = make_circle(1.7)
    assert abs(circle.length**2 - 4.0 * math.pi * circle.area) <= 1e-10


def test_offset_polyline_circle():
    c = make_circle(1.0)
    ring, _ = offset_polyline(c, 0.5, "outer", 0.1)
    assert np.allclose(np.linalg.norm(ring, axis=1), 1.5, atol=1e-9)
    ring, _ = offset_polyline(c, 0.4, "inner", 0.1)
    assert np.allclose(np.linalg.norm(ring, axis=1), 0.6, atol=1e-9)
    with pytest.raises(GeometryError):
        offset_polyline(c, 1.5, "inner", 0.1)


def test_offset_polyline_stays_on_level_set():
    c = make_ellipse_by_perimeter(_TWO_PI, 2.0)
    ring, _ = offset_polyline(c, 0.25, "outer", 0.05)
    assert np.max(np.abs(c.signed_distance(ring) + 0.25)) < 1e-8
    ring, _ = offset_polyline(c, 0.2, "inner", 0.05)
    assert np.max(np.abs(c.signed_distance(ring) - 0.2)) < 1e-8


@settings(max_examples=25, deadline=None)
@given(
    st.sampled_from([2, 3, 4, 5]),
    st.floats(min_value=0.01, max_value=0.2),
)
def test_perturbed_isoperimetric_random(mode, eps):
    c = make_perturbed_circle(_TWO_PI, mode, eps)
    assert c.length == pytest.approx(_TWO_PI, rel=1e-12)
    assert c.length**2 - 4.0 * math.pi * c.area >= -1e-12 * c.length**2
    # the defect grows with the perturbation, so it is positive here
    if eps >= 0.05:
        assert c.length**2 - 4.0 * math.pi * c.area > 0.0
