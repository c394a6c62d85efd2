"""Acceptance suite: one test per criterion, at the stated tolerances.

Each criterion is a single test function, so a verbose run prints one
pass/fail line per criterion.  Cross-checks use scipy.special, which
shares no code with the package's Bessel implementations.
"""

import math
import time

import numpy as np
import pytest
import scipy.special as sps

from deltaprime.bessel import wronskian_defect
from deltaprime.bound import circle_quotient, domain_quotient, optimal_profile
from deltaprime.circle import CircleProblem, solve_k_star
from deltaprime.fem.eigen import convergence_study, error_estimate
from deltaprime.geometry import (
    distance_profiles,
    make_circle,
    make_ellipse_by_perimeter,
    make_perturbed_circle,
)

_TWO_PI = 2.0 * math.pi

GRID = [(R, omega) for R in (0.1, 0.5, 1.0, 2.0, 10.0) for omega in (0.25, 1.0, 4.0)]

FAMILY = (
    [make_circle(1.0)]
    + [make_ellipse_by_perimeter(_TWO_PI, a) for a in (1.2, 1.5, 2.0, 3.0)]
    + [make_perturbed_circle(_TWO_PI, m, 0.1) for m in (2, 3, 4)]
)


def test_criterion_01_secular_exactness_on_grid():
    # |k*^2 R I1(k*R) K1(k*R) - omega| <= 1e-10 omega, checked through
    # an independent Bessel implementation, in under a second
    start = time.monotonic()
    worst = 0.0
    for R, omega in GRID:
        k = solve_k_star(CircleProblem(R, omega)).k_star
        x = k * R
        residual = abs(k * k * R * sps.i1e(x) * sps.k1e(x) - omega)
        worst = max(worst, residual / omega)
        assert residual <= 1e-10 * omega, (R, omega, residual)
    elapsed = time.monotonic() - start
    assert elapsed < 1.0
    print("secular residual (rel): worst %.3e in %.2fs" % (worst, elapsed))


def test_criterion_02_bracket_is_strict():
    for R, omega in GRID:
        sol = solve_k_star(CircleProblem(R, omega))
        assert sol.k_lower < sol.k_star < sol.k_upper, (R, omega)
        assert sol.k_lower == 2.0 * omega


def test_criterion_03_flat_limit_and_monotonicity():
    sol = solve_k_star(CircleProblem(1e4, 1.0))
    assert abs(sol.lambda1 + 4.0) <= 1e-3
    radii = np.round(np.arange(0.1, 100.0 + 1e-9, 0.1), 10)
    lams = [solve_k_star(CircleProblem(float(R), 1.0)).lambda1 for R in radii]
    diffs = np.diff(lams)
    assert np.all(diffs > 0.0)
    print(
        "flat limit gap %.2e; lambda1 strictly increasing over %d radii"
        % (abs(sol.lambda1 + 4.0), len(radii))
    )


def test_criterion_04_curvature_improves_binding():
    for R, omega in GRID:
        sol = solve_k_star(CircleProblem(R, omega))
        assert sol.lambda1 <= -2.0 * omega / R, (R, omega)


def test_criterion_05_scaling_relation():
    for R, omega in GRID:
        k = solve_k_star(CircleProblem(R, omega)).k_star
        k_unit = solve_k_star(CircleProblem(omega * R, 1.0)).k_star
        assert abs(k - omega * k_unit) <= 1e-10 * abs(k), (R, omega)


def test_criterion_06_wronskian_identity():
    x = np.geomspace(1e-3, 600.0, 1000)
    defect = np.abs(wronskian_defect(x)) * x
    assert np.all(defect <= 1e-11)
    print("wronskian defect * x: worst %.3e over 1000 points" % defect.max())


def test_criterion_07_quotient_reproduces_circle():
    start = time.monotonic()
    p = optimal_profile(1.0, 1.0)
    lam = solve_k_star(CircleProblem(1.0, 1.0)).lambda1
    disk = circle_quotient(p, _TWO_PI, 1.0)
    assert abs(disk.quotient - lam) <= 1e-6 * abs(lam)
    dom = domain_quotient(p, make_circle(1.0), 1.0)
    assert abs(dom.quotient - disk.quotient) <= 1e-4 * abs(disk.quotient)
    elapsed = time.monotonic() - start
    assert elapsed < 10.0
    print(
        "disk quotient gap %.2e rel, transplant gap %.2e rel, %.1fs"
        % (
            abs(disk.quotient - lam) / abs(lam),
            abs(dom.quotient - disk.quotient) / abs(disk.quotient),
            elapsed,
        )
    )


def test_criterion_08_ordering_on_contour_family():
    from deltaprime.bound import theorem_certificate

    lam_circle = solve_k_star(CircleProblem(1.0, 1.0)).lambda1
    for c in FAMILY[1:]:
        cert = theorem_certificate(c, 1.0)
        est = error_estimate(c, 1.0, 0.02, 5.0)
        lam_fem = est["lambda1"]
        label = (c.kind, c.meta.get("a", c.meta.get("mode")))
        # discrete eigenvalue sits below the transplanted upper bound
        assert lam_fem <= cert["domain_bound"] + 5e-3, label
        # the upper bound sits below the circle value
        assert cert["domain_bound"] <= lam_circle + 1e-4, label
        # for clearly noncircular shapes the spectral gap dominates the
        # discretization error estimate
        aspect = c.meta.get("a", 0.0) / c.meta.get("b", 1.0) if c.kind == "ellipse" else None
        if aspect is not None and aspect >= 1.5:
            margin = lam_circle - lam_fem
            assert margin > 3.0 * est["estimate"], (label, margin, est["estimate"])
        print(
            "%s: fem %.6f <= bound %.6f <= circle %.6f (est %.1e)"
            % (label, lam_fem, cert["domain_bound"], lam_circle, est["estimate"])
        )


def test_criterion_09_fem_convergence_and_truncation():
    start = time.monotonic()
    exact = solve_k_star(CircleProblem(1.0, 1.0)).lambda1
    rows = convergence_study(make_circle(1.0), 1.0, [0.04, 0.02], [6.0, 9.0])
    by_key = {(r["h"], r["R_out"]): r for r in rows}
    err_coarse = by_key[(0.04, 6.0)]["error"]
    err_fine = by_key[(0.02, 6.0)]["error"]
    assert err_coarse <= 0.02 * abs(exact)
    ratio = err_coarse / err_fine
    assert 2.5 <= ratio <= 5.0, ratio
    shift = abs(by_key[(0.04, 6.0)]["lambda1"] - by_key[(0.04, 9.0)]["lambda1"])
    assert shift <= 1e-5, shift
    elapsed = time.monotonic() - start
    assert elapsed < 300.0
    print(
        "relative error %.4f%%, halving ratio %.2f, truncation shift %.1e, %.0fs"
        % (100.0 * err_coarse / abs(exact), ratio, shift, elapsed)
    )


def test_criterion_10_isoperimetric_and_profile_inequalities():
    for c in FAMILY:
        L0 = c.length
        defect = L0 * L0 - 4.0 * math.pi * c.area
        assert defect >= -1e-8 * L0 * L0, c.kind
        for side, sgn in (("inner", -1.0), ("outer", 1.0)):
            tab = distance_profiles(c, side, n=512)
            lim_L = L0 + sgn * _TWO_PI * tab.t
            lim_A = L0 * tab.t + sgn * math.pi * tab.t**2
            assert np.all(tab.L <= lim_L + 1e-9 * L0), (c.kind, side)
            assert np.all(tab.A <= lim_A + 1e-9 * L0 * L0), (c.kind, side)
            if c.kind == "circle":
                assert np.max(np.abs(tab.L - lim_L)) <= 1e-6 * L0
                assert np.max(np.abs(tab.A - lim_A)) <= 1e-6 * L0 * L0
    print("defect and level-set comparisons hold on all %d contours" % len(FAMILY))
