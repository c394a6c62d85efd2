"""Upper bounds for the lowest eigenvalue from radial trial profiles.

A trial function that depends only on the signed distance to the
interface reduces the two-dimensional Rayleigh quotient to
one-dimensional integrals weighted by the lengths of the distance
level sets.  On a disk of the same perimeter the weights are the
exact linear profiles L -+ 2 pi t; on a general contour the measured
profiles are pointwise smaller, and since the shifted integrand
psi'(t)^2 - lambda psi(t)^2 is nonnegative for negative lambda, the
general quotient can only drop below the disk quotient.  Evaluating
both sides of that comparison yields a certified upper bound for the
lowest eigenvalue of any contour in terms of the disk value.
"""

import math
from collections.abc import Callable
from dataclasses import dataclass

import numpy as np

from .bessel import bessel_i, bessel_k
from .circle import CircleProblem, solve_k_star
from .exceptions import DomainError
from .geometry import distance_profiles
from .quadrature import nodes_from_edges, panel_nodes

_TWO_PI = 2.0 * math.pi

# fraction of the outer interval over which the profile is tapered to zero
_TAPER_FRACTION = 0.01


@dataclass(frozen=True)
class RadialProfile:
    """Two-sided trial profile as a function of interface distance.

    Parameters
    ----------
    psi_plus : callable
        Profile on the bounded side, defined on [0, R] where R is the
        radius of the disk with the same perimeter.
    psi_minus : callable
        Profile on the unbounded side, defined on [0, T] and vanishing
        at the horizon T.
    R : float
        Extent of the bounded-side profile.
    T : float
        Horizon of the unbounded-side profile.
    dpsi_plus, dpsi_minus : callable, optional
        Analytic derivatives.  When omitted, derivatives are formed by
        second-order central differences.
    """

    psi_plus: Callable
    psi_minus: Callable
    R: float
    T: float
    dpsi_plus: Callable | None = None
    dpsi_minus: Callable | None = None

    def __post_init__(self):
        if not (self.R > 0.0 and math.isfinite(self.R)):
            raise DomainError("profile extent R must be positive, got %r" % (self.R,))
        if not (self.T > 0.0 and math.isfinite(self.T)):
            raise DomainError("profile horizon T must be positive, got %r" % (self.T,))

    def jump(self):
        """Interface jump psi_plus(0) - psi_minus(0)."""
        return float(self.psi_plus(0.0)) - float(self.psi_minus(0.0))


@dataclass(frozen=True)
class QuotientReport:
    """Rayleigh quotient of a radial trial profile, term by term.

    quotient = (numerator_gradient - numerator_jump) / denominator,
    where numerator_jump = omega * L * (psi_plus(0) - psi_minus(0))^2
    is computed exactly, without quadrature.
    """

    numerator_gradient: float
    numerator_jump: float
    denominator: float
    quotient: float

    def record(self):
        return {
            "numerator_gradient": self.numerator_gradient,
            "numerator_jump": self.numerator_jump,
            "denominator": self.denominator,
            "quotient": self.quotient,
        }


def optimal_profile(R, omega, T=None):
    """Ground-state profile of the disk, in distance coordinates.

    The bounded side carries K1(kR) I0(k(R - t)) and the unbounded
    side -I1(kR) K0(k(R + t)) with k the secular root for (R, omega);
    their interface jump is 1/(kR) exactly.  The unbounded profile is
    tapered linearly to zero over the final 1% of [0, T].

    Parameters
    ----------
    R, omega : float
        Disk radius and coupling strength.
    T : float, optional
        Horizon.  Defaults to 33/k, deep enough that the discarded
        tail is far below the target accuracy.  The horizon must
        satisfy K0(k(R + T)) < 1e-14 K0(kR).

    Returns
    -------
    RadialProfile
        With analytic derivatives attached.
    """
    sol = solve_k_star(CircleProblem(R, omega))
    k = sol.k_star
    if T is None:
        T = 33.0 / k
    T = float(T)
    if not T > 0.0:
        raise DomainError("horizon must be positive, got %g" % T)
    # tail precondition, checked in overflow-free scaled form:
    # K0(k(R+T))/K0(kR) = (k0s(k(R+T))/k0s(kR)) exp(-kT)
    if k * T < 700.0:
        tail = (
            bessel_k(0, k * (R + T), scaled=True)
            / bessel_k(0, k * R, scaled=True)
            * math.exp(-k * T)
        )
    else:
        tail = 0.0
    if not tail < 1e-14:
        raise DomainError(
            "horizon too shallow: outer tail ratio %.3e exceeds 1e-14" % tail
        )
    a_in = bessel_k(1, k * R, scaled=True)
    a_out = bessel_i(1, k * R, scaled=True)
    t_taper = (1.0 - _TAPER_FRACTION) * T

    # K1(kR) I0(k(R-t)) = k1s(kR) i0s(k(R-t)) exp(-kt): products of the
    # scaled functions never overflow however large kR is.
    def psi_plus(t):
        t = np.asarray(t, dtype=float)
        return a_in * bessel_i(0, k * (R - t), scaled=True) * np.exp(-k * t)

    def dpsi_plus(t):
        t = np.asarray(t, dtype=float)
        return -k * a_in * bessel_i(1, k * (R - t), scaled=True) * np.exp(-k * t)

    def _taper(t):
        return np.clip((T - t) / (T - t_taper), 0.0, 1.0)

    def _psi_minus_raw(t):
        return -a_out * bessel_k(0, k * (R + t), scaled=True) * np.exp(-k * t)

    def psi_minus(t):
        t = np.asarray(t, dtype=float)
        return _taper(t) * _psi_minus_raw(t)

    def dpsi_minus(t):
        t = np.asarray(t, dtype=float)
        raw = _psi_minus_raw(t)
        draw = k * a_out * bessel_k(1, k * (R + t), scaled=True) * np.exp(-k * t)
        dchi = np.where((t > t_taper) & (t < T), -1.0 / (T - t_taper), 0.0)
        return _taper(t) * draw + dchi * raw

    return RadialProfile(
        psi_plus=psi_plus,
        psi_minus=psi_minus,
        R=float(R),
        T=T,
        dpsi_plus=dpsi_plus,
        dpsi_minus=dpsi_minus,
    )


def _derivative(f, df, t):
    if df is not None:
        return np.asarray(df(t), dtype=float)
    h = 1e-6 * (1.0 + np.abs(t))
    return (np.asarray(f(t + h), dtype=float) - np.asarray(f(t - h), dtype=float)) / (
        2.0 * h
    )


def _outer_edges(T, panels=256):
    """Panel edges on [0, T] with an edge pinned at the taper break."""
    t_taper = (1.0 - _TAPER_FRACTION) * T
    head = np.linspace(0.0, t_taper, panels - 5)
    tail = np.linspace(t_taper, T, 7)[1:]
    return np.concatenate([head, tail])


def _quotient_from_weights(p, L, omega, x_in, w_in, wt_in, x_out, w_out, wt_out):
    grad = float(
        np.dot(w_in, _derivative(p.psi_plus, p.dpsi_plus, x_in) ** 2 * wt_in)
        + np.dot(w_out, _derivative(p.psi_minus, p.dpsi_minus, x_out) ** 2 * wt_out)
    )
    den = float(
        np.dot(w_in, np.asarray(p.psi_plus(x_in), dtype=float) ** 2 * wt_in)
        + np.dot(w_out, np.asarray(p.psi_minus(x_out), dtype=float) ** 2 * wt_out)
    )
    jump = omega * L * p.jump() ** 2
    if not den > 0.0:
        raise DomainError("denominator quadrature is not positive: %g" % den)
    return QuotientReport(
        numerator_gradient=grad,
        numerator_jump=jump,
        denominator=den,
        quotient=(grad - jump) / den,
    )


def circle_quotient(p, L, omega):
    """Rayleigh quotient of the profile on the disk of perimeter L.

    Uses the exact linear level-length weights L - 2 pi t inside and
    L + 2 pi t outside, integrated by composite 16-point Gauss
    quadrature on 256 panels per side.

    Parameters
    ----------
    p : RadialProfile
    L : float
        Disk perimeter; the disk radius is L / (2 pi).
    omega : float
        Coupling strength.

    Returns
    -------
    QuotientReport
    """
    if not (L > 0.0 and math.isfinite(L)):
        raise DomainError("perimeter must be positive, got %r" % (L,))
    if not (omega > 0.0 and math.isfinite(omega)):
        raise DomainError("coupling strength must be positive, got %r" % (omega,))
    if p.R > L / _TWO_PI * (1.0 + 1e-12):
        raise DomainError(
            "inner profile extends past the disk radius L/(2 pi) = %g" % (L / _TWO_PI)
        )
    x_in, w_in = panel_nodes(0.0, p.R, 256, 16)
    x_out, w_out = nodes_from_edges(_outer_edges(p.T), 16)
    return _quotient_from_weights(
        p,
        L,
        omega,
        x_in,
        w_in,
        L - _TWO_PI * x_in,
        x_out,
        w_out,
        L + _TWO_PI * x_out,
    )


def domain_quotient(p, c, omega, n=1024):
    """Rayleigh quotient of the transplanted profile on a contour.

    The trial function psi(distance) is constant on distance level
    sets, so its quotient reduces exactly to one-dimensional integrals
    weighted by the measured level-set lengths.  The weights enter as
    the piecewise-linear tables from distance_profiles, integrated
    exactly on the table grid (4-point Gauss per table segment, the
    same total node count as the 256x16 rule).  The result is an upper
    bound for the lowest eigenvalue of the contour whenever it is
    negative.

    Parameters
    ----------
    p : RadialProfile
        Built for the disk of the same perimeter: 2 pi R must equal
        the contour length to 1e-8.
    c : Contour
    omega : float
        Coupling strength.
    n : int
        Distance-table resolution per side.

    Returns
    -------
    QuotientReport
    """
    if not (omega > 0.0 and math.isfinite(omega)):
        raise DomainError("coupling strength must be positive, got %r" % (omega,))
    L = c.length
    if abs(L - _TWO_PI * p.R) > 1e-8 * max(1.0, L):
        raise DomainError(
            "profile was built for perimeter %g but the contour has %g"
            % (_TWO_PI * p.R, L)
        )
    table_in = distance_profiles(c, "inner", n=n)
    table_out = distance_profiles(c, "outer", T=p.T, n=n)
    x_in, w_in = nodes_from_edges(table_in.t, 4)
    x_out, w_out = nodes_from_edges(table_out.t, 4)
    return _quotient_from_weights(
        p,
        L,
        omega,
        x_in,
        w_in,
        table_in.interp_L(x_in),
        x_out,
        w_out,
        table_out.interp_L(x_out),
    )


def quotient_ordering(p, c, omega, rtol=1e-8, n=1024):
    """Compare the contour quotient against the disk quotient.

    The comparison chain requires a negative disk quotient; when it is
    nonnegative the ordering carries no information and is reported as
    vacuous rather than asserted.

    Returns
    -------
    dict
        Keys: circle (QuotientReport), domain (QuotientReport),
        vacuous (bool), ordered (bool or None).
    """
    cq = circle_quotient(p, c.length, omega)
    dq = domain_quotient(p, c, omega, n=n)
    vacuous = not cq.quotient < 0.0
    ordered = None
    if not vacuous:
        ordered = bool(dq.quotient <= cq.quotient + rtol * abs(cq.quotient))
    return {"circle": cq, "domain": dq, "vacuous": vacuous, "ordered": ordered}


def theorem_certificate(c, omega, tol=1e-4, n=1024):
    """Certify the eigenvalue comparison for one contour.

    Computes the exact disk eigenvalue for the same perimeter, the
    transplanted-profile upper bound for the contour, and their
    difference.  A certificate holds when the bound is negative and
    does not exceed the disk eigenvalue by more than tol, which pins
    the ordering lambda_1(contour) <= bound <= lambda_1(disk) + tol.

    Returns
    -------
    dict
        Keys: lambda1_circle, domain_bound, margin (= lambda1_circle -
        domain_bound), certified, tolerance, k_star, horizon, length,
        omega, circle_quotient, domain_quotient (term-by-term audit).
    """
    L = c.length
    R = L / _TWO_PI
    sol = solve_k_star(CircleProblem(R, omega))
    p = optimal_profile(R, omega)
    cq = circle_quotient(p, L, omega)
    dq = domain_quotient(p, c, omega, n=n)
    margin = sol.lambda1 - dq.quotient
    certified = bool(margin >= -tol and dq.quotient < 0.0)
    return {
        "lambda1_circle": sol.lambda1,
        "domain_bound": dq.quotient,
        "margin": margin,
        "certified": certified,
        "tolerance": tol,
        "k_star": sol.k_star,
        "horizon": p.T,
        "length": L,
        "omega": omega,
        "circle_quotient": cq.record(),
        "domain_quotient": dq.record(),
    }
