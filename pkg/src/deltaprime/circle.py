"""Exact ground state of the attractive delta-prime interaction on a circle.

For a circle of radius R and coupling strength omega > 0 the lowest
eigenvalue is lambda1 = -k*^2 where k* is the unique positive root of
the secular equation

    k^2 R I1(kR) K1(kR) = omega.

Writing F(x) = x K1(x) I1(x), the left side is G(k) = k F(kR); F is
smooth, strictly increasing, with F(0+) = 0 and F(x) -> 1/2, which
traps the root in the bracket 2 omega < k* < omega / F(2 omega R).
The (unnormalized) radial eigenfunction is

    psi(r) = K1(k R) I0(k r)   for r < R,
    psi(r) = -I1(k R) K0(k r)  for r > R,

with a jump psi(R-) - psi(R+) = 1/(kR) and continuous derivative
across the interface.
"""

import math
from dataclasses import dataclass

import numpy as np

from .bessel import _bessel_i_scalar, _bessel_k_scalar
from .exceptions import ConvergenceError, DomainError
from .quadrature import panel_nodes

_TWO_PI = 2.0 * math.pi


@dataclass(frozen=True)
class CircleProblem:
    """Circle radius and coupling strength, both strictly positive."""

    radius: float
    omega: float

    def __post_init__(self):
        if not (self.radius > 0.0 and math.isfinite(self.radius)):
            raise DomainError("radius must be positive, got %r" % (self.radius,))
        if not (self.omega > 0.0 and math.isfinite(self.omega)):
            raise DomainError("omega must be positive, got %r" % (self.omega,))


@dataclass(frozen=True)
class CircleSolution:
    """Root of the secular equation and derived spectral data.

    coeff_inside and coeff_outside are the eigenfunction coefficients
    K1(k*R) and -I1(k*R); the scaled variants e^(k*R) K1(k*R) and
    -e^(-k*R) I1(k*R) stay finite even when k*R is large enough that
    the plain coefficients under- or overflow.
    """

    problem: CircleProblem
    k_star: float
    lambda1: float
    coeff_inside: float
    coeff_outside: float
    residual: float
    k_lower: float
    k_upper: float
    coeff_inside_scaled: float
    coeff_outside_scaled: float

    def record(self):
        """Plain JSON-ready record of the solution."""
        return {
            "R": self.problem.radius,
            "omega": self.problem.omega,
            "k_star": self.k_star,
            "lambda1": self.lambda1,
            "residual": self.residual,
        }


def profile_F(x):
    """F(x) = x K1(x) I1(x), strictly increasing from 0 to 1/2.

    Evaluated through the exponentially scaled Bessel variants, so the
    product never over- or underflows regardless of x.
    """
    if isinstance(x, np.ndarray):
        return np.array([profile_F(float(v)) for v in x.ravel()]).reshape(x.shape)
    x = float(x)
    if x <= 0.0:
        raise DomainError("profile_F requires x > 0, got %g" % x)
    return x * _bessel_k_scalar(1, x, True) * _bessel_i_scalar(1, x, True)


def secular_residual(k, prob):
    """G(k) - omega with G(k) = k F(kR); strictly increasing in k."""
    if isinstance(k, np.ndarray):
        return np.array(
            [secular_residual(float(v), prob) for v in k.ravel()]
        ).reshape(k.shape)
    k = float(k)
    if k <= 0.0:
        raise DomainError("secular_residual requires k > 0, got %g" % k)
    return k * profile_F(k * prob.radius) - prob.omega


def default_bracket(prob):
    """Analytic root bracket (2 omega, omega / F(2 omega R))."""
    lo = 2.0 * prob.omega
    hi = prob.omega / profile_F(2.0 * prob.omega * prob.radius)
    return lo, hi


def solve_k_star(prob, tol=1e-12):
    """Solve the secular equation for k*.

    Bisection shrinks the analytic bracket to absolute width 1e-8 and
    a Newton polish with a central-difference derivative restores full
    precision.  The returned residual satisfies
    |G(k*) - omega| <= tol * omega; failure to reach that indicates
    the Bessel accuracy budget is exhausted and raises.

    Parameters
    ----------
    prob : CircleProblem
    tol : float
        Residual tolerance relative to omega, default 1e-12.
    """
    if not tol > 0.0:
        raise DomainError("tol must be positive, got %r" % (tol,))
    omega = prob.omega
    lo, hi = default_bracket(prob)
    k_lower, k_upper = lo, hi
    # The analytic upper end is a strict bound in exact arithmetic;
    # expand by doubling in the (rounding) case the sign test fails.
    for _ in range(64):
        if secular_residual(hi, prob) >= 0.0:
            break
        hi *= 2.0
    else:
        raise ConvergenceError("no sign change found above the bracket")
    width_goal = 1e-8
    for _ in range(256):
        if hi - lo <= width_goal:
            break
        mid = 0.5 * (lo + hi)
        if secular_residual(mid, prob) < 0.0:
            lo = mid
        else:
            hi = mid
    k = 0.5 * (lo + hi)
    goal = tol * omega
    for _ in range(12):
        g = secular_residual(k, prob)
        if abs(g) <= 0.01 * goal:
            break
        h = 1e-6 * k
        dg = (secular_residual(k + h, prob) - secular_residual(k - h, prob)) / (2.0 * h)
        if not (dg > 0.0 and math.isfinite(dg)):
            break
        step = g / dg
        k_new = k - step
        if not (0.5 * k_lower < k_new < 4.0 * k_upper):
            break
        k = k_new
    residual = secular_residual(k, prob)
    if abs(residual) > goal:
        raise ConvergenceError(
            "secular residual %.3e exceeds %.3e at R=%g omega=%g"
            % (residual, goal, prob.radius, omega)
        )
    x = k * prob.radius
    k1s = _bessel_k_scalar(1, x, True)
    i1s = _bessel_i_scalar(1, x, True)
    # Unscaled coefficients degrade gracefully (0.0 / -inf) once k*R
    # exceeds the double-precision exponent range.
    if x < 700.0:
        coeff_in = k1s * math.exp(-x)
        coeff_out = -i1s * math.exp(x)
    else:
        coeff_in = 0.0
        coeff_out = -math.inf
    return CircleSolution(
        problem=prob,
        k_star=k,
        lambda1=-k * k,
        coeff_inside=coeff_in,
        coeff_outside=coeff_out,
        residual=residual,
        k_lower=k_lower,
        k_upper=k_upper,
        coeff_inside_scaled=k1s,
        coeff_outside_scaled=-i1s,
    )


def eigenfunction_circle(sol, r, side=None, normalized=False):
    """Radial eigenfunction psi(r) for a solved circle problem.

    The function jumps at r = R, so evaluation exactly on the
    interface requires side='inner' or side='outer'.  Scaled Bessel
    products keep the evaluation stable at large k*R.

    Parameters
    ----------
    sol : CircleSolution
    r : float or ndarray
        Radius, r >= 0.
    side : str, optional
        Which one-sided limit to take at r = R.
    normalized : bool
        Divide by the L2 norm over the plane.
    """
    scale = l2_norm(sol) if normalized else 1.0
    if isinstance(r, np.ndarray):
        flat = [
            _eigenfunction_scalar(sol, float(v), side) / scale for v in r.ravel()
        ]
        return np.array(flat).reshape(r.shape)
    return _eigenfunction_scalar(sol, float(r), side) / scale


def _eigenfunction_scalar(sol, r, side):
    if r < 0.0:
        raise DomainError("radius must be nonnegative, got %g" % r)
    R = sol.problem.radius
    k = sol.k_star
    if r == R:
        if side not in ("inner", "outer"):
            raise DomainError(
                "psi jumps at r=R; pass side='inner' or side='outer'"
            )
        branch = side
    else:
        branch = "inner" if r < R else "outer"
    if branch == "inner":
        return (
            _bessel_k_scalar(1, k * R, True)
            * _bessel_i_scalar(0, k * r, True)
            * math.exp(k * (r - R))
        )
    return (
        -_bessel_i_scalar(1, k * R, True)
        * _bessel_k_scalar(0, k * r, True)
        * math.exp(k * (R - r))
    )


def l2_norm(sol, tail=None):
    """L2 norm of the unnormalized eigenfunction over the plane.

    The norm is 2 pi times the radial integrals of psi^2 r on both
    sides of the interface; the outer integral is truncated where the
    K0 tail has decayed below 1e-17 relative.
    """
    R = sol.problem.radius
    k = sol.k_star
    if tail is None:
        tail = 42.0 / k
    pts_in, wts_in = panel_nodes(0.0, R, 64, n=16)
    pts_out, wts_out = panel_nodes(R, R + tail, 128, n=16)
    psi_in = eigenfunction_circle(sol, pts_in)
    psi_out = eigenfunction_circle(sol, pts_out)
    total = np.dot(wts_in, psi_in**2 * pts_in) + np.dot(
        wts_out, psi_out**2 * pts_out
    )
    return math.sqrt(_TWO_PI * float(total))


def transmission_defect(sol):
    """Closed-form interface defects of the solved eigenfunction.

    Returns the pair
      (|psi'(R-) - psi'(R+)|, |psi'(R-) - omega (psi(R-) - psi(R+))|).
    The first vanishes identically because both one-sided derivatives
    equal k K1(kR) I1(kR); the second vanishes at the exact secular
    root and measures the solver residual otherwise.
    """
    prob = sol.problem
    R, k = prob.radius, sol.k_star
    x = k * R
    k1s = _bessel_k_scalar(1, x, True)
    i1s = _bessel_i_scalar(1, x, True)
    k0s = _bessel_k_scalar(0, x, True)
    i0s = _bessel_i_scalar(0, x, True)
    deriv_inner = k * k1s * i1s
    deriv_outer = k * i1s * k1s
    jump = k1s * i0s + i1s * k0s
    defect_derivative = abs(deriv_inner - deriv_outer)
    defect_transmission = abs(deriv_inner - prob.omega * jump)
    return defect_derivative, defect_transmission


def sweep_radius(omega, radii, tol=1e-12):
    """Solve the circle problem for an ascending list of radii.

    lambda1 is strictly increasing and k* strictly decreasing along
    the sweep.  Radii must be sorted ascending and positive.
    """
    radii = [float(R) for R in radii]
    if any(R <= 0.0 for R in radii):
        raise DomainError("all radii must be positive")
    if any(b <= a for a, b in zip(radii, radii[1:])):
        raise DomainError("radii must be sorted strictly ascending")
    return [solve_k_star(CircleProblem(R, omega), tol) for R in radii]
