"""Parametric C2 contours and their distance geometry.

Contours are truncated Fourier series of the parametrization, so they
are C-infinity by construction, derivatives and curvature are exact,
and perimeter/area quadratures of smooth periodic integrands converge
spectrally under the trapezoid rule.

Level-set profiles use exact parallel-curve formulas wherever the
offset stays below the cut locus: there the level curve of the
distance function at depth t has length exactly L -+ 2 pi t (total
turning of a simple closed curve is 2 pi).  Beyond the cut locus the
level sets are measured on a dense polygon with buffering, which
handles the measure-theoretic picture (merging fronts, disappearing
components) without tracking offset curves explicitly.
"""

import math

import numpy as np
from scipy.spatial import cKDTree
from shapely.geometry import Polygon

from .exceptions import DomainError, GeometryError

_TWO_PI = 2.0 * math.pi
_DENSE = 8192


class Contour:
    """Closed C2 curve given by vector Fourier coefficients.

    position(s) = sum_m cos(2 pi m s) * cos_coeff[m]
                + sum_m sin(2 pi m s) * sin_coeff[m]

    with s in [0, 1).  Instances are immutable after construction; all
    queries are read-only and safe to call concurrently.

    Parameters
    ----------
    cos_coeff, sin_coeff : array (M+1, 2)
        Fourier coefficients of the two coordinates.
    kind : str
        One of "circle", "ellipse", "perturbed", "generic"; used to
        pick exact cut-locus distances where they are known.
    meta : dict
        Family parameters (radius, semi-axes, mode, eps, ...).
    """

    def __init__(self, cos_coeff, sin_coeff, kind="generic", meta=None):
        self.cos_coeff = np.atleast_2d(np.asarray(cos_coeff, dtype=float))
        self.sin_coeff = np.atleast_2d(np.asarray(sin_coeff, dtype=float))
        if self.cos_coeff.shape != self.sin_coeff.shape or self.cos_coeff.shape[1] != 2:
            raise GeometryError("coefficient arrays must both be (M+1, 2)")
        self.kind = kind
        self.meta = dict(meta or {})
        self._polygons = {}
        self._validate_and_cache()

    # -- evaluation ---------------------------------------------------

    def _eval(self, s, deriv=0):
        s = np.asarray(s, dtype=float)
        m = np.arange(self.cos_coeff.shape[0], dtype=float)
        ang = _TWO_PI * np.multiply.outer(s, m)
        factor = (_TWO_PI * m) ** deriv
        if deriv % 4 == 0:
            c, sn = np.cos(ang), np.sin(ang)
        elif deriv % 4 == 1:
            c, sn = -np.sin(ang), np.cos(ang)
        elif deriv % 4 == 2:
            c, sn = -np.cos(ang), -np.sin(ang)
        else:
            c, sn = np.sin(ang), -np.cos(ang)
        return (c * factor) @ self.cos_coeff + (sn * factor) @ self.sin_coeff

    def position(self, s):
        """Point on the curve at parameter s (periodic)."""
        return self._eval(s, 0)

    def tangent(self, s):
        """First derivative with respect to the parameter."""
        return self._eval(s, 1)

    def second(self, s):
        """Second derivative with respect to the parameter."""
        return self._eval(s, 2)

    def speed(self, s):
        return np.linalg.norm(self.tangent(s), axis=-1)

    def curvature(self, s):
        """Signed curvature; positive for counterclockwise convex arcs."""
        d1 = self._eval(s, 1)
        d2 = self._eval(s, 2)
        cross = d1[..., 0] * d2[..., 1] - d1[..., 1] * d2[..., 0]
        return cross / self.speed(s) ** 3

    def normal_out(self, s):
        """Outward unit normal (curve is counterclockwise)."""
        d1 = self._eval(s, 1)
        n = np.stack([d1[..., 1], -d1[..., 0]], axis=-1)
        return n / np.linalg.norm(n, axis=-1, keepdims=True)

    # -- construction-time caches --------------------------------------

    def _validate_and_cache(self):
        s = np.arange(_DENSE) / _DENSE
        speed = self.speed(s)
        if speed.min() <= 1e-12 * speed.max():
            raise GeometryError("contour is not regular (|gamma'| vanishes)")
        pos = self.position(s)
        d1 = self._eval(s, 1)
        # spectral trapezoid quadratures on the periodic grid
        self.length = float(np.mean(speed))
        self.area = float(0.5 * np.mean(pos[:, 0] * d1[:, 1] - pos[:, 1] * d1[:, 0]))
        if self.area <= 0.0:
            raise GeometryError("contour must be counterclockwise and simple")
        ax = float(0.5 * np.mean(pos[:, 0] ** 2 * d1[:, 1]))
        ay = float(-0.5 * np.mean(pos[:, 1] ** 2 * d1[:, 0]))
        self.centroid = np.array([ax, ay]) / self.area
        kappa = self.curvature(s)
        if not np.all(np.isfinite(kappa)):
            raise GeometryError("curvature is not finite")
        self.kappa_min = float(kappa.min())
        self.kappa_max = float(kappa.max())
        if not Polygon(pos[:: _DENSE // 2048]).is_valid:
            raise GeometryError("contour is self-intersecting")
        self._dense_s = s
        self._dense_pos = pos
        self._cum = np.concatenate([[0.0], np.cumsum((speed + np.roll(speed, -1)) * 0.5 / _DENSE)])
        self._speed = speed
        self._tree = cKDTree(pos)

    # -- arc length parametrization ------------------------------------

    def param_at_arclength(self, targets):
        """Parameters s where the arc length from s=0 reaches the targets."""
        targets = np.asarray(targets, dtype=float) % self._cum[-1]
        grid = np.concatenate([self._dense_s, [1.0]])
        s = np.interp(targets, self._cum, grid)
        # two Newton corrections against a local trapezoid arc estimate
        for _ in range(2):
            idx = np.minimum((s * _DENSE).astype(int), _DENSE - 1)
            arc = self._cum[idx] + (s - grid[idx]) * 0.5 * (
                self._speed[idx] + self.speed(s)
            )
            s = s - (arc - targets) / self.speed(s)
        return s % 1.0

    def equal_arclength_params(self, count, offset=0.0):
        """count parameters equally spaced in arc length."""
        targets = self.length * (np.arange(count) + offset) / count
        return self.param_at_arclength(targets)

    # -- derived geometry ----------------------------------------------

    def polygon(self, n=_DENSE):
        """Shapely polygon on n arc-equal boundary samples (cached)."""
        if n not in self._polygons:
            s = self.equal_arclength_params(n)
            self._polygons[n] = Polygon(self.position(s))
        return self._polygons[n]

    def signed_distance(self, points):
        """Distance to the contour, positive inside, negative outside.

        The nearest dense boundary sample seeds a Newton projection
        onto the exact curve, so the result is accurate to far below
        any mesh or quadrature scale, and 1-Lipschitz up to that
        accuracy.
        """
        arr = np.asarray(points, dtype=float)
        single = arr.ndim == 1
        pts = np.atleast_2d(arr)
        _, idx = self._tree.query(pts)
        s = self._dense_s[idx]
        for _ in range(5):
            gamma = self.position(s)
            d1 = self._eval(s, 1)
            d2 = self._eval(s, 2)
            diff = pts - gamma
            g = np.einsum("ij,ij->i", diff, d1)
            gp = -np.einsum("ij,ij->i", d1, d1) + np.einsum("ij,ij->i", diff, d2)
            step = g / np.where(np.abs(gp) > 1e-30, gp, 1e-30)
            np.clip(step, -0.5 / _DENSE, 0.5 / _DENSE, out=step)
            s = s - step
        gamma = self.position(s)
        diff = pts - gamma
        dist = np.linalg.norm(diff, axis=1)
        outward = np.einsum("ij,ij->i", diff, self.normal_out(s))
        result = -np.sign(outward) * dist
        return float(result[0]) if single else result


# -- contour families ----------------------------------------------------


def make_circle(R):
    """Circle of radius R centered at the origin."""
    if not R > 0.0:
        raise DomainError("circle radius must be positive, got %r" % (R,))
    cos_c = np.array([[0.0, 0.0], [R, 0.0]])
    sin_c = np.array([[0.0, 0.0], [0.0, R]])
    return Contour(cos_c, sin_c, kind="circle", meta={"R": float(R)})


def _ellipse(a, b):
    cos_c = np.array([[0.0, 0.0], [a, 0.0]])
    sin_c = np.array([[0.0, 0.0], [0.0, b]])
    return Contour(cos_c, sin_c, kind="ellipse", meta={"a": float(a), "b": float(b)})


def make_ellipse_by_perimeter(L, aspect):
    """Ellipse with semi-axes (a, a/aspect) and perimeter L.

    The perimeter integral scales linearly in a, so the 1D root-find
    for the semi-major axis reduces to a single exact division by the
    unit-shape perimeter.
    """
    if not L > 0.0:
        raise DomainError("perimeter must be positive, got %r" % (L,))
    if not 1.0 < aspect <= 20.0:
        raise DomainError("aspect must lie in (1, 20], got %r" % (aspect,))
    unit = _ellipse(1.0, 1.0 / aspect)
    a = L / unit.length
    return _ellipse(a, a / aspect)


def make_perturbed_circle(L, mode, eps):
    """Radial perturbation r(theta) = rho0 (1 + eps cos(mode theta)).

    rho0 is fixed by the target perimeter (again a single division by
    linear scaling).  The products with cos/sin theta expand into a
    finite Fourier series, so the curve is exactly representable.
    """
    if not L > 0.0:
        raise DomainError("perimeter must be positive, got %r" % (L,))
    mode = int(mode)
    if mode < 2:
        raise DomainError("mode must be an integer >= 2, got %r" % (mode,))
    eps = float(eps)
    M = mode + 1
    cos_c = np.zeros((M + 1, 2))
    sin_c = np.zeros((M + 1, 2))
    cos_c[1, 0] = 1.0
    sin_c[1, 1] = 1.0
    # r cos(theta) = cos(theta) + eps/2 [cos((m+1)th) + cos((m-1)th)]
    cos_c[mode + 1, 0] += 0.5 * eps
    cos_c[mode - 1, 0] += 0.5 * eps
    # r sin(theta) = sin(theta) + eps/2 [sin((m+1)th) - sin((m-1)th)]
    sin_c[mode + 1, 1] += 0.5 * eps
    sin_c[mode - 1, 1] -= 0.5 * eps
    try:
        unit = Contour(cos_c, sin_c, kind="perturbed", meta={"mode": mode, "eps": eps})
    except GeometryError as exc:
        raise GeometryError(
            "perturbation mode=%d eps=%g violates regularity: %s" % (mode, eps, exc)
        ) from exc
    rho0 = L / unit.length
    return Contour(
        cos_c * rho0,
        sin_c * rho0,
        kind="perturbed",
        meta={"mode": mode, "eps": eps, "rho0": rho0},
    )


def contour_from_spec(spec):
    """Build a contour from a declarative mapping.

    Accepted forms:
      {"type": "circle", "R": r} or {"type": "circle", "length": L}
      {"type": "ellipse", "length": L, "aspect": a}
      {"type": "perturbed", "length": L, "mode": m, "eps": e}
    """
    if not isinstance(spec, dict) or "type" not in spec:
        raise DomainError("contour spec must be a mapping with a 'type' key")
    kind = spec["type"]
    if kind == "circle":
        if "R" in spec and spec["R"] is not None:
            return make_circle(float(spec["R"]))
        if "length" in spec and spec["length"] is not None:
            return make_circle(float(spec["length"]) / _TWO_PI)
        raise DomainError("circle spec needs 'R' or 'length'")
    try:
        if kind == "ellipse":
            return make_ellipse_by_perimeter(
                float(spec["length"]), float(spec["aspect"])
            )
        if kind == "perturbed":
            return make_perturbed_circle(
                float(spec["length"]), int(spec["mode"]), float(spec["eps"])
            )
    except KeyError as exc:
        raise DomainError("contour spec is missing key %s" % exc)
    raise DomainError("unknown contour type %r" % (kind,))


# -- in-radius ------------------------------------------------------------


def in_radius(c):
    """Radius of the largest inscribed disk.

    Exact for circles and ellipses; otherwise a deterministic pattern
    search maximizes the inner distance function.
    """
    if c.kind == "circle":
        return c.meta["R"]
    if c.kind == "ellipse":
        return min(c.meta["a"], c.meta["b"])
    p = c.centroid.copy()
    best = float(c.signed_distance(p[None, :])[0])
    step = c.length / 20.0
    dirs = np.array(
        [[1, 0], [0, 1], [-1, 0], [0, -1], [1, 1], [1, -1], [-1, 1], [-1, -1]],
        dtype=float,
    )
    dirs /= np.linalg.norm(dirs, axis=1, keepdims=True)
    while step > 1e-13 * c.length:
        probes = p[None, :] + step * dirs
        vals = c.signed_distance(probes)
        j = int(np.argmax(vals))
        if vals[j] > best:
            best = float(vals[j])
            p = probes[j]
        else:
            step *= 0.5
    return best


# -- level-set profiles ----------------------------------------------------


class DistanceProfileTable:
    """Sampled area and length profiles of the distance function.

    Attributes
    ----------
    side : str
        "inner" or "outer".
    t : ndarray
        Increasing depth grid starting at 0.
    A : ndarray
        A(t), the area of the sublevel set {0 < rho < t} on this side.
    L : ndarray
        L(t), the length of the level set {rho = t}.
    contour_length : float
        Perimeter L of the generating contour.
    """

    def __init__(self, side, t, A, L, contour_length):
        self.side = side
        self.t = np.asarray(t, dtype=float)
        self.A = np.asarray(A, dtype=float)
        self.L = np.asarray(L, dtype=float)
        self.contour_length = float(contour_length)

    def interp_L(self, t):
        """Piecewise-linear interpolant of the length profile.

        Beyond the tabulated horizon the inner profile continues with
        0 (the sublevel sets have saturated).
        """
        return np.interp(t, self.t, self.L, right=0.0 if self.side == "inner" else None)

    def csv_rows(self):
        yield "t,A,L"
        for tj, aj, lj in zip(self.t, self.A, self.L):
            yield "%r,%r,%r" % (tj, aj, lj)


def _cut_distance(c, side):
    """Depth below which level sets are exact parallel curves."""
    if side == "inner":
        if c.kind == "circle":
            return c.meta["R"] * (1.0 + 1e-12)
        if c.kind == "ellipse":
            a, b = c.meta["a"], c.meta["b"]
            return min(a, b) ** 2 / max(a, b)
        return 0.8 / max(c.kappa_max, 1e-300)
    if c.kappa_min >= -1e-12:
        return math.inf
    return 0.8 / abs(c.kappa_min)


def distance_profiles(c, side, T=None, n=512):
    """Tabulate A(t) and L(t) on a uniform grid of n+1 depths.

    For depths below the cut distance the profiles are the exact
    parallel-curve values L(t) = L -+ 2 pi t, A(t) = L t -+ pi t^2.
    Beyond it they are measured by polygon offsetting; for the outer
    side the offsetting switches back to the exact Steiner formula as
    soon as the dilated region is convex.

    Parameters
    ----------
    c : Contour
    side : str
        "inner" or "outer".
    T : float, optional
        Horizon.  Defaults to in_radius(c) inside and 6 L / (2 pi)
        outside.
    n : int
        Number of grid intervals.
    """
    if side not in ("inner", "outer"):
        raise DomainError("side must be 'inner' or 'outer', got %r" % (side,))
    L0 = c.length
    if T is None:
        T = in_radius(c) if side == "inner" else 6.0 * L0 / _TWO_PI
    T = float(T)
    if not T > 0.0:
        raise DomainError("horizon must be positive, got %g" % T)
    if side == "inner":
        rin = in_radius(c)
        if T > rin * (1.0 + 1e-9):
            raise DomainError(
                "inner horizon %g exceeds the in-radius %g" % (T, rin)
            )
    t_grid = np.linspace(0.0, T, n + 1)
    sgn = -1.0 if side == "inner" else 1.0
    t_cut = _cut_distance(c, side)
    A = np.empty(n + 1)
    Lv = np.empty(n + 1)
    analytic = t_grid <= t_cut
    Lv[analytic] = L0 + sgn * _TWO_PI * t_grid[analytic]
    A[analytic] = L0 * t_grid[analytic] + sgn * math.pi * t_grid[analytic] ** 2
    todo = np.flatnonzero(~analytic)
    if todo.size:
        _fill_buffered(c, side, t_grid, A, Lv, todo)
        # tripwire: the last analytic point must agree with a direct
        # measurement, otherwise the cut-locus estimate was optimistic
        # and the affected range is re-measured conservatively.
        j_last = int(np.flatnonzero(analytic)[-1])
        if t_grid[j_last] > 0.0:
            a_chk, l_chk = _buffer_measures(c, side, t_grid[j_last])
            if abs(l_chk - Lv[j_last]) > 3e-5 * L0:
                redo = np.flatnonzero(t_grid > 0.4 * t_cut)
                _fill_buffered(c, side, t_grid, A, Lv, redo)
        # The parallel-curve values bound the measured ones from above on
        # both sides (L(t) <= L0 -+ 2 pi t, A(t) <= L0 t -+ pi t^2 for any
        # simple closed curve), so clamping removes only the offsetting
        # discretization noise and restores the exact inequalities.
        np.minimum(Lv, L0 + sgn * _TWO_PI * t_grid, out=Lv)
        np.minimum(A, L0 * t_grid + sgn * math.pi * t_grid**2, out=A)
    if np.any(np.diff(A) < -1e-9 * L0 * L0):
        raise GeometryError("area profile is non-monotone: grid resolution failure")
    return DistanceProfileTable(side, t_grid, A, Lv, L0)


def _buffer_measures(c, side, t):
    poly = c.polygon()
    if side == "inner":
        g = poly.buffer(-t, quad_segs=32)
        return poly.area - g.area, g.length
    g = poly.buffer(t, quad_segs=32)
    return g.area - poly.area, g.length


def _fill_buffered(c, side, t_grid, A, Lv, indices):
    poly = c.polygon()
    base_area = poly.area
    steiner_from = None
    for j in indices:
        t = t_grid[j]
        if steiner_from is not None:
            t0, a0, l0 = steiner_from
            dt = t - t0
            Lv[j] = l0 + _TWO_PI * dt
            A[j] = a0 + l0 * dt + math.pi * dt * dt
            continue
        if side == "inner":
            g = poly.buffer(-t, quad_segs=32)
            A[j] = base_area - g.area
            Lv[j] = g.length
        else:
            g = poly.buffer(t, quad_segs=32)
            A[j] = g.area - base_area
            Lv[j] = g.length
            # Once the dilation is convex to within 1e-4 of its hull the
            # Steiner formula continues the table; the frozen deficit
            # keeps L <= L0 + 2 pi t and A <= A0 + L0 t + pi t^2, and the
            # remaining drift is below the 1e-4 discretization floor of
            # the buffered values themselves.
            if g.length - g.convex_hull.length <= 1e-4 * g.length:
                steiner_from = (t, A[j], Lv[j])


# -- helpers for meshing ---------------------------------------------------


def offset_polyline(c, t, side, spacing):
    """Points on the parallel curve at depth t, resampled uniformly.

    Valid only below the cut distance of the given side; the arc
    element of the offset is |gamma'| (1 -+ kappa t), which stays
    positive there.
    """
    sgn = -1.0 if side == "inner" else 1.0
    s = np.arange(_DENSE) / _DENSE
    metric = c.speed(s) * (1.0 + sgn * c.curvature(s) * t)
    if metric.min() <= 0.0:
        raise GeometryError("offset %g exceeds the reach on side %s" % (t, side))
    cum = np.concatenate([[0.0], np.cumsum((metric + np.roll(metric, -1)) * 0.5 / _DENSE)])
    total = cum[-1]
    count = max(int(round(total / spacing)), 12)
    targets = total * np.arange(count) / count
    grid = np.concatenate([s, [1.0]])
    sj = np.interp(targets, cum, grid)
    return c.position(sj) + sgn * t * c.normal_out(sj), count
