"""Lowest eigenpair of the discrete interface form.

Shift-and-invert inverse iteration on the pencil (K, M).  The shift
sits safely below the spectrum: the disk of the same perimeter has
the lowest eigenvalue of the whole perimeter class, and the secular
bracket bounds its root k* by omega / F(2 omega R), so

    sigma = -1.5 * (omega / F(2 omega R_eq))^2,   R_eq = L / (2 pi)

undershoots every eigenvalue of interest with a comfortable factor.
"""

import math

import numpy as np
from scipy.sparse.linalg import splu

from ..circle import CircleProblem, profile_F, solve_k_star
from ..exceptions import ConvergenceError
from .forms import assemble
from .mesh import build_mesh

_TWO_PI = 2.0 * math.pi


def _shift(form):
    r_eq = form.interface_length / _TWO_PI
    k_up = form.omega / profile_F(2.0 * form.omega * r_eq)
    return -1.5 * k_up * k_up


def lowest_eigenpair(form, tol=1e-8):
    """Smallest eigenvalue and eigenvector of (stiffness, mass).

    Parameters
    ----------
    form : DiscreteForm
    tol : float
        Residual target ||K x - lambda M x|| / ||M x||.

    Returns
    -------
    (lambda1, coeffs)
        coeffs is in the full dof numbering with zeros on eliminated
        dofs and unit mass norm.
    """
    k_mat = form.stiffness.tocsc()
    m_mat = form.mass.tocsc()
    sigma = _shift(form)
    lu = splu((k_mat - sigma * m_mat).tocsc())
    # the ground state has opposite signs on the two sides, so the
    # side-sign field is a strongly overlapping start vector
    x = form.dof_side.astype(float)
    x /= math.sqrt(x @ (m_mat @ x))
    lam = float(x @ (k_mat @ x))
    for it in range(400):
        y = lu.solve(m_mat @ x)
        my = m_mat @ y
        y /= math.sqrt(y @ my)
        ky = k_mat @ y
        my = m_mat @ y
        lam = float(y @ ky)
        res = float(np.linalg.norm(ky - lam * my) / np.linalg.norm(my))
        x = y
        if res <= tol:
            return lam, form.expand(x)
        if it == 80 and res > 1e3 * tol:
            # stalled: the shift was too close to a cluster; move it
            # further below the current estimate and refactor
            sigma = lam - 0.5 * abs(lam) - 1.0
            lu = splu((k_mat - sigma * m_mat).tocsc())
    raise ConvergenceError(
        "inverse iteration did not reach residual %g (last %g)" % (tol, res)
    )


def residual_norm(form, lam, coeffs):
    """||K x - lambda M x|| / ||M x|| for a full-dof vector."""
    x = coeffs[form.free]
    kx = form.stiffness @ x
    mx = form.mass @ x
    return float(np.linalg.norm(kx - lam * mx) / np.linalg.norm(mx))


def solve_with_field(c, omega, h, R_out, tol=1e-8):
    """Build, assemble and solve; return (record, mesh, form, coeffs)."""
    mesh = build_mesh(c, h, R_out)
    form = assemble(mesh, omega)
    lam, coeffs = lowest_eigenpair(form, tol)
    record = {
        "lambda1": lam,
        "residual": residual_norm(form, lam, coeffs),
        "h": mesh.h,
        "R_out": mesh.R_out,
        "n_nodes": int(len(mesh.nodes)),
        "n_dofs": int(mesh.n_dofs),
        "n_triangles": int(len(mesh.triangles)),
        "n_interface_pairs": int(len(mesh.interface_pairs)),
        "min_angle_deg": mesh.min_angle_deg,
    }
    return record, mesh, form, coeffs


def solve_lambda1(c, omega, h, R_out, tol=1e-8):
    """Lowest eigenvalue of the interface problem on contour c.

    Returns
    -------
    dict
        lambda1, residual, and mesh statistics.
    """
    record, _, _, _ = solve_with_field(c, omega, h, R_out, tol)
    return record


def error_estimate(c, omega, h, R_out, tol=1e-8):
    """Discretization error estimate from one coarsening step.

    For a second-order method the step h -> 2h multiplies the error
    by about four, so |lambda(h) - lambda(2h)| / 3 estimates the error
    of the fine value.

    Returns
    -------
    dict
        lambda1 (fine), lambda1_coarse, estimate.
    """
    fine = solve_lambda1(c, omega, h, R_out, tol)
    coarse = solve_lambda1(c, omega, 2.0 * h, R_out, tol)
    return {
        "lambda1": fine["lambda1"],
        "lambda1_coarse": coarse["lambda1"],
        "estimate": abs(fine["lambda1"] - coarse["lambda1"]) / 3.0,
        "fine": fine,
        "coarse": coarse,
    }


def convergence_study(c, omega, h_list, R_out_list, tol=1e-8):
    """Eigenvalue table over mesh sizes and truncation radii.

    For every R_out the whole h_list is run (h_list must decrease).
    When the contour is a circle the exact eigenvalue supplies an
    error column and the observed convergence order
    p = log2(e(h) / e(h/2)) between consecutive rows.

    Returns
    -------
    list of dict
        Keys: h, R_out, lambda1, n_dofs, residual, error, order.
    """
    h_list = [float(h) for h in h_list]
    if any(b >= a for a, b in zip(h_list, h_list[1:])):
        raise ValueError("h_list must be strictly decreasing")
    exact = None
    if c.kind == "circle":
        exact = solve_k_star(CircleProblem(c.meta["R"], omega)).lambda1
    rows = []
    for r_out in R_out_list:
        prev_err = None
        for h in h_list:
            rec = solve_lambda1(c, omega, h, float(r_out), tol)
            err = abs(rec["lambda1"] - exact) if exact is not None else None
            order = None
            if err is not None and prev_err is not None and err > 0.0:
                order = math.log2(prev_err / err)
            rows.append(
                {
                    "h": h,
                    "R_out": float(r_out),
                    "lambda1": rec["lambda1"],
                    "n_dofs": rec["n_dofs"],
                    "residual": rec["residual"],
                    "error": err,
                    "order": order,
                }
            )
            prev_err = err
    return rows


def write_eigenpair(mesh, coeffs, path):
    """Write the eigenvector as CSV: x, y, side, value per dof."""
    pts = mesh.dof_points()
    side = np.where(mesh.dof_side > 0, "inner", "outer")
    lines = ["x,y,side,value"]
    lines.extend(
        "%.17g,%.17g,%s,%.17g" % (pts[i, 0], pts[i, 1], side[i], coeffs[i])
        for i in range(mesh.n_dofs)
    )
    with open(path, "w") as f:
        f.write("\n".join(lines) + "\n")
