"""Sparse assembly of the broken quadratic form on linear elements.

The form is the Dirichlet energy over both regions minus omega times
the squared interface jump:

    q[u] = sum_T int_T |grad u|^2  -  omega * sum_E int_E (u_in - u_out)^2

with the jump integrated exactly for linear traces on each interface
edge.  Degrees of freedom on the truncation circle are eliminated
(homogeneous Dirichlet).
"""

import math
from dataclasses import dataclass

import numpy as np
from scipy.sparse import coo_matrix, csr_matrix

from ..exceptions import MeshError

_TWO_PI = 2.0 * math.pi


@dataclass
class DiscreteForm:
    """Assembled matrices of the interface eigenproblem.

    The matrices are restricted to the free dofs (truncation-circle
    dofs eliminated).  stiffness = gradient part + jump_term; the jump
    term is negative semidefinite with rank at most the number of
    interface pairs.
    """

    stiffness: csr_matrix
    mass: csr_matrix
    jump_term: csr_matrix
    free: np.ndarray
    n_dofs_full: int
    omega: float
    interface_length: float
    dof_side: np.ndarray

    def expand(self, x):
        """Lift a free-dof vector to the full dof numbering (zeros on
        the eliminated truncation-circle dofs)."""
        full = np.zeros(self.n_dofs_full)
        full[self.free] = x
        return full


def _p1_matrices(points, tri, n_dofs):
    """Stiffness and mass in COO arrays for P1 elements."""
    p0 = points[:, 0, :]
    p1 = points[:, 1, :]
    p2 = points[:, 2, :]
    b = np.stack(
        [p1[:, 1] - p2[:, 1], p2[:, 1] - p0[:, 1], p0[:, 1] - p1[:, 1]], axis=1
    )
    c = np.stack(
        [p2[:, 0] - p1[:, 0], p0[:, 0] - p2[:, 0], p1[:, 0] - p0[:, 0]], axis=1
    )
    area = 0.5 * (b[:, 0] * c[:, 1] - b[:, 1] * c[:, 0])
    if np.any(area <= 0.0):
        raise MeshError("non-positive triangle area during assembly")
    k_loc = (
        b[:, :, None] * b[:, None, :] + c[:, :, None] * c[:, None, :]
    ) / (4.0 * area)[:, None, None]
    m_base = (np.ones((3, 3)) + np.eye(3)) / 12.0
    m_loc = area[:, None, None] * m_base[None, :, :]
    rows = np.repeat(tri, 3, axis=1).ravel()
    cols = np.tile(tri, (1, 3)).ravel()
    k = coo_matrix((k_loc.ravel(), (rows, cols)), shape=(n_dofs, n_dofs))
    m = coo_matrix((m_loc.ravel(), (rows, cols)), shape=(n_dofs, n_dofs))
    return k.tocsr(), m.tocsr()


def assemble(mesh, omega, dirichlet=True):
    """Assemble the discrete form for coupling strength omega.

    Parameters
    ----------
    mesh : InterfaceMesh
    omega : float
        Coupling strength (> 0 for the attractive problem).
    dirichlet : bool
        Eliminate the truncation-circle dofs (default).  With False
        the outer boundary is left natural, which brackets the
        truncation error from the other side.

    Returns
    -------
    DiscreteForm
    """
    n_if = len(mesh.interface_pairs)
    n_nodes = len(mesh.nodes)
    tri_pts = mesh.nodes[mesh.triangles]
    grad, mass = _p1_matrices(tri_pts, mesh.dof_triangles, mesh.n_dofs)

    # jump term: exact edge-mass matrix of the linear trace difference
    # on each interface segment, expanded to the four touching dofs
    nxt = (np.arange(n_if) + 1) % n_if
    p = mesh.nodes[:n_if]
    ell = np.linalg.norm(p[nxt] - p, axis=1)
    interface_length = float(ell.sum())
    dofs = np.stack(
        [
            np.arange(n_if),
            nxt,
            n_nodes + np.arange(n_if),
            n_nodes + nxt,
        ],
        axis=1,
    )
    base = np.array(
        [
            [2.0, 1.0, -2.0, -1.0],
            [1.0, 2.0, -1.0, -2.0],
            [-2.0, -1.0, 2.0, 1.0],
            [-1.0, -2.0, 1.0, 2.0],
        ]
    )
    j_loc = (-omega / 6.0) * ell[:, None, None] * base[None, :, :]
    rows = np.repeat(dofs, 4, axis=1).ravel()
    cols = np.tile(dofs, (1, 4)).ravel()
    jump = coo_matrix(
        (j_loc.ravel(), (rows, cols)), shape=(mesh.n_dofs, mesh.n_dofs)
    ).tocsr()

    stiffness = grad + jump
    if dirichlet:
        eliminated = np.zeros(mesh.n_dofs, dtype=bool)
        eliminated[mesh.outer_boundary_nodes] = True
        free = np.flatnonzero(~eliminated)
    else:
        free = np.arange(mesh.n_dofs)
    stiffness = stiffness[free][:, free].tocsr()
    mass = mass[free][:, free].tocsr()
    jump = jump[free][:, free].tocsr()
    return DiscreteForm(
        stiffness=stiffness,
        mass=mass,
        jump_term=jump,
        free=free,
        n_dofs_full=mesh.n_dofs,
        omega=float(omega),
        interface_length=interface_length,
        dof_side=mesh.dof_side[free],
    )
