"""Finite elements for the interface eigenproblem.

mesh     boundary-conforming triangulation, duplicated interface dofs
forms    sparse assembly of the broken quadratic form
eigen    lowest eigenpair, convergence studies, exports
"""

from .eigen import convergence_study, error_estimate, lowest_eigenpair, solve_lambda1, solve_with_field, write_eigenpair
from .forms import DiscreteForm, assemble
from .mesh import InterfaceMesh, build_mesh, write_mesh

__all__ = [
    "InterfaceMesh",
    "DiscreteForm",
    "build_mesh",
    "assemble",
    "lowest_eigenpair",
    "solve_lambda1",
    "solve_with_field",
    "error_estimate",
    "convergence_study",
    "write_mesh",
    "write_eigenpair",
]
