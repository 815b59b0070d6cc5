from .models import EigenResult, ScalarEigenResult, SolverOptions
from .projection import optimal_rescale, shift_constant
from .scalar import (
    scalar_dirichlet_eig,
    scalar_neumann_eig,
    solve_scalar_dirichlet,
    solve_scalar_neumann,
    system_reductions,
)
from .solver import euler_lagrange_residual, solve_first_eigenpair

__all__ = [
    'EigenResult',
    'ScalarEigenResult',
    'SolverOptions',
    'euler_lagrange_residual',
    'optimal_rescale',
    'scalar_dirichlet_eig',
    'scalar_neumann_eig',
    'shift_constant',
    'solve_first_eigenpair',
    'solve_scalar_dirichlet',
    'solve_scalar_neumann',
    'system_reductions',
]
