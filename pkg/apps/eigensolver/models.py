"""
Solver options and eigen-results.
"""
import math
import numbers
from dataclasses import dataclass, replace

from apps.calculus.models import Exponents, FieldPair
from apps.core.exceptions import ValidationError


@dataclass(frozen=True, eq=False)
class SolverOptions:
    """
    Controls for the projected descent.

    stall_tol: a line search that fails once the gradient norm is below this
        value ends the run as stalled instead of raising StagnationError;
        None means 10 * tol_grad.
    hessian_floor: relative floor on the |grad f|^(p-2) curvature weights.
    noise: relative amplitude of the seeded perturbation of cold starts.
    """

    max_iter: int = 5000
    tol_grad: float = 1e-6
    tol_constraint: float = 1e-8
    step0: float = 1.0
    backtrack_factor: float = 0.5
    seed: int = 0
    warm_start: FieldPair | None = None
    max_backtracks: int = 40
    hessian_floor: float = 1e-10
    stall_tol: float | None = None
    noise: float = 1e-2

    def __post_init__(self):
        errors = {}
        for name in ('max_iter', 'max_backtracks'):
            value = getattr(self, name)
            if isinstance(value, bool) or not isinstance(value, numbers.Integral) or value < 1:
                errors[name] = f'must be a positive integer (got {value!r})'
        for name in ('tol_grad', 'tol_constraint', 'step0', 'hessian_floor', 'stall_tol'):
            value = getattr(self, name)
            if name == 'stall_tol' and value is None:
                continue
            if not isinstance(value, numbers.Real) or not math.isfinite(value) or value <= 0:
                errors[name] = f'must be a finite number > 0 (got {value!r})'
        factor = self.backtrack_factor
        if not isinstance(factor, numbers.Real) or not 0 < factor < 1:
            errors['backtrack_factor'] = f'must lie in (0, 1) (got {factor!r})'
        if not isinstance(self.noise, numbers.Real) or not 0 <= self.noise < 1:
            errors['noise'] = f'must lie in [0, 1) (got {self.noise!r})'
        seed = self.seed
        if isinstance(seed, bool) or not isinstance(seed, numbers.Integral) or seed < 0:
            errors['seed'] = f'must be a non-negative integer (got {self.seed!r})'
        if errors:
            raise ValidationError(errors)

    @property
    def stall_threshold(self):
        return 10.0 * self.tol_grad if self.stall_tol is None else self.stall_tol

    def evolve(self, **changes):
        return replace(self, **changes)


@dataclass(frozen=True, eq=False)
class EigenResult:
    """
    Output of the coupled solver.

    fields are normalized to unit coupling and satisfy the sign-balance
    constraint; quotient_history holds the eigenvalue estimate after every
    accepted step, starting with the projected initial guess.
    """

    eigenvalue: float
    lambda_root_p: float
    log_lambda: float
    fields: FieldPair
    exponents: Exponents
    iterations: int
    quotient_history: tuple
    constraint_residual: float
    el_residual_u: float
    el_residual_v: float
    grad_norm: float
    balance_defect: float
    converged: bool
    stalled: bool
    cold_start: bool

    def summary(self):
        return {
            'lambda': self.eigenvalue,
            'lambda_root_p': self.lambda_root_p,
            'iterations': self.iterations,
            'constraint_residual': self.constraint_residual,
            'el_residual_u': self.el_residual_u,
            'el_residual_v': self.el_residual_v,
            'grad_norm': self.grad_norm,
            'balance_defect': self.balance_defect,
            'converged': self.converged,
            'stalled': self.stalled,
            'cold_start': self.cold_start,
        }


@dataclass(frozen=True, eq=False)
class ScalarEigenResult:
    """Output of the scalar Dirichlet or Neumann solver."""

    kind: str
    exponent: float
    eigenvalue: float
    values: object
    iterations: int
    quotient_history: tuple = ()
    constraint_residual: float = 0.0
    grad_norm: float = math.nan
    converged: bool = False
    stalled: bool = False

    @property
    def root(self):
        """eigenvalue^(1/exponent)."""
        return math.exp(math.log(self.eigenvalue) / self.exponent)

    def summary(self):
        return {
            'kind': self.kind,
            'exponent': self.exponent,
            'lambda': self.eigenvalue,
            'lambda_root': self.root,
            'iterations': self.iterations,
            'constraint_residual': self.constraint_residual,
            'grad_norm': self.grad_norm,
            'converged': self.converged,
            'stalled': self.stalled,
        }
