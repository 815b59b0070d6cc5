"""
Scalar Dirichlet and Neumann eigenvalue oracles.

These calibrate the discretization and give the values of the coupled system
in its two degenerate exponent limits.
"""
import math
import numbers

import numpy as np
import structlog

from apps.core.exceptions import ValidationError
from apps.geometry import distance_to_boundary

from .descent import ProjectedDescent
from .models import ScalarEigenResult, SolverOptions
from .problems import DirichletProblem, NeumannProblem, power_balance
from .solver import oriented, seeded_noise

logger = structlog.get_logger(__name__)


def _check_exponent(name, value):
    is_real = isinstance(value, numbers.Real) and not isinstance(value, bool)
    if not is_real or not math.isfinite(value) or value <= 1:
        raise ValidationError({name: f'must be a finite number > 1 (got {value!r})'})
    return float(value)


def _run(problem, start, opts, kind, exponent):
    logger.info("scalar_solver_started", kind=kind, exponent=exponent, shape=problem.dom.shape)
    outcome = ProjectedDescent(problem, opts).run({problem.name: start})
    values = outcome.fields[problem.name]
    eigenvalue = outcome.history[-1]
    logger.info(
        "scalar_solver_finished",
        kind=kind,
        exponent=exponent,
        eigenvalue=eigenvalue,
        iterations=outcome.iterations,
        converged=outcome.converged,
    )
    return outcome, values, eigenvalue


def solve_scalar_dirichlet(dom, p, opts=None):
    """Minimize int |grad u|^p / int |u|^p over u vanishing on the boundary."""
    p = _check_exponent('p', p)
    opts = opts or SolverOptions()
    if opts.warm_start is not None:
        start = np.array(dom.check_field(opts.warm_start.u, 'warm_start.u'), dtype=float)
    else:
        u_noise, _ = seeded_noise(dom, opts)
        start = distance_to_boundary(dom) * (1.0 + u_noise)
    problem = DirichletProblem(dom, p, opts.hessian_floor)
    outcome, values, eigenvalue = _run(problem, start, opts, 'dirichlet', p)
    return ScalarEigenResult(
        kind='dirichlet',
        exponent=p,
        eigenvalue=eigenvalue,
        values=values,
        iterations=outcome.iterations,
        quotient_history=outcome.history,
        grad_norm=outcome.grad_norm,
        converged=outcome.converged,
        stalled=outcome.stalled,
    )


def solve_scalar_neumann(dom, q, opts=None):
    """Minimize int |grad v|^q / int |v|^q over v with int |v|^(q-2) v = 0."""
    q = _check_exponent('q', q)
    opts = opts or SolverOptions()
    if opts.warm_start is not None:
        start = np.array(dom.check_field(opts.warm_start.v, 'warm_start.v'), dtype=float)
    else:
        _, v_noise = seeded_noise(dom, opts)
        x = np.where(dom.domain_mask, dom.X, 0.0)
        start = x + np.max(np.abs(x)) * v_noise
    problem = NeumannProblem(dom, q, opts.hessian_floor)
    outcome, values, eigenvalue = _run(problem, start, opts, 'neumann', q)
    values = oriented(values, dom)
    return ScalarEigenResult(
        kind='neumann',
        exponent=q,
        eigenvalue=eigenvalue,
        values=values,
        iterations=outcome.iterations,
        quotient_history=outcome.history,
        constraint_residual=abs(power_balance(values, q, dom)),
        grad_norm=outcome.grad_norm,
        converged=outcome.converged,
        stalled=outcome.stalled,
    )


def scalar_dirichlet_eig(dom, p, opts=None):
    """First Dirichlet eigenvalue of the p-Laplacian."""
    return solve_scalar_dirichlet(dom, p, opts).eigenvalue


def scalar_neumann_eig(dom, q, opts=None):
    """First nontrivial Neumann eigenvalue of the q-Laplacian."""
    return solve_scalar_neumann(dom, q, opts).eigenvalue


def system_reductions(lambda_d, p, lambda_n, q):
    """
    Values of the coupled system in its degenerate exponent limits.

    With beta = 0 the system reduces to the Dirichlet problem and with alpha = 0
    to the Neumann one, scaled by the exponent. Neither is a nontrivial
    eigenvalue of the system.

    Returns:
        dict with the two reductions and the p-th and q-th roots used by the
        infinity-limit checks
    """
    p = _check_exponent('p', p)
    q = _check_exponent('q', q)
    return {
        'lambda_p_0': lambda_d / p,
        'lambda_0_q': lambda_n / q,
        'dirichlet_root': math.exp(math.log(lambda_d) / p),
        'neumann_root': math.exp(math.log(lambda_n) / q),
    }
