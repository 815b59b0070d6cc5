"""
First nontrivial eigenpair of the coupled system and its Euler-Lagrange residual.
"""
import math

import numpy as np
import structlog

from apps.calculus.energy import DEFAULT_HESSIAN_FLOOR, constraint_value
from apps.calculus.models import FieldPair
from apps.geometry import distance_to_boundary

from .descent import ProjectedDescent, preconditioned_directions
from .models import EigenResult, SolverOptions
from .problems import CoupledProblem
from .projection import energy_balance_defect

logger = structlog.get_logger(__name__)


def seeded_noise(dom, opts):
    """Two uniform perturbation fields of amplitude opts.noise, reproducible from opts.seed."""
    rng = np.random.default_rng(opts.seed)
    return opts.noise * rng.uniform(-1.0, 1.0, size=(2,) + dom.shape)


def initial_pair(dom, opts):
    """
    Starting fields: the warm start when given, otherwise the distance to the
    boundary for u and the x coordinate for v, both perturbed by seeded noise.
    """
    if opts.warm_start is not None:
        warm = opts.warm_start
        return FieldPair(
            u=np.array(dom.check_field(warm.u, 'warm_start.u'), dtype=float),
            v=np.array(dom.check_field(warm.v, 'warm_start.v'), dtype=float),
        )
    u_noise, v_noise = seeded_noise(dom, opts)
    u = distance_to_boundary(dom) * (1.0 + u_noise)
    x = np.where(dom.domain_mask, dom.X, 0.0)
    v = x + np.max(np.abs(x)) * v_noise
    return FieldPair(u=u, v=np.where(dom.domain_mask, v, 0.0))


def probe_node(dom):
    """Node nearest (R/2, 0), where v is made non-negative."""
    return dom.nearest_node(dom.R / 2.0, 0.0)


def oriented(field, dom):
    return -field if field[probe_node(dom)] < 0 else field


def solve_first_eigenpair(dom, e, opts=None):
    """
    Minimize the coupled Rayleigh quotient over the admissible set.

    Args:
        dom: GridDomain
        e: Exponents with beta > 1
        opts: SolverOptions (defaults when omitted)

    Returns:
        EigenResult with unit coupling and a balanced shift

    Raises:
        UnsupportedExponentsError: beta <= 1
        StagnationError: the line search failed above the stall tolerance
    """
    opts = opts or SolverOptions()
    e.require_theory()
    if not e.dimension_flag:
        logger.info("dimension_flag_unset", p=e.p, q=e.q)

    problem = CoupledProblem(dom, e, opts.hessian_floor)
    start = initial_pair(dom, opts)
    logger.info(
        "solver_started",
        domain=dom.kind.value,
        shape=dom.shape,
        cold_start=opts.warm_start is None,
        **e.as_dict(),
    )
    outcome = ProjectedDescent(problem, opts).run({'u': start.u, 'v': start.v})

    fields = FieldPair(u=outcome.fields['u'], v=oriented(outcome.fields['v'], dom))
    eigenvalue = outcome.history[-1]
    result = EigenResult(
        eigenvalue=eigenvalue,
        lambda_root_p=math.exp(outcome.log_quotient / e.p),
        log_lambda=outcome.log_quotient,
        fields=fields,
        exponents=e,
        iterations=outcome.iterations,
        quotient_history=outcome.history,
        constraint_residual=abs(constraint_value(fields, e, dom)),
        el_residual_u=math.sqrt(outcome.duals['u'] / eigenvalue),
        el_residual_v=math.sqrt(outcome.duals['v'] / eigenvalue),
        grad_norm=outcome.grad_norm,
        balance_defect=energy_balance_defect(fields, e, dom),
        converged=outcome.converged,
        stalled=outcome.stalled,
        cold_start=opts.warm_start is None,
    )
    logger.info(
        "solver_finished",
        eigenvalue=result.eigenvalue,
        lambda_root_p=result.lambda_root_p,
        iterations=result.iterations,
        grad_norm=result.grad_norm,
        converged=result.converged,
        stalled=result.stalled,
    )
    return result


def euler_lagrange_residual(res, e, dom):
    """
    Dual-norm defect of the weak eigen-equations at res.fields and res.eigenvalue.

    r_u is the largest |<R_u, w>| / ||w||_K over test functions w spanned by
    node hats vanishing on the boundary, R_u the residual of the u equation and
    K the energy curvature; r_v uses hats free on the boundary with the constant
    mode removed, combined with the constant test |<R_v, 1>| / (lambda |Omega|^(1/2)).
    The hat parts are divided by sqrt(lambda).

    Returns:
        (r_u, r_v)
    """
    problem = CoupledProblem(dom, e, DEFAULT_HESSIAN_FLOOR)
    fields = {
        'u': np.asarray(res.fields.u, dtype=float),
        'v': np.asarray(res.fields.v, dtype=float),
    }
    _, duals = preconditioned_directions(problem, fields, res.eigenvalue)
    return (
        math.sqrt(duals['u'] / res.eigenvalue),
        math.sqrt(duals['v'] / res.eigenvalue),
    )


def constant_mode_term(fp, lam, e, dom):
    """<R_v, 1>: the v equation tested with the constant function."""
    problem = CoupledProblem(dom, e)
    residual = problem.residuals({'u': fp.u, 'v': fp.v}, lam)['v']
    return float(residual[dom.active_mask].sum())
