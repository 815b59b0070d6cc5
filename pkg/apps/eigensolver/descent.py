"""
Preconditioned projected descent on a QuotientProblem.

Each step solves K d = -r block by block (K the problem curvature, r the
Euler-Lagrange residual), moves along d, maps the trial back onto the
admissible set and accepts it only if the quotient strictly decreases.
"""
import math
from typing import NamedTuple

import numpy as np
import structlog
from scipy import sparse
from scipy.sparse.linalg import splu

from apps.calculus.logmath import safe_exp
from apps.core.exceptions import PlqError, StagnationError

logger = structlog.get_logger(__name__)

# Mass shift added to blocks whose constant mode is free, relative to the mean curvature
CONSTANT_MODE_SHIFT = 1e-8


class DescentOutcome(NamedTuple):
    fields: dict
    log_quotient: float
    history: tuple
    iterations: int
    grad_norm: float
    duals: dict
    converged: bool
    stalled: bool


def preconditioned_directions(problem, fields, lam):
    """
    Descent directions and residual dual norms of every block.

    Returns:
        (directions, duals): directions are full grids; duals[name] = r . K^-1 r,
        plus <r, 1>^2 / (lam |Omega|) for blocks whose constant mode is free
    """
    dom = problem.dom
    residuals = problem.residuals(fields, lam)
    curvatures = problem.curvature(fields, lam)
    directions, duals = {}, {}
    for name in problem.names:
        index = np.flatnonzero(problem.unknowns[name].ravel())
        r = residuals[name].ravel()[index]
        K = curvatures[name].tocsr()[index][:, index]
        constant_term = 0.0
        if name in problem.constant_blocks:
            mass = dom.node_weights.ravel()[index]
            total = float(r.sum())
            constant_term = total**2 / (lam * mass.sum())
            r = r - mass * (total / mass.sum())
            shift = CONSTANT_MODE_SHIFT * K.diagonal().mean() / mass.mean()
            K = K + sparse.diags(shift * mass)
        try:
            d = splu(K.tocsc()).solve(-r)
        except RuntimeError as exc:
            raise StagnationError(
                f'curvature of block {name!r} is singular', {'block': name, 'reason': str(exc)}
            ) from exc
        step = np.zeros(dom.ny * dom.nx)
        step[index] = d
        directions[name] = step.reshape(dom.shape)
        duals[name] = max(float(-r @ d), 0.0) + constant_term
    return directions, duals


class ProjectedDescent:
    """Monotone descent of a quotient problem under SolverOptions."""

    def __init__(self, problem, opts):
        self.problem = problem
        self.opts = opts

    def _line_search(self, fields, log_quotient, directions, step):
        t = step
        for _ in range(self.opts.max_backtracks):
            trial = {name: fields[name] + t * directions[name] for name in self.problem.names}
            try:
                trial = self.problem.project(trial)
                log_trial = self.problem.log_quotient(trial)
            except PlqError:
                log_trial = math.inf
            if log_trial < log_quotient:
                return trial, log_trial, t
            t *= self.opts.backtrack_factor
        return None

    def run(self, fields):
        opts = self.opts
        fields = self.problem.project(fields)
        log_quotient = self.problem.log_quotient(fields)
        history = [safe_exp(log_quotient, 'quotient')]
        step = opts.step0
        iterations = 0
        converged = stalled = False

        while True:
            lam = history[-1]
            directions, duals = preconditioned_directions(self.problem, fields, lam)
            grad_norm = math.sqrt(sum(duals.values()) / lam)
            if grad_norm <= opts.tol_grad:
                defect = self.problem.constraint_defect(fields)
                converged = defect <= opts.tol_constraint
                if not converged:
                    logger.warning(
                        "constraint_not_met",
                        iteration=iterations,
                        constraint_defect=defect,
                        tol_constraint=opts.tol_constraint,
                    )
                break
            if iterations >= opts.max_iter:
                break

            accepted = self._line_search(fields, log_quotient, directions, step)
            if accepted is None:
                if grad_norm <= opts.stall_threshold:
                    stalled = True
                    logger.warning("descent_stalled", iteration=iterations, grad_norm=grad_norm)
                    break
                diagnostics = {
                    'iteration': iterations,
                    'lambda': lam,
                    'grad_norm': grad_norm,
                    'step': step,
                    'backtracks': opts.max_backtracks,
                }
                logger.warning("line_search_exhausted", **diagnostics)
                raise StagnationError(
                    f'no quotient decrease after {opts.max_backtracks} backtracks '
                    f'(iteration {iterations}, grad_norm {grad_norm:.3e})',
                    diagnostics,
                )

            fields, log_quotient, t = accepted
            iterations += 1
            history.append(safe_exp(log_quotient, 'quotient'))
            step = min(opts.step0, t / opts.backtrack_factor)
            logger.debug(
                "solver_iteration",
                iteration=iterations,
                quotient=history[-1],
                grad_norm=grad_norm,
                step=t,
            )

        return DescentOutcome(
            fields=fields,
            log_quotient=log_quotient,
            history=tuple(history),
            iterations=iterations,
            grad_norm=grad_norm,
            duals=duals,
            converged=converged,
            stalled=stalled,
        )
