"""
Continuation in p along alpha = gamma p, q = Q p.
"""
import math

import structlog

from apps.core.exceptions import PlqError, SweepAborted
from apps.eigensolver import SolverOptions, solve_first_eigenpair

from .ansatz import check_domain
from .closed_form import lambda_inf_ball, lambda_inf_rectangle
from .models import SweepRow

logger = structlog.get_logger(__name__)

DEFAULT_SCHEDULE = (4.0, 8.0, 16.0, 32.0, 64.0)


def reference_value(s):
    """Closed-form limit of lambda^(1/p) for the domain of s."""
    return lambda_inf_rectangle(s).value if s.is_rectangle else lambda_inf_ball(s)


def continuation_sweep(dom, s, p_schedule=DEFAULT_SCHEDULE, opts=None):
    """
    Solve the coupled problem for every p in p_schedule, warm-starting each
    solve from the previous fields.

    Returns:
        list of SweepRow in schedule order

    Raises:
        UnsupportedExponentsError: some p gives beta <= 1 (checked before any solve)
        SweepAborted: an inner solve failed; carries the rows computed so far
    """
    check_domain(s, dom)
    opts = opts or SolverOptions()
    schedule = [s.exponents(p).require_theory() for p in p_schedule]
    reference = reference_value(s)

    rows = []
    warm = opts.warm_start
    for e in schedule:
        try:
            res = solve_first_eigenpair(dom, e, opts.evolve(warm_start=warm))
        except PlqError as exc:
            logger.error("sweep_aborted", p=e.p, completed=len(rows), error=str(exc))
            raise SweepAborted(rows, e.p, exc) from exc

        rel_gap = None
        if math.isfinite(reference):
            rel_gap = abs(res.lambda_root_p - reference) / reference
        row = SweepRow(
            p=e.p,
            q=e.q,
            alpha=e.alpha,
            beta=e.beta,
            eigenvalue=res.eigenvalue,
            lambda_root_p=res.lambda_root_p,
            reference=reference if math.isfinite(reference) else None,
            rel_gap=rel_gap,
            iterations=res.iterations,
            converged=res.converged,
            stalled=res.stalled,
        )
        rows.append(row)
        warm = res.fields
        logger.info(
            "sweep_row_completed",
            p=row.p,
            lambda_root_p=row.lambda_root_p,
            reference=row.reference,
            rel_gap=row.rel_gap,
            iterations=row.iterations,
            stalled=row.stalled,
        )
    return rows
