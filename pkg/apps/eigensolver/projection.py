"""
Projections onto the admissible set: the shift constant and the optimal rescaling.
"""
import math

import numpy as np
import structlog
from scipy.optimize import brentq

from apps.calculus.energy import log_coupling, log_energy_terms, require_constraint_exponent
from apps.calculus.logmath import log_abs
from apps.core.exceptions import AdmissibilityError, DegenerateFieldError, ShiftError

logger = structlog.get_logger(__name__)


def balancing_shift(values, log_base, exponent):
    """
    Root K of sum(exp(log_base) |values - K|^(exponent-2) (values - K)) = 0.

    The sum is strictly decreasing in K, positive at min(values) and negative
    at max(values), so the root is unique and bracketed. Terms are rescaled by
    their largest magnitude before summing, which keeps the sign exact for
    large exponents.

    Args:
        values: Node values of the shifted field
        log_base: Log weights of the nodes (-inf drops a node)
        exponent: Power of the balance (> 1)

    Raises:
        ShiftError: every weight vanishes
    """
    keep = log_base > -np.inf
    if not keep.any():
        raise ShiftError('weights vanish identically; the shift constant is undefined')
    values = np.asarray(values, dtype=float)[keep]
    log_base = np.asarray(log_base, dtype=float)[keep]
    low, high = float(values.min()), float(values.max())
    if low == high:
        return low

    def balance(shift):
        offset = values - shift
        log_terms = log_base + (exponent - 1.0) * log_abs(offset)
        peak = np.max(log_terms)
        return float(np.sum(np.sign(offset) * np.exp(log_terms - peak)))

    scale = max(abs(low), abs(high))
    return float(brentq(balance, low, high, xtol=1e-15 * scale, rtol=4 * np.finfo(float).eps))


def shift_constant(fp, e, dom):
    """
    The constant K making (u, v - K) satisfy int |u|^alpha |v - K|^(beta-2) (v - K) = 0.

    Raises:
        UnsupportedExponentsError: beta <= 1
        ShiftError: u vanishes identically
    """
    require_constraint_exponent(e)
    active = dom.active_mask
    u = np.asarray(dom.check_field(fp.u, 'u'), dtype=float)[active]
    v = np.asarray(dom.check_field(fp.v, 'v'), dtype=float)[active]
    if not np.any(u != 0):
        raise ShiftError('u vanishes identically; the shift constant is undefined')
    log_base = np.log(dom.node_weights[active]) + e.alpha * log_abs(u)
    shift = balancing_shift(v, log_base, e.beta)
    logger.debug("shift_constant_found", shift=shift, beta=e.beta)
    return shift


def optimal_log_scales(log_a, log_b, log_c, e):
    """
    Logs of the factors (a, b) minimizing a^p A + b^q B subject to a^alpha b^beta C = 1.

    Stationarity gives p a^p A = theta alpha and q b^q B = theta beta, with theta
    fixed by the constraint since alpha/p + beta/q = 1.
    """
    la = math.log(e.alpha) - math.log(e.p) - log_a
    lb = math.log(e.beta) - math.log(e.q) - log_b
    log_theta = -log_c - (e.alpha / e.p) * la - (e.beta / e.q) * lb
    return (log_theta + la) / e.p, (log_theta + lb) / e.q


def _checked_logs(fp, e, dom):
    log_a, log_b = log_energy_terms(fp, e, dom)
    if log_a == -np.inf:
        raise DegenerateFieldError('u')
    if log_b == -np.inf:
        raise DegenerateFieldError('v')
    log_c = log_coupling(fp, e, dom)
    if log_c == -np.inf:
        raise AdmissibilityError('coupling integral vanishes; the pair cannot be rescaled')
    return log_a, log_b, log_c


def optimal_rescale(fp, e, dom):
    """
    Factors (a, b) that normalize the coupling to 1 with the least energy.

    Raises:
        DegenerateFieldError: a component has zero gradient energy
        AdmissibilityError: the coupling vanishes
    """
    log_a, log_b = optimal_log_scales(*_checked_logs(fp, e, dom), e)
    return math.exp(log_a), math.exp(log_b)


def rescale_pair(fp, e, dom):
    log_a, log_b = optimal_log_scales(*_checked_logs(fp, e, dom), e)
    return fp.scaled(math.exp(log_a), math.exp(log_b))


def energy_balance_defect(fp, e, dom):
    """|beta p A - alpha q B| / (beta p A + alpha q B); zero at a rescaled pair."""
    log_a, log_b = log_energy_terms(fp, e, dom)
    first = math.log(e.beta * e.p) + log_a
    second = math.log(e.alpha * e.q) + log_b
    if first == second == -np.inf:
        return 0.0
    total = np.logaddexp(first, second)
    return abs(math.exp(first - total) - math.exp(second - total))


def project_pair(fp, e, dom):
    """Shift v onto the sign-balance constraint, then rescale to unit coupling."""
    u = np.where(dom.boundary_mask, 0.0, fp.u)
    shifted = fp.with_fields(u=u, v=fp.v - shift_constant(fp.with_fields(u=u), e, dom))
    return rescale_pair(shifted, e, dom)
