"""
Closed-form limit values on the disk and the rectangle.

All products of powers are evaluated as sums of logarithms, so extreme
exponents neither overflow nor underflow before the final exponential.
"""
import math

import structlog

from apps.core.exceptions import ValidationError

from .models import AnsatzConfig, RectangleValue

logger = structlog.get_logger(__name__)


def _require_rectangle(s):
    if s.L is None:
        raise ValidationError({'L': 'a rectangle spec needs the half-height L'})


def log_lambda_inf_ball(s):
    """log of the limit value on the disk of radius s.R."""
    mix = s.mix
    return (
        s.gamma * (math.log(mix) - math.log(s.gamma) - math.log(s.R))
        + s.plane_power * (math.log(mix) - math.log(s.plane_power) - math.log(s.R))
    )


def lambda_inf_ball(s):
    """
    Limit of lambda^(1/p) on the disk of radius R:

        ((gamma + Q(1-gamma)) / (gamma R))^gamma
        * ((gamma + Q(1-gamma)) / (Q(1-gamma) R))^((1-gamma) Q)
    """
    return math.exp(log_lambda_inf_ball(s))


def paper_threshold(s):
    """Half-height from which the rectangle takes the disk value."""
    return s.gamma * s.R / s.plane_power


def construction_threshold(s):
    """Radius of the optimal cone of the disk construction, gamma R / (gamma + Q(1-gamma))."""
    return s.gamma * s.R / s.mix


def lambda_inf_rectangle(s):
    """
    Two-branch limit value on (-R, R) x (-L, L).

    Branch 1 (gamma R / (Q(1-gamma)) <= L) is the disk value of radius R;
    branch 2 is 1 / ((R-L)^gamma L^(1-gamma)), infinite when L = R.

    Returns:
        RectangleValue with the value, the branch and both thresholds
    """
    _require_rectangle(s)
    threshold = paper_threshold(s)
    if threshold <= s.L:
        branch, value = 1, lambda_inf_ball(s)
    else:
        branch = 2
        gap = s.R - s.L
        if gap <= 0:
            logger.warning("degenerate_rectangle_branch", R=s.R, L=s.L, gamma=s.gamma, Q=s.Q)
            value = math.inf
        else:
            value = math.exp(-(s.gamma * math.log(gap) + (1.0 - s.gamma) * math.log(s.L)))
    return RectangleValue(
        value=value,
        branch=branch,
        paper_threshold=threshold,
        construction_threshold=construction_threshold(s),
    )


def apex_formula_value(s):
    """1 / (L^gamma (R-L)^((1-gamma) Q)), the cone of radius L touching at its apex."""
    _require_rectangle(s)
    gap = s.R - s.L
    if gap <= 0:
        return math.inf
    return math.exp(-(s.gamma * math.log(s.L) + s.plane_power * math.log(gap)))


def optimal_touch_point(s):
    """Abscissa maximizing (R - s)^gamma s^((1-gamma) Q) on [0, R]."""
    return s.plane_power * s.R / s.mix


def ansatz_slopes(s):
    """
    Slopes of the disk cone/plane pair.

    With k1 = k2^Q the two sup-norms in the limit quotient agree, and the
    normalization of the coupling fixes both at the disk value.

    Returns:
        (theta, k1, k2) with theta = k1 / k2^((gamma-1) Q / gamma)
    """
    log_value = log_lambda_inf_ball(s)
    k1 = math.exp(log_value)
    k2 = math.exp(log_value / s.Q)
    theta = math.exp(log_value / s.gamma)
    return theta, k1, k2


def ball_ansatz(s):
    """AnsatzConfig of the disk: one cone of radius R centred at the origin."""
    _, k1, k2 = ansatz_slopes(s)
    return AnsatzConfig(
        a=0.0,
        rho=s.R,
        k1=k1,
        k2=k2,
        M=math.exp(-log_lambda_inf_ball(s)),
        touch_s=optimal_touch_point(s),
    )
