"""
Pointwise residuals of the strong-form limit and finite-exponent operators.

Interior residuals are evaluated on nodes whose whole 3x3 stencil is
interior. Boundary nodes carry both the boundary condition of the component
(u = 0 for the Dirichlet field, <grad v, n> for the Neumann field) and the
interior operator from a one-sided quadratic fit; the residual field holds
whichever of the two is smaller in magnitude.
Interior nodes are tagged by the sign of v, with |v| <= DEADBAND h ||grad v||
counted as v = 0, and nodes closer than excluded_radius to the singular set
are left out of sup_defect.
"""
import math
import numbers
from typing import NamedTuple

import numpy as np
import structlog

from apps.calculus.operators import gradient_field, second_derivatives
from apps.core.exceptions import ValidationError

from .models import RegionTag, ResidualReport

logger = structlog.get_logger(__name__)

DEADBAND = 2.0
# Default exclusion radius around the singular set, in grid spacings
EXCLUSION_SPACINGS = 3.0

_INTERIOR_TAGS = (RegionTag.V_POS, RegionTag.V_NEG, RegionTag.V_ZERO)


def _check_parameter(name, value):
    is_real = isinstance(value, numbers.Real) and not isinstance(value, bool)
    if not is_real or not math.isfinite(value) or value < 0:
        raise ValidationError({name: f'must be a finite number >= 0 (got {value!r})'})
    return float(value)


def _field(dom, f, name):
    return np.where(dom.domain_mask, np.asarray(dom.check_field(f, name), dtype=float), 0.0)


def _log(x):
    with np.errstate(divide='ignore'):
        return np.log(np.abs(x))


def _deadband(v, dom):
    grad_v = np.linalg.norm(gradient_field(v, dom), axis=-1)
    return DEADBAND * dom.h * float(np.max(grad_v[dom.domain_mask], initial=0.0))


def region_tags(v, dom, singular=None, excluded_radius=None):
    """Per-node RegionTag codes (int8 array) and the radius actually used."""
    v = _field(dom, v, 'v')
    radius = EXCLUSION_SPACINGS * dom.h if excluded_radius is None else excluded_radius
    band = _deadband(v, dom)

    tags = np.full(dom.shape, RegionTag.OUTSIDE, dtype=np.int8)
    tags[dom.boundary_mask] = RegionTag.BOUNDARY
    interior = dom.deep_interior_mask
    tags[interior & (v > band)] = RegionTag.V_POS
    tags[interior & (v < -band)] = RegionTag.V_NEG
    tags[interior & (np.abs(v) <= band)] = RegionTag.V_ZERO
    tags[dom.interior_mask & ~interior] = RegionTag.EXCLUDED
    if singular is not None:
        near = singular.distance(dom.X, dom.Y) <= radius
        tags[dom.interior_mask & near] = RegionTag.EXCLUDED
    return tags, radius


def _sup(values):
    """Largest finite |value|, NaN when there is none."""
    values = np.abs(values[np.isfinite(values)])
    return float(values.max()) if values.size else math.nan


def _report(
    operator, interior, boundary, at_boundary, v, dom, singular, excluded_radius, extras=None
):
    """
    Assemble a ResidualReport.

    interior and at_boundary hold the operator on stencil nodes and on boundary
    nodes; boundary holds the boundary condition.
    """
    tags, radius = region_tags(v, dom, singular, excluded_radius)
    edge = dom.boundary_mask
    defined = dom.deep_interior_mask & np.isfinite(interior)
    residual = np.full(dom.shape, np.nan)
    residual[defined] = interior[defined]
    with np.errstate(invalid='ignore'):
        smaller = np.where(np.abs(at_boundary) <= np.abs(boundary), at_boundary, boundary)
    residual[edge] = smaller[edge]
    operator_field = np.full(dom.shape, np.nan)
    operator_field[edge] = at_boundary[edge]

    counted = defined & np.isin(tags, _INTERIOR_TAGS)
    sup_defect = _sup(residual[counted])
    boundary_defect = float(np.max(np.abs(boundary[edge]), initial=0.0))
    logger.debug(
        "residual_evaluated",
        operator=operator,
        sup_defect=sup_defect,
        boundary_defect=boundary_defect,
        excluded_radius=radius,
    )
    return ResidualReport(
        operator=operator,
        residual_field=residual,
        defined_mask=defined | edge,
        region_tags=tags,
        sup_defect=sup_defect,
        boundary_defect=boundary_defect,
        excluded_radius=radius,
        extras=dict(extras or {}),
        boundary_operator_field=operator_field,
        boundary_operator_defect=_sup(at_boundary[edge]),
        boundary_min_defect=_sup(smaller[edge]),
    )


class _Derivatives(NamedTuple):
    grad: np.ndarray
    laplacian: np.ndarray
    infinity: np.ndarray


def _derivatives(f, dom):
    d = second_derivatives(f, dom)
    infinity = d.fx**2 * d.fxx + 2.0 * d.fx * d.fy * d.fxy + d.fy**2 * d.fyy
    return _Derivatives(np.hypot(d.fx, d.fy), d.fxx + d.fyy, infinity)


def _boundary_derivatives(f, dom, reach=2):
    """
    Derivatives at boundary nodes from a least-squares quadratic through the
    domain nodes within reach grid steps. NaN off the boundary and where the
    fit is rank deficient.
    """
    out = np.full((3,) + dom.shape, np.nan)
    mask = dom.domain_mask
    for j, i in zip(*np.nonzero(dom.boundary_mask), strict=True):
        rows = slice(max(j - reach, 0), j + reach + 1)
        cols = slice(max(i - reach, 0), i + reach + 1)
        near = mask[rows, cols]
        dx = (dom.X[rows, cols] - dom.X[j, i])[near]
        dy = (dom.Y[rows, cols] - dom.Y[j, i])[near]
        design = np.column_stack([np.ones_like(dx), dx, dy, 0.5 * dx**2, dx * dy, 0.5 * dy**2])
        coef, _, rank, _ = np.linalg.lstsq(design, f[rows, cols][near], rcond=None)
        if rank < design.shape[1]:
            continue
        _, fx, fy, fxx, fxy, fyy = coef
        infinity = fx**2 * fxx + 2.0 * fx * fy * fxy + fy**2 * fyy
        out[:, j, i] = math.hypot(fx, fy), fxx + fyy, infinity
    return _Derivatives(*out)


def _normal_derivative(v, dom):
    return np.sum(gradient_field(v, dom) * dom.normals, axis=-1)


def _log_coefficient(log_scale, terms):
    """log_scale + sum(power * log|x|), -inf wherever a factor vanishes."""
    with np.errstate(invalid='ignore'):
        total = np.full_like(terms[0][1], log_scale, dtype=float)
        for power, values in terms:
            log_values = _log(values)
            total = total + np.where(np.isneginf(log_values), -np.inf, power * log_values)
    return total


def h_infinity_residual(u, v, Lambda, s, dom, singular=None, excluded_radius=None):
    """
    min(-Delta_inf u, |grad u| - Lambda u^gamma |v|^((1-gamma) Q)) on interior nodes.

    The boundary condition is u itself.
    """
    Lambda = _check_parameter('Lambda', Lambda)
    u = _field(dom, u, 'u')
    v = _field(dom, v, 'v')
    log_Lambda = -np.inf if Lambda == 0 else math.log(Lambda)
    term = np.exp(_log_coefficient(log_Lambda, [(s.gamma, u), (s.plane_power, v)]))

    def operator(d):
        with np.errstate(invalid='ignore'):
            return np.minimum(-d.infinity, d.grad - term)

    return _report(
        'h_infinity',
        operator(_derivatives(u, dom)),
        np.abs(u),
        operator(_boundary_derivatives(u, dom)),
        v,
        dom,
        singular,
        excluded_radius,
    )


def f_infinity_residual(v, u, Lambda, s, dom, singular=None, excluded_radius=None):
    """
    Three-region limit operator of the Neumann component.

    With T = Lambda^(1/Q) u^(gamma/Q) |v|^(1-gamma):
    min(-Delta_inf v, |grad v| - T) where v > 0, max(-Delta_inf v, -|grad v| + T)
    where v < 0 and -Delta_inf v where v = 0. The boundary condition is <grad v, n>.
    """
    Lambda = _check_parameter('Lambda', Lambda)
    u = _field(dom, u, 'u')
    v = _field(dom, v, 'v')
    log_Lambda = -np.inf if Lambda == 0 else math.log(Lambda) / s.Q
    term = np.exp(_log_coefficient(log_Lambda, [(s.gamma / s.Q, u), (1.0 - s.gamma, v)]))
    band = _deadband(v, dom)

    def operator(d):
        with np.errstate(invalid='ignore'):
            return np.where(
                v > band,
                np.minimum(-d.infinity, d.grad - term),
                np.where(v < -band, np.maximum(-d.infinity, -d.grad + term), -d.infinity),
            )

    return _report(
        'f_infinity',
        operator(_derivatives(v, dom)),
        _normal_derivative(v, dom),
        operator(_boundary_derivatives(v, dom)),
        v,
        dom,
        singular,
        excluded_radius,
    )


def _signed_pair_sum(log_a, sign_a, log_b, sign_b):
    """Per-node (log|A + B|, sign(A + B)) for A = sign_a e^log_a and B = sign_b e^log_b."""
    with np.errstate(invalid='ignore', over='ignore'):
        top = np.maximum(log_a, log_b)
        finite = np.isfinite(top)
        shifted = np.where(finite, top, 0.0)
        total = sign_a * np.exp(log_a - shifted) + sign_b * np.exp(log_b - shifted)
        total = np.where(finite, total, 0.0)
    with np.errstate(divide='ignore'):
        return np.where(finite, shifted + np.log(np.abs(total)), -np.inf), np.sign(total)


def _power_operator(d, power, log_source, source_sign):
    """
    -|grad f|^(power-4) (|grad f|^2 Delta f + (power-2) Delta_inf f) - source,
    reported as sign * |.|^(1/power). NaN where |grad f| = 0 and power < 4.
    """
    bracket = d.grad**2 * d.laplacian + (power - 2.0) * d.infinity
    log_grad = _log(d.grad)
    with np.errstate(invalid='ignore'):
        if power == 4.0:
            log_weight = np.zeros_like(d.grad)
        else:
            log_weight = np.where(np.isneginf(log_grad), -np.inf, (power - 4.0) * log_grad)
        if power < 4.0:
            log_weight = np.where(d.grad == 0, np.nan, log_weight)
    log_value, sign = _signed_pair_sum(
        log_weight + _log(bracket), -np.sign(bracket), log_source, -source_sign
    )
    with np.errstate(invalid='ignore', over='ignore'):
        return np.where(np.isnan(log_weight), np.nan, sign * np.exp(log_value / power))


def _check_power(name, value):
    if value < 2:
        raise ValidationError({name: f'must be >= 2 for the strong form (got {value!r})'})


def h_p_residual(u, v, lam, e, dom, singular=None, excluded_radius=None):
    """
    Strong form of the u equation at finite exponents:
    -|grad u|^(p-4) (|grad u|^2 Delta u + (p-2) Delta_inf u) - alpha lam |u|^(alpha-2) u |v|^beta,
    evaluated in the log domain and reported as sign * |.|^(1/p).
    """
    _check_power('p', e.p)
    lam = _check_parameter('lam', lam)
    u = _field(dom, u, 'u')
    v = _field(dom, v, 'v')
    log_lam = -np.inf if lam == 0 else math.log(lam)
    log_source = _log_coefficient(log_lam + math.log(e.alpha), [(e.alpha - 1.0, u), (e.beta, v)])
    return _report(
        'h_p',
        _power_operator(_derivatives(u, dom), e.p, log_source, np.sign(u)),
        np.abs(u),
        _power_operator(_boundary_derivatives(u, dom), e.p, log_source, np.sign(u)),
        v,
        dom,
        singular,
        excluded_radius,
        {'exponent': e.p},
    )


def f_q_residual(v, u, lam, e, dom, singular=None, excluded_radius=None):
    """
    Strong form of the v equation at finite exponents:
    -|grad v|^(q-4) (|grad v|^2 Delta v + (q-2) Delta_inf v) - beta lam |u|^alpha |v|^(beta-2) v,
    reported as sign * |.|^(1/q). The boundary condition is <grad v, n>.
    """
    _check_power('q', e.q)
    lam = _check_parameter('lam', lam)
    u = _field(dom, u, 'u')
    v = _field(dom, v, 'v')
    log_lam = -np.inf if lam == 0 else math.log(lam)
    log_source = _log_coefficient(log_lam + math.log(e.beta), [(e.alpha, u), (e.beta - 1.0, v)])
    return _report(
        'f_q',
        _power_operator(_derivatives(v, dom), e.q, log_source, np.sign(v)),
        _normal_derivative(v, dom),
        _power_operator(_boundary_derivatives(v, dom), e.q, log_source, np.sign(v)),
        v,
        dom,
        singular,
        excluded_radius,
        {'exponent': e.q},
    )
