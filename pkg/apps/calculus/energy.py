"""
Gradient energies, coupling, sign-balance constraint and the Rayleigh quotient.

Every complete cell carries four corner gradients. The gradient at a corner
uses the two cell edges that meet there and is weighted by a quarter of the
cell area. Affine fields have exact energies and no checkerboard field has
zero energy.
"""
import math
from typing import NamedTuple

import numpy as np
import structlog
from scipy import sparse

from apps.core.exceptions import AdmissibilityError, UnsupportedExponentsError, ValidationError

from .logmath import check_log_scale, log_abs, log_power, log_sum, safe_exp, signed_log_sum

logger = structlog.get_logger(__name__)

# (corner, x partner, x sign, y partner, y sign) as (row, column) offsets inside a cell
CORNERS = (
    ((0, 0), (0, 1), 1.0, (1, 0), 1.0),
    ((0, 1), (0, 0), -1.0, (1, 1), 1.0),
    ((1, 0), (1, 1), 1.0, (0, 0), -1.0),
    ((1, 1), (1, 0), -1.0, (0, 1), -1.0),
)

DEFAULT_HESSIAN_FLOOR = 1e-10


def _cell_view(array, offset):
    dj, di = offset
    ny, nx = array.shape
    return array[dj:dj + ny - 1, di:di + nx - 1]


def _corner_area(dom):
    return dom.hx * dom.hy / 4.0


def _checked(f, dom, name):
    return np.asarray(dom.check_field(f, name), dtype=float)


def cell_gradients(f, dom):
    """
    Corner gradients on every cell.

    Returns:
        (gx, gy), each shaped (4, ny - 1, nx - 1) and zero on incomplete cells
    """
    f = _checked(f, dom, 'f')
    cells = dom.cell_mask
    gx = np.empty((4,) + cells.shape)
    gy = np.empty_like(gx)
    with np.errstate(invalid='ignore'):
        for k, (corner, x_partner, sx, y_partner, sy) in enumerate(CORNERS):
            centre = _cell_view(f, corner)
            gx[k] = sx * (_cell_view(f, x_partner) - centre) / dom.hx
            gy[k] = sy * (_cell_view(f, y_partner) - centre) / dom.hy
    gx[:, ~cells] = 0.0
    gy[:, ~cells] = 0.0
    if not (np.all(np.isfinite(gx)) and np.all(np.isfinite(gy))):
        raise ValidationError({'f': 'contains non-finite values inside the domain'})
    return gx, gy


def log_power_energy(f, p, dom):
    """log of the integral of |grad f|^p / p; -inf for a flat field."""
    gx, gy = cell_gradients(f, dom)
    log_terms = log_power(log_abs(np.hypot(gx, gy))[:, dom.cell_mask], p)
    check_log_scale(log_terms, f'|grad f|^{p:g}')
    total = log_sum(log_terms)
    if total == -np.inf:
        return total
    return total + math.log(_corner_area(dom)) - math.log(p)


def power_energy(f, p, dom):
    """Integral of |grad f|^p / p."""
    return safe_exp(log_power_energy(f, p, dom), 'gradient energy')


def power_energy_gradient(f, p, dom):
    """Derivative of power_energy with respect to every node value."""
    gx, gy = cell_gradients(f, dom)
    log_norm = log_abs(np.hypot(gx, gy))
    check_log_scale(log_power(log_norm, p - 1.0), f'|grad f|^{p - 1.0:g}')
    moving = log_norm > -np.inf
    # |g|^(p-2) g vanishes with g since p > 1
    weight = np.zeros_like(log_norm)
    weight[moving] = np.exp((p - 2.0) * log_norm[moving]) * _corner_area(dom)

    grad = np.zeros(dom.shape)
    for k, (corner, x_partner, sx, y_partner, sy) in enumerate(CORNERS):
        flux_x = sx * weight[k] * gx[k] / dom.hx
        flux_y = sy * weight[k] * gy[k] / dom.hy
        view = _cell_view(grad, x_partner)
        view += flux_x
        view = _cell_view(grad, y_partner)
        view += flux_y
        view = _cell_view(grad, corner)
        view -= flux_x + flux_y
    return grad


def _floored_log_weights(log_norm, cells, p, floor):
    """log |g|^(p-2), clipped to within a factor 1/floor of the weight at max |g|."""
    if p == 2:
        return np.zeros_like(log_norm)
    moving = (log_norm > -np.inf) & cells
    if not moving.any():
        return np.zeros_like(log_norm)
    reference = (p - 2.0) * np.max(log_norm[moving])
    spread = -math.log(floor)
    with np.errstate(invalid='ignore'):
        log_weight = (p - 2.0) * log_norm
    return np.clip(log_weight, reference - spread, reference + spread)


def power_energy_hessian(f, p, dom, floor=DEFAULT_HESSIAN_FLOOR):
    """
    Sparse Hessian of power_energy over all nodes (flattened row-major).

    Corner blocks are |g|^(p-2) (I + (p-2) g g^T / |g|^2). The weights |g|^(p-2)
    are kept within a factor 1/floor of the weight at the largest gradient so
    flat regions do not make the matrix singular.
    """
    gx, gy = cell_gradients(f, dom)
    cells = dom.cell_mask
    norm = np.hypot(gx, gy)
    log_norm = log_abs(norm)
    log_weight = _floored_log_weights(log_norm, cells[np.newaxis], p, floor)
    check_log_scale(log_weight[:, cells], f'|grad f|^{p - 2.0:g}')
    weight = np.exp(log_weight) * _corner_area(dom)

    ux = np.divide(gx, norm, out=np.zeros_like(gx), where=norm > 0)
    uy = np.divide(gy, norm, out=np.zeros_like(gy), where=norm > 0)
    hxx = weight * (1.0 + (p - 2.0) * ux * ux)
    hyy = weight * (1.0 + (p - 2.0) * uy * uy)
    hxy = weight * (p - 2.0) * ux * uy

    index = np.arange(dom.ny * dom.nx).reshape(dom.shape)
    rows, cols, data = [], [], []
    for k, (corner, x_partner, sx, y_partner, sy) in enumerate(CORNERS):
        nodes = [_cell_view(index, offset)[cells] for offset in (corner, x_partner, y_partner)]
        ex, ey = sx / dom.hx, sy / dom.hy
        dx = (-ex, ex, 0.0)
        dy = (-ey, 0.0, ey)
        bxx, bxy, byy = hxx[k][cells], hxy[k][cells], hyy[k][cells]
        for m in range(3):
            for n in range(3):
                rows.append(nodes[m])
                cols.append(nodes[n])
                cross = dx[m] * dy[n] + dy[m] * dx[n]
                data.append(bxx * dx[m] * dx[n] + bxy * cross + byy * dy[m] * dy[n])

    size = dom.ny * dom.nx
    if not rows:
        return sparse.csr_matrix((size, size))
    hessian = sparse.coo_matrix(
        (np.concatenate(data), (np.concatenate(rows), np.concatenate(cols))),
        shape=(size, size),
    )
    return hessian.tocsr()


def log_energy_terms(fp, e, dom):
    """(log A, log B) for A = int |grad u|^p / p and B = int |grad v|^q / q."""
    return log_power_energy(fp.u, e.p, dom), log_power_energy(fp.v, e.q, dom)


def energy(fp, e, dom):
    """E = int |grad u|^p / p + int |grad v|^q / q."""
    log_a, log_b = log_energy_terms(fp, e, dom)
    return safe_exp(float(np.logaddexp(log_a, log_b)), 'energy')


def _active_values(fp, dom):
    u = _checked(fp.u, dom, 'u')
    v = _checked(fp.v, dom, 'v')
    active = dom.active_mask
    u, v = u[active], v[active]
    if not (np.all(np.isfinite(u)) and np.all(np.isfinite(v))):
        raise ValidationError({'fields': 'contain non-finite values inside the domain'})
    return active, u, v


class _Support(NamedTuple):
    """Active nodes where u and v are both nonzero, with their log magnitudes."""

    active: np.ndarray
    support: np.ndarray
    u: np.ndarray
    v: np.ndarray
    log_w: np.ndarray
    log_u: np.ndarray
    log_v: np.ndarray

    def log_terms(self, u_power, v_power):
        return self.log_w + u_power * self.log_u + v_power * self.log_v


def _support(fp, dom):
    active, u, v = _active_values(fp, dom)
    support = (u != 0) & (v != 0)
    return _Support(
        active=active,
        support=support,
        u=u,
        v=v,
        log_w=np.log(dom.node_weights[active][support]),
        log_u=np.log(np.abs(u[support])),
        log_v=np.log(np.abs(v[support])),
    )


def log_coupling(fp, e, dom):
    """log of C = int |u|^alpha |v|^beta; -inf when C vanishes."""
    log_terms = _support(fp, dom).log_terms(e.alpha, e.beta)
    check_log_scale(log_terms, 'coupling term')
    return log_sum(log_terms)


def coupling(fp, e, dom):
    """C = int |u|^alpha |v|^beta."""
    return safe_exp(log_coupling(fp, e, dom), 'coupling integral')


def _scatter(s, values, shape):
    nodes = np.zeros(s.support.shape)
    nodes[s.support] = values
    out = np.zeros(shape)
    out[s.active] = nodes
    return out


def coupling_gradient(fp, e, dom):
    """(dC/du, dC/dv) at every node; zero where u or v vanishes."""
    s = _support(fp, dom)
    log_du = math.log(e.alpha) + s.log_terms(e.alpha - 1.0, e.beta)
    log_dv = math.log(e.beta) + s.log_terms(e.alpha, e.beta - 1.0)
    check_log_scale(np.concatenate([log_du, log_dv]), 'coupling derivative')
    du = np.sign(s.u[s.support]) * np.exp(log_du)
    dv = np.sign(s.v[s.support]) * np.exp(log_dv)
    return _scatter(s, du, dom.shape), _scatter(s, dv, dom.shape)


def coupling_curvature(fp, e, dom):
    """Diagonal second derivatives (d2C/du2, d2C/dv2); zero where u or v vanishes."""
    s = _support(fp, dom)
    log_uu = s.log_terms(e.alpha - 2.0, e.beta)
    log_vv = s.log_terms(e.alpha, e.beta - 2.0)
    check_log_scale(np.concatenate([log_uu, log_vv]), 'coupling curvature')
    cuu = e.alpha * (e.alpha - 1.0) * np.exp(log_uu)
    cvv = e.beta * (e.beta - 1.0) * np.exp(log_vv)
    return _scatter(s, cuu, dom.shape), _scatter(s, cvv, dom.shape)


def require_constraint_exponent(e):
    if e.beta <= 1:
        raise UnsupportedExponentsError(
            {'beta': f'must be > 1 for the sign-balance constraint (got {e.beta!r})'}
        )


def constraint_value(fp, e, dom):
    """int |u|^alpha |v|^(beta-2) v, taking the value 0 at nodes where v = 0."""
    require_constraint_exponent(e)
    s = _support(fp, dom)
    log_terms = s.log_terms(e.alpha, e.beta - 1.0)
    check_log_scale(log_terms, 'constraint term')
    log_value, sign = signed_log_sum(log_terms, np.sign(s.v[s.support]))
    if not sign:
        return 0.0
    return sign * safe_exp(log_value, 'constraint integral')


def log_rayleigh_quotient(fp, e, dom):
    """
    log(E / C).

    Raises:
        AdmissibilityError: the coupling integral vanishes
    """
    log_c = log_coupling(fp, e, dom)
    if log_c == -np.inf:
        logger.debug("coupling_vanished", shape=dom.shape)
        raise AdmissibilityError('coupling integral vanishes; the pair is not admissible')
    log_a, log_b = log_energy_terms(fp, e, dom)
    return float(np.logaddexp(log_a, log_b)) - log_c


def rayleigh_quotient(fp, e, dom):
    """E / C."""
    return safe_exp(log_rayleigh_quotient(fp, e, dom), 'Rayleigh quotient')
