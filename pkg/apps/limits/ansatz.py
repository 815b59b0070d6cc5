"""
Explicit cone/plane limit fields and the limit functionals evaluated on grids.
"""
import math

import numpy as np

from apps.calculus.models import FieldPair
from apps.calculus.operators import gradient_field
from apps.core.exceptions import AdmissibilityError, DomainMismatchError
from apps.geometry import DomainKind
from apps.viscosity.models import SingularSet

from .closed_form import ball_ansatz
from .oracle import DEFAULT_SAMPLES, ansatz_oracle_rectangle

# Relative tolerance on R and L when matching a spec to a grid
DOMAIN_TOLERANCE = 1e-12


def check_domain(s, dom):
    """Raise DomainMismatchError unless dom is the domain s describes."""
    tol = DOMAIN_TOLERANCE * s.R
    if s.is_rectangle:
        matches = (
            dom.kind is DomainKind.RECTANGLE
            and abs(dom.R - s.R) <= tol
            and abs(dom.L - s.L) <= tol
        )
        expected = f'rectangle R={s.R}, L={s.L}'
    else:
        matches = dom.kind is DomainKind.DISK and abs(dom.R - s.R) <= tol
        expected = f'disk R={s.R}'
    if not matches:
        raise DomainMismatchError(
            {'domain': f'expected {expected}, got {dom.kind.value} R={dom.R}, L={dom.L}'}
        )


def ansatz_config(s, n=DEFAULT_SAMPLES):
    """Closed-form config on the disk, brute-force optimum on the rectangle."""
    return ansatz_oracle_rectangle(s, n)[0] if s.is_rectangle else ball_ansatz(s)


def cone_plane_pair(s, dom, config=None):
    """
    Sample the cone/plane pair on the grid.

    u = k1 max(rho - |x - (a, 0)|, rho - |x + (a, 0)|, 0), zero off the interior;
    v = k2 x on the domain. The mirrored cones keep the positive and negative
    maxima of the coupling equal.
    """
    check_domain(s, dom)
    config = config or ansatz_config(s)
    X, Y = dom.X, dom.Y
    right = config.rho - np.hypot(X - config.a, Y)
    left = config.rho - np.hypot(X + config.a, Y)
    u = config.k1 * np.maximum(np.maximum(right, left), 0.0)
    u = np.where(dom.interior_mask, u, 0.0)
    v = np.where(dom.domain_mask, config.k2 * X, 0.0)
    return FieldPair(u=u, v=v)


def ansatz_singular_set(s, config=None):
    """Apexes, cone rims inside the domain and the ridge between mirrored cones."""
    config = config or ansatz_config(s)
    a, rho = config.a, config.rho
    if not s.is_rectangle:
        return SingularSet(points=((0.0, 0.0),))
    if a == 0:
        return SingularSet(points=((0.0, 0.0),), circles=((0.0, 0.0, rho),))
    segments = ()
    if a < rho:
        half = math.sqrt(rho * rho - a * a)
        segments = (((0.0, -half), (0.0, half)),)
    return SingularSet(
        points=((a, 0.0), (-a, 0.0)),
        circles=((a, 0.0, rho), (-a, 0.0, rho)),
        segments=segments,
    )


def _log_coupling_max(u, v, s, dom):
    mask = dom.domain_mask & (u != 0) & (v != 0)
    if not mask.any():
        return -math.inf
    log_terms = s.gamma * np.log(np.abs(u[mask])) + s.plane_power * np.log(np.abs(v[mask]))
    return float(np.max(log_terms))


def limit_quotient(fp, s, dom):
    """
    max(||grad u||, ||grad v||^Q) / || |u|^gamma |v|^((1-gamma) Q) ||, all sup-norms.

    The gradient of u is measured on the deep interior, away from the
    one-sided differences at the boundary.
    """
    u = np.asarray(dom.check_field(fp.u, 'u'), dtype=float)
    v = np.asarray(dom.check_field(fp.v, 'v'), dtype=float)
    grad_u = np.linalg.norm(gradient_field(u, dom), axis=-1)
    grad_v = np.linalg.norm(gradient_field(v, dom), axis=-1)
    sup_u = float(np.max(grad_u[dom.deep_interior_mask], initial=0.0))
    sup_v = float(np.max(grad_v[dom.domain_mask], initial=0.0))

    log_den = _log_coupling_max(u, v, s, dom)
    if log_den == -math.inf:
        raise AdmissibilityError('|u|^gamma |v|^((1-gamma) Q) vanishes on the grid')
    with np.errstate(divide='ignore'):
        log_num = max(np.log(sup_u), s.Q * np.log(sup_v))
    return math.exp(log_num - log_den)


def balance_defect(fp, s, dom):
    """|max |u|^gamma v+^((1-gamma) Q) - max |u|^gamma v-^((1-gamma) Q)| over the domain."""
    u = np.asarray(dom.check_field(fp.u, 'u'), dtype=float)
    v = np.asarray(dom.check_field(fp.v, 'v'), dtype=float)
    positive = _log_coupling_max(u, np.maximum(v, 0.0), s, dom)
    negative = _log_coupling_max(u, np.maximum(-v, 0.0), s, dom)
    return abs(math.exp(positive) - math.exp(negative))
