"""
Node stencils and quadrature on a GridDomain.
"""
from typing import NamedTuple

import numpy as np

from apps.core.exceptions import ValidationError


class Derivatives(NamedTuple):
    """Central first and second differences; NaN where the stencil is incomplete."""

    fx: np.ndarray
    fy: np.ndarray
    fxx: np.ndarray
    fyy: np.ndarray
    fxy: np.ndarray
    defined: np.ndarray


def _axis_difference(f, mask, spacing, axis):
    f = np.moveaxis(f, axis, -1)
    mask = np.moveaxis(mask, axis, -1)
    padded = np.pad(f, [(0, 0), (1, 1)])
    padded_mask = np.pad(mask, [(0, 0), (1, 1)], constant_values=False)
    previous, following = padded[:, :-2], padded[:, 2:]
    has_previous = padded_mask[:, :-2] & mask
    has_following = padded_mask[:, 2:] & mask

    with np.errstate(invalid='ignore'):
        out = np.where(
            has_previous & has_following,
            (following - previous) / (2.0 * spacing),
            np.where(
                has_following,
                (following - f) / spacing,
                np.where(has_previous, (f - previous) / spacing, 0.0),
            ),
        )
    return np.moveaxis(out, -1, axis)


def gradient_field(f, dom):
    """
    Nodal gradient of f.

    Central differences where both axis neighbours lie in the domain,
    one-sided differences where only one does, zero elsewhere.

    Returns:
        Array shaped (ny, nx, 2) holding (df/dx, df/dy)
    """
    f = np.asarray(dom.check_field(f, 'f'), dtype=float)
    mask = dom.domain_mask
    fx = _axis_difference(f, mask, dom.hx, axis=1)
    fy = _axis_difference(f, mask, dom.hy, axis=0)
    return np.stack([fx, fy], axis=-1)


def integrate(f, dom):
    """
    Quadrature of f over the domain.

    Each node carries a quarter of the cell area per complete incident cell,
    which is the trapezoid rule on the rectangle.
    """
    f = np.asarray(dom.check_field(f, 'f'), dtype=float)
    active = dom.active_mask
    values = f[active]
    if not np.all(np.isfinite(values)):
        raise ValidationError({'f': 'contains non-finite values inside the domain'})
    return float(np.dot(dom.node_weights[active], values))


def stencil_mask(dom):
    """Interior nodes whose eight neighbours all lie in the domain."""
    padded = np.pad(dom.domain_mask, 1, constant_values=False)
    mask = dom.interior_mask.copy()
    for dj in range(3):
        for di in range(3):
            mask &= padded[dj:dj + dom.ny, di:di + dom.nx]
    return mask


def second_derivatives(f, dom):
    """Central differences fx, fy, fxx, fyy, fxy on nodes with a full 3x3 stencil."""
    f = np.asarray(dom.check_field(f, 'f'), dtype=float)
    defined = stencil_mask(dom)
    padded = np.pad(np.where(dom.domain_mask, f, 0.0), 1)
    hx, hy = dom.hx, dom.hy

    centre = padded[1:-1, 1:-1]
    east, west = padded[1:-1, 2:], padded[1:-1, :-2]
    north, south = padded[2:, 1:-1], padded[:-2, 1:-1]
    north_east, north_west = padded[2:, 2:], padded[2:, :-2]
    south_east, south_west = padded[:-2, 2:], padded[:-2, :-2]

    values = {
        'fx': (east - west) / (2.0 * hx),
        'fy': (north - south) / (2.0 * hy),
        'fxx': (east - 2.0 * centre + west) / hx**2,
        'fyy': (north - 2.0 * centre + south) / hy**2,
        'fxy': (north_east - north_west - south_east + south_west) / (4.0 * hx * hy),
    }
    return Derivatives(
        **{name: np.where(defined, value, np.nan) for name, value in values.items()},
        defined=defined,
    )


def infinity_laplacian(f, dom):
    """
    Discrete <D^2 f . grad f, grad f>.

    Returns:
        (values, defined): values is NaN where the 3x3 stencil leaves the domain
    """
    d = second_derivatives(f, dom)
    values = d.fx**2 * d.fxx + 2.0 * d.fx * d.fy * d.fxy + d.fy**2 * d.fyy
    return values, d.defined
