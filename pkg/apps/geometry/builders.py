"""
Builders for rectangle and disk grids.
"""
import math
import numbers

import numpy as np
import structlog

from apps.core.exceptions import ValidationError

from .models import DomainKind, GridDomain

logger = structlog.get_logger(__name__)

# Nodes closer than BOUNDARY_BAND * h to the circle belong to the boundary ring
BOUNDARY_BAND = 0.5


def _check_lengths(**lengths):
    errors = {}
    for name, value in lengths.items():
        is_real = isinstance(value, numbers.Real) and not isinstance(value, bool)
        if not is_real or not math.isfinite(value) or value <= 0:
            errors[name] = f'must be a finite positive number (got {value!r})'
    if errors:
        raise ValidationError(errors)


def _check_counts(minimum, **counts):
    errors = {}
    for name, value in counts.items():
        if isinstance(value, bool) or not isinstance(value, (int, np.integer)) or value < minimum:
            errors[name] = f'must be an integer >= {minimum} (got {value!r})'
    if errors:
        raise ValidationError(errors)


def _centered_axis(n, spacing):
    # Integer offsets times the spacing keep x -> -x exact in floating point
    return (np.arange(n) - (n - 1) / 2.0) * spacing


def build_rectangle_grid(R, L, nx, ny):
    """
    Grid on the rectangle (-R, R) x (-L, L).

    Args:
        R: Half-width
        L: Half-height
        nx: Node count along x (>= 3)
        ny: Node count along y (>= 3)

    Returns:
        GridDomain whose boundary is the perimeter of the node array
    """
    _check_lengths(R=R, L=L)
    _check_counts(3, nx=nx, ny=ny)
    nx, ny = int(nx), int(ny)
    R, L = float(R), float(L)

    hx = 2.0 * R / (nx - 1)
    hy = 2.0 * L / (ny - 1)
    x = _centered_axis(nx, hx)
    y = _centered_axis(ny, hy)

    boundary = np.zeros((ny, nx), dtype=bool)
    boundary[0, :] = boundary[-1, :] = True
    boundary[:, 0] = boundary[:, -1] = True
    interior = ~boundary

    normals = np.zeros((ny, nx, 2))
    normals[:, 0, 0] = -1.0
    normals[:, -1, 0] = 1.0
    normals[0, :, 1] = -1.0
    normals[-1, :, 1] = 1.0
    # Corners carry the normalized diagonal
    lengths = np.linalg.norm(normals, axis=-1, keepdims=True)
    normals = np.divide(normals, lengths, out=np.zeros_like(normals), where=lengths > 0)

    logger.debug("rectangle_grid_built", R=R, L=L, nx=nx, ny=ny, hx=hx, hy=hy)
    return GridDomain(
        kind=DomainKind.RECTANGLE,
        R=R,
        L=L,
        nx=nx,
        ny=ny,
        hx=hx,
        hy=hy,
        x=x,
        y=y,
        interior_mask=interior,
        boundary_mask=boundary,
        normals=normals,
    )


def build_disk_grid(R, n):
    """
    Masked square grid for the disk of radius R centred at the origin.

    Nodes with x^2 + y^2 >= R^2 are outside. An inside node is interior when it
    lies more than half a spacing inside the circle and its four axis
    neighbours are inside too; the other inside nodes form the boundary ring.

    Args:
        R: Radius
        n: Node count per axis, odd so the centre is a node (>= 5)

    Returns:
        GridDomain with radial outward normals on the boundary ring
    """
    _check_lengths(R=R)
    _check_counts(5, n=n)
    if n % 2 == 0:
        raise ValidationError({'n': f'must be odd so the centre is a node (got {n})'})
    n = int(n)
    R = float(R)

    h = 2.0 * R / (n - 1)
    axis = _centered_axis(n, h)
    X, Y = np.meshgrid(axis, axis)
    inside = X * X + Y * Y < R * R
    radius = np.hypot(X, Y)

    padded = np.pad(inside, 1, constant_values=False)
    neighbours_inside = (
        padded[:-2, 1:-1] & padded[2:, 1:-1] & padded[1:-1, :-2] & padded[1:-1, 2:]
    )
    interior = inside & neighbours_inside & (radius < R - BOUNDARY_BAND * h)
    boundary = inside & ~interior

    normals = np.zeros((n, n, 2))
    normals[boundary, 0] = X[boundary] / radius[boundary]
    normals[boundary, 1] = Y[boundary] / radius[boundary]

    logger.debug(
        "disk_grid_built",
        R=R,
        n=n,
        h=h,
        interior=int(interior.sum()),
        boundary=int(boundary.sum()),
    )
    return GridDomain(
        kind=DomainKind.DISK,
        R=R,
        L=R,
        nx=n,
        ny=n,
        hx=h,
        hy=h,
        x=axis,
        y=axis.copy(),
        interior_mask=interior,
        boundary_mask=boundary,
        normals=normals,
    )


def distance_to_boundary(dom):
    """Distance to the continuous boundary, zeroed on the boundary ring and outside."""
    if dom.kind is DomainKind.DISK:
        distance = dom.R - np.hypot(dom.X, dom.Y)
    else:
        distance = np.minimum(dom.R - np.abs(dom.X), dom.L - np.abs(dom.Y))
    return np.where(dom.interior_mask, np.maximum(distance, 0.0), 0.0)
