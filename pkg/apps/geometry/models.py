"""
Grid domain model: a rectangle or a disk discretized on a uniform node grid.
"""
from dataclasses import dataclass
from enum import Enum
from functools import cached_property

import numpy as np

from apps.core.exceptions import ValidationError


class DomainKind(str, Enum):
    RECTANGLE = 'rectangle'
    DISK = 'disk'


@dataclass(frozen=True, eq=False)
class GridDomain:
    """
    Discretized 2-D domain.

    Arrays are indexed [row, column] = [y index, x index]. Every node is in
    exactly one of interior_mask, boundary_mask or outside_mask.
    """

    kind: DomainKind
    R: float
    L: float
    nx: int
    ny: int
    hx: float
    hy: float
    x: np.ndarray
    y: np.ndarray
    interior_mask: np.ndarray
    boundary_mask: np.ndarray
    normals: np.ndarray

    def __post_init__(self):
        for array in (self.x, self.y, self.interior_mask, self.boundary_mask, self.normals):
            array.setflags(write=False)

    @property
    def shape(self):
        return (self.ny, self.nx)

    @property
    def h(self):
        """Grid spacing (the larger one when the spacings differ)."""
        return self.hx if self.hx == self.hy else max(self.hx, self.hy)

    @cached_property
    def domain_mask(self):
        mask = self.interior_mask | self.boundary_mask
        mask.setflags(write=False)
        return mask

    @cached_property
    def outside_mask(self):
        mask = ~self.domain_mask
        mask.setflags(write=False)
        return mask

    @cached_property
    def X(self):
        grid = np.broadcast_to(self.x[np.newaxis, :], self.shape)
        return grid

    @cached_property
    def Y(self):
        grid = np.broadcast_to(self.y[:, np.newaxis], self.shape)
        return grid

    @cached_property
    def cell_mask(self):
        """Cells (shape (ny-1, nx-1)) whose four corners all lie in the domain."""
        m = self.domain_mask
        mask = m[:-1, :-1] & m[:-1, 1:] & m[1:, :-1] & m[1:, 1:]
        mask.setflags(write=False)
        return mask

    @cached_property
    def node_weights(self):
        """Quadrature weights: a quarter cell area per complete incident cell."""
        cells = self.cell_mask.astype(float)
        counts = np.zeros(self.shape)
        counts[:-1, :-1] += cells
        counts[:-1, 1:] += cells
        counts[1:, :-1] += cells
        counts[1:, 1:] += cells
        weights = counts * (self.hx * self.hy / 4.0)
        weights.setflags(write=False)
        return weights

    @cached_property
    def active_mask(self):
        """Nodes that touch at least one complete cell."""
        mask = self.node_weights > 0
        mask.setflags(write=False)
        return mask

    @cached_property
    def deep_interior_mask(self):
        """Interior nodes whose whole 3x3 stencil is interior."""
        padded = np.pad(self.interior_mask, 1, constant_values=False)
        mask = np.ones(self.shape, dtype=bool)
        for dj in range(3):
            for di in range(3):
                mask &= padded[dj:dj + self.ny, di:di + self.nx]
        mask.setflags(write=False)
        return mask

    def check_field(self, field, name='field'):
        """Raise ValidationError unless field is a real array shaped like the grid."""
        field = np.asarray(field)
        if field.shape != self.shape:
            raise ValidationError({name: f'shape {field.shape} does not match grid {self.shape}'})
        return field

    def nearest_node(self, x, y):
        """(row, column) of the node closest to (x, y)."""
        return int(np.argmin(np.abs(self.y - y))), int(np.argmin(np.abs(self.x - x)))

    def describe(self):
        return {
            'kind': self.kind.value,
            'R': self.R,
            'L': self.L,
            'nx': self.nx,
            'ny': self.ny,
            'hx': self.hx,
            'hy': self.hy,
        }
