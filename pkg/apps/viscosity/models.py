"""
Residual reports, region tags and singular sets.
"""
import math
from dataclasses import dataclass, field
from enum import IntEnum

import numpy as np


class RegionTag(IntEnum):
    OUTSIDE = 0
    V_POS = 1
    V_NEG = 2
    V_ZERO = 3
    BOUNDARY = 4
    EXCLUDED = 5

    @property
    def label(self):
        return self.name.lower()


@dataclass(frozen=True)
class SingularSet:
    """
    Points, circles and segments where the limit fields are not C^2.

    points are (x, y); circles are (x, y, radius); segments are
    ((x0, y0), (x1, y1)).
    """

    points: tuple = ()
    circles: tuple = ()
    segments: tuple = ()

    def distance(self, X, Y):
        """Distance from every node to the nearest element (inf for an empty set)."""
        X = np.asarray(X, dtype=float)
        Y = np.asarray(Y, dtype=float)
        out = np.full(np.broadcast(X, Y).shape, np.inf)
        for x0, y0 in self.points:
            out = np.minimum(out, np.hypot(X - x0, Y - y0))
        for x0, y0, radius in self.circles:
            out = np.minimum(out, np.abs(np.hypot(X - x0, Y - y0) - radius))
        for (x0, y0), (x1, y1) in self.segments:
            dx, dy = x1 - x0, y1 - y0
            length2 = dx * dx + dy * dy
            if length2 == 0:
                t = np.zeros_like(out)
            else:
                t = np.clip(((X - x0) * dx + (Y - y0) * dy) / length2, 0.0, 1.0)
            out = np.minimum(out, np.hypot(X - (x0 + t * dx), Y - (y0 + t * dy)))
        return out

    def as_dict(self):
        return {
            'points': [list(point) for point in self.points],
            'circles': [list(circle) for circle in self.circles],
            'segments': [[list(end) for end in segment] for segment in self.segments],
        }


@dataclass(frozen=True, eq=False)
class ResidualReport:
    """
    Pointwise residual of a strong-form operator on a grid field.

    residual_field is NaN where the operator is undefined. sup_defect is the
    largest |residual| over defined interior nodes outside the excluded band,
    NaN when no such node exists. boundary_defect is the largest violation of
    the boundary condition; boundary_operator_defect is that of the interior
    operator evaluated on the boundary, and boundary_min_defect the largest
    min(|operator|, |condition|) there.
    """

    operator: str
    residual_field: np.ndarray
    defined_mask: np.ndarray
    region_tags: np.ndarray
    sup_defect: float
    boundary_defect: float
    excluded_radius: float
    extras: dict = field(default_factory=dict)
    boundary_operator_field: np.ndarray | None = None
    boundary_operator_defect: float = math.nan
    boundary_min_defect: float = math.nan

    def region_counts(self):
        counts = np.bincount(self.region_tags.ravel(), minlength=len(RegionTag))
        return {tag.label: int(counts[tag]) for tag in RegionTag}

    def summary(self):
        return {
            'operator': self.operator,
            'sup_defect': self.sup_defect,
            'boundary_defect': self.boundary_defect,
            'boundary_operator_defect': self.boundary_operator_defect,
            'boundary_min_defect': self.boundary_min_defect,
            'excluded_radius': self.excluded_radius,
            'defined_nodes': int(self.defined_mask.sum()),
            'regions': self.region_counts(),
            **self.extras,
        }
