from .builders import build_disk_grid, build_rectangle_grid, distance_to_boundary
from .models import DomainKind, GridDomain

__all__ = [
    'DomainKind',
    'GridDomain',
    'build_disk_grid',
    'build_rectangle_grid',
    'distance_to_boundary',
]
