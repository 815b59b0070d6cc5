from .grids import (
    DiskGridFactory,
    ExponentsFactory,
    LimitSpecFactory,
    RectangleGridFactory,
    SolverOptionsFactory,
)

__all__ = [
    'DiskGridFactory',
    'ExponentsFactory',
    'LimitSpecFactory',
    'RectangleGridFactory',
    'SolverOptionsFactory',
]
