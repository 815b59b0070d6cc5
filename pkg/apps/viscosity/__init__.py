from .models import RegionTag, ResidualReport, SingularSet
from .operators import (
    f_infinity_residual,
    f_q_residual,
    h_infinity_residual,
    h_p_residual,
    region_tags,
)

__all__ = [
    'RegionTag',
    'ResidualReport',
    'SingularSet',
    'f_infinity_residual',
    'f_q_residual',
    'h_infinity_residual',
    'h_p_residual',
    'region_tags',
]
