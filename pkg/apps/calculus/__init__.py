from .energy import (
    constraint_value,
    coupling,
    coupling_curvature,
    coupling_gradient,
    energy,
    log_coupling,
    log_energy_terms,
    log_power_energy,
    log_rayleigh_quotient,
    power_energy,
    power_energy_gradient,
    power_energy_hessian,
    rayleigh_quotient,
)
from .models import Exponents, FieldPair
from .operators import gradient_field, infinity_laplacian, integrate, second_derivatives

__all__ = [
    'Exponents',
    'FieldPair',
    'constraint_value',
    'coupling',
    'coupling_curvature',
    'coupling_gradient',
    'energy',
    'gradient_field',
    'infinity_laplacian',
    'integrate',
    'log_coupling',
    'log_energy_terms',
    'log_power_energy',
    'log_rayleigh_quotient',
    'power_energy',
    'power_energy_gradient',
    'power_energy_hessian',
    'rayleigh_quotient',
    'second_derivatives',
]
