"""
Exponent quadruples and (u, v) field pairs.
"""
import math
import numbers
from dataclasses import dataclass

import numpy as np

from apps.core.exceptions import UnsupportedExponentsError, ValidationError

# Allowed defect in alpha/p + beta/q = 1
EXPONENT_TOLERANCE = 1e-12
# Largest |u| accepted on a boundary node
BOUNDARY_TOLERANCE = 1e-14
# Space dimension of every grid
DIMENSION = 2


def _is_finite_number(value):
    is_real = isinstance(value, numbers.Real) and not isinstance(value, bool)
    return is_real and math.isfinite(value)


@dataclass(frozen=True)
class Exponents:
    """
    The quadruple (p, q, alpha, beta) tied by alpha/p + beta/q = 1.

    p drives the Dirichlet component u, q the Neumann component v.
    """

    p: float
    q: float
    alpha: float
    beta: float

    def __post_init__(self):
        errors = {}
        for name in ('p', 'q'):
            value = getattr(self, name)
            if not _is_finite_number(value) or value <= 1:
                errors[name] = f'must be a finite number > 1 (got {value!r})'
        for name in ('alpha', 'beta'):
            value = getattr(self, name)
            if not _is_finite_number(value) or value <= 0:
                errors[name] = f'must be a finite number > 0 (got {value!r})'
        if errors:
            raise ValidationError(errors)

        defect = abs(self.alpha / self.p + self.beta / self.q - 1.0)
        if defect > EXPONENT_TOLERANCE:
            raise ValidationError(
                {'beta': f'alpha/p + beta/q must equal 1 (defect {defect:.3e})'}
            )

    @classmethod
    def from_pqa(cls, p, q, alpha):
        """Exponents with beta = q (1 - alpha/p)."""
        values = {'p': p, 'q': q, 'alpha': alpha}
        errors = {
            name: f'must be a finite number (got {value!r})'
            for name, value in values.items()
            if not _is_finite_number(value)
        }
        if not errors and alpha >= p:
            errors['alpha'] = f'must satisfy alpha < p (got alpha={alpha}, p={p})'
        if errors:
            raise ValidationError(errors)
        return cls(p=float(p), q=float(q), alpha=float(alpha), beta=float(q) * (1.0 - alpha / p))

    @classmethod
    def from_schedule(cls, p, gamma, Q):
        """Exponents on the ray alpha = gamma p, q = Q p, beta = q (1 - gamma)."""
        errors = {}
        if not _is_finite_number(gamma) or not 0 < gamma < 1:
            errors['gamma'] = f'must lie in (0, 1) (got {gamma!r})'
        if not _is_finite_number(Q) or Q <= 0:
            errors['Q'] = f'must be a finite number > 0 (got {Q!r})'
        if not _is_finite_number(p) or p <= 1:
            errors['p'] = f'must be a finite number > 1 (got {p!r})'
        if errors:
            raise ValidationError(errors)
        q = float(Q) * float(p)
        return cls(p=float(p), q=q, alpha=float(gamma) * float(p), beta=q * (1.0 - gamma))

    @property
    def theory_flag(self):
        """beta > 1: the sign-balance constraint is well defined."""
        return self.beta > 1

    @property
    def dimension_flag(self):
        """p >= N or q > N for the planar grids (recorded, not enforced)."""
        return self.p >= DIMENSION or self.q > DIMENSION

    @property
    def gamma(self):
        return self.alpha / self.p

    @property
    def Q(self):
        return self.q / self.p

    def require_theory(self):
        if not self.theory_flag:
            raise UnsupportedExponentsError(
                {'beta': f'must be > 1 for the constrained problem (got {self.beta!r})'}
            )
        return self

    def as_dict(self):
        return {'p': self.p, 'q': self.q, 'alpha': self.alpha, 'beta': self.beta}


@dataclass(frozen=True, eq=False)
class FieldPair:
    """Grid fields u (Dirichlet component) and v (Neumann component)."""

    u: np.ndarray
    v: np.ndarray

    def scaled(self, a, b):
        return FieldPair(u=a * self.u, v=b * self.v)

    def with_fields(self, u=None, v=None):
        return FieldPair(u=self.u if u is None else u, v=self.v if v is None else v)

    def check(self, dom):
        """
        Validate the pair against a domain.

        Raises:
            ValidationError: shape mismatch, non-finite entries or u nonzero on the boundary
        """
        u = dom.check_field(self.u, 'u')
        v = dom.check_field(self.v, 'v')
        errors = {}
        for name, field in (('u', u), ('v', v)):
            if not np.all(np.isfinite(field[dom.domain_mask])):
                errors[name] = 'contains non-finite values inside the domain'
        if 'u' not in errors and np.any(np.abs(u[dom.boundary_mask]) > BOUNDARY_TOLERANCE):
            errors['u'] = 'must vanish on the boundary'
        if errors:
            raise ValidationError(errors)
        return self
