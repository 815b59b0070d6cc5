"""
Limit parameters, cone/plane geometry and sweep rows.
"""
import math
import numbers
from dataclasses import dataclass

from apps.calculus.models import Exponents
from apps.core.exceptions import ValidationError


def _is_finite(value):
    return isinstance(value, numbers.Real) and not isinstance(value, bool) and math.isfinite(value)


@dataclass(frozen=True)
class LimitSpec:
    """
    Limit exponents and domain size.

    gamma is the limit of alpha/p and Q the limit of q/p. L is the rectangle
    half-height; None selects the disk of radius R.
    """

    gamma: float
    Q: float
    R: float
    L: float | None = None

    def __post_init__(self):
        errors = {}
        if not _is_finite(self.gamma) or not 0 < self.gamma < 1:
            errors['gamma'] = f'must lie in (0, 1) (got {self.gamma!r})'
        if not _is_finite(self.Q) or self.Q <= 0:
            errors['Q'] = f'must be a finite number > 0 (got {self.Q!r})'
        if not _is_finite(self.R) or self.R <= 0:
            errors['R'] = f'must be a finite number > 0 (got {self.R!r})'
        if self.L is not None:
            if not _is_finite(self.L) or self.L <= 0:
                errors['L'] = f'must be a finite number > 0 (got {self.L!r})'
            elif 'R' not in errors and self.L > self.R:
                errors['L'] = f'must satisfy L <= R (got L={self.L}, R={self.R})'
        if errors:
            raise ValidationError(errors)

    @property
    def is_rectangle(self):
        return self.L is not None

    @property
    def mix(self):
        """gamma + Q (1 - gamma)."""
        return self.gamma + self.Q * (1.0 - self.gamma)

    @property
    def plane_power(self):
        """(1 - gamma) Q, the power of |v| in the limit coupling."""
        return (1.0 - self.gamma) * self.Q

    def exponents(self, p):
        """Exponents on the schedule alpha = gamma p, q = Q p."""
        return Exponents.from_schedule(p, self.gamma, self.Q)

    def as_dict(self):
        return {'gamma': self.gamma, 'Q': self.Q, 'R': self.R, 'L': self.L}


@dataclass(frozen=True)
class AnsatzConfig:
    """
    Cone/plane candidate: u = k1 (rho - |x - (a, 0)|)+ and v = k2 x.

    M is the maximum of (rho - |s - a|)^gamma |s|^((1-gamma) Q), reached at
    s = touch_s, so that k1^gamma k2^((1-gamma) Q) M = 1.
    """

    a: float
    rho: float
    k1: float
    k2: float
    M: float
    touch_s: float

    def theta(self, spec):
        """k1 / k2^((gamma-1) Q / gamma)."""
        return self.k1 / self.k2 ** ((spec.gamma - 1.0) * spec.Q / spec.gamma)

    def normalization_defect(self, spec):
        """|k1^gamma k2^((1-gamma) Q) M - 1|."""
        log_value = (
            spec.gamma * math.log(self.k1)
            + spec.plane_power * math.log(self.k2)
            + math.log(self.M)
        )
        return abs(math.expm1(log_value))

    def as_dict(self):
        return {
            'a': self.a,
            'rho': self.rho,
            'k1': self.k1,
            'k2': self.k2,
            'M': self.M,
            'touch_s': self.touch_s,
        }


@dataclass(frozen=True)
class RectangleValue:
    """The two-branch closed form on the rectangle with its thresholds."""

    value: float
    branch: int
    paper_threshold: float
    construction_threshold: float

    def __float__(self):
        return self.value

    def as_dict(self):
        return {
            'value': self.value,
            'branch': self.branch,
            'paper_threshold': self.paper_threshold,
            'construction_threshold': self.construction_threshold,
        }


@dataclass(frozen=True)
class SweepRow:
    """One continuation step; reference and rel_gap are None without a closed form."""

    p: float
    q: float
    alpha: float
    beta: float
    eigenvalue: float
    lambda_root_p: float
    reference: float | None
    rel_gap: float | None
    iterations: int = 0
    converged: bool = False
    stalled: bool = False

    # Column order of the sweep CSV
    FIELDS = ('p', 'q', 'alpha', 'beta', 'lambda', 'lambda_root_p', 'reference', 'rel_gap')

    def as_row(self):
        return (
            self.p,
            self.q,
            self.alpha,
            self.beta,
            self.eigenvalue,
            self.lambda_root_p,
            self.reference,
            self.rel_gap,
        )


@dataclass(frozen=True)
class OracleReport:
    """
    Closed-form value beside the brute-force cone/plane value.

    apex_value, branch and construction_threshold are None on the disk.
    """

    spec: LimitSpec
    paper_value: float
    oracle_value: float
    agreement: bool
    config: AnsatzConfig
    paper_threshold: float | None = None
    construction_threshold: float | None = None
    apex_value: float | None = None
    branch: int | None = None

    def as_dict(self):
        return {
            **self.spec.as_dict(),
            'paper_value': self.paper_value,
            'oracle_value': self.oracle_value,
            'apex_value': self.apex_value,
            'branch': self.branch,
            'paper_threshold': self.paper_threshold,
            'construction_threshold': self.construction_threshold,
            'agreement': self.agreement,
            'config': self.config.as_dict(),
        }
