"""
Brute-force maxima over the cone/plane family.

The closed forms are checked against dense scans that know nothing about
them: a 1-D scan of the disk profile and a 2-D scan over apex positions and
touching points on the rectangle, each finished by bounded Brent refinement.
"""
import math
import numbers

import numpy as np
import structlog
from scipy.optimize import minimize_scalar

from apps.core.exceptions import ValidationError

from .closed_form import (
    apex_formula_value,
    construction_threshold,
    lambda_inf_ball,
    lambda_inf_rectangle,
    paper_threshold,
)
from .models import AnsatzConfig, OracleReport

logger = structlog.get_logger(__name__)

MIN_SAMPLES = 1000
DEFAULT_SAMPLES = 2000
AGREEMENT_TOLERANCE = 1e-4
# Apex rows scanned per vectorized block
SCAN_CHUNK = 256
# Stand-in for log 0 inside the scalar minimizers
LOG_FLOOR = -1e300


def _check_samples(n):
    if isinstance(n, bool) or not isinstance(n, numbers.Integral) or n < MIN_SAMPLES:
        raise ValidationError({'n': f'must be an integer >= {MIN_SAMPLES} (got {n!r})'})
    return int(n)


def _log_ball_profile(x, s):
    """gamma log(R - x) + (1-gamma) Q log x."""
    x = np.asarray(x, dtype=float)
    with np.errstate(divide='ignore', invalid='ignore'):
        return s.gamma * np.log(s.R - x) + s.plane_power * np.log(x)


def _log_cone_profile(a, rho, t, s):
    """Profile of the cone of radius rho at apex a, at the point a + rho t (|t| <= 1)."""
    with np.errstate(divide='ignore', invalid='ignore'):
        return s.gamma * np.log(rho * (1.0 - np.abs(t))) + s.plane_power * np.log(
            np.abs(a + rho * t)
        )


def _refined_max(log_f, lo, hi, scale):
    """Maximize log_f on [lo, hi] by bounded Brent; returns (argmax, max)."""

    def objective(x):
        value = float(log_f(x))
        return -value if math.isfinite(value) else -LOG_FLOOR

    result = minimize_scalar(
        objective, bounds=(lo, hi), method='bounded', options={'xatol': 1e-12 * scale}
    )
    return float(result.x), float(log_f(result.x))


def _scan_then_refine(log_f, samples, scale):
    values = log_f(samples)
    k = int(np.nanargmax(values))
    best = (float(samples[k]), float(values[k]))
    lo, hi = samples[max(k - 1, 0)], samples[min(k + 1, len(samples) - 1)]
    refined = _refined_max(log_f, lo, hi, scale)
    return refined if refined[1] > best[1] else best


def profile_max_bruteforce(s, n=DEFAULT_SAMPLES):
    """
    Maximum of (R - x)^gamma x^((1-gamma) Q) over [0, R].

    Returns:
        (s_star, M): the maximizer and the maximum
    """
    n = _check_samples(n)
    samples = np.linspace(0.0, s.R, n + 1)
    s_star, log_m = _scan_then_refine(lambda x: _log_ball_profile(x, s), samples, s.R)
    return s_star, math.exp(log_m)


def _cone_radius(a, s):
    return np.minimum(s.L, s.R - a)


def _cone_max(a, s, m):
    """(touching abscissa, log M(a)) for the cone at apex a."""
    rho = float(_cone_radius(a, s))
    if rho <= 0:
        return a, -math.inf
    t = np.linspace(-1.0, 1.0, m)
    t_star, log_m = _scan_then_refine(lambda x: _log_cone_profile(a, rho, x, s), t, 1.0)
    return a + rho * t_star, log_m


def ansatz_oracle_rectangle(s, n=DEFAULT_SAMPLES):
    """
    Best cone/plane pair on the rectangle by brute force.

    Scans apexes a in [0, R) with cone radius rho = min(L, R - a); M(a) is the
    maximum of (rho - |x - a|)^gamma |x|^((1-gamma) Q) over |x - a| <= rho.
    The slopes k1 = k2^Q = 1/M(a) satisfy the normalization, so the limit
    quotient of the pair is 1/M(a).

    Returns:
        (best, lambda): the AnsatzConfig maximizing M and 1 / max M
    """
    if s.L is None:
        raise ValidationError({'L': 'a rectangle spec needs the half-height L'})
    n = _check_samples(n)
    m = n + 1
    apexes = s.R * np.arange(n) / n
    t = np.linspace(-1.0, 1.0, m)

    row_max = np.empty(n)
    for start in range(0, n, SCAN_CHUNK):
        a = apexes[start:start + SCAN_CHUNK, np.newaxis]
        logs = _log_cone_profile(a, _cone_radius(a, s), t[np.newaxis, :], s)
        row_max[start:start + SCAN_CHUNK] = np.nanmax(logs, axis=1)

    k = int(np.nanargmax(row_max))
    lo = apexes[max(k - 1, 0)]
    hi = apexes[k + 1] if k + 1 < n else s.R
    a_star, _ = _refined_max(lambda a: _cone_max(a, s, m)[1], lo, hi, s.R)
    candidates = [(apexes[k], *_cone_max(apexes[k], s, m)), (a_star, *_cone_max(a_star, s, m))]
    a_best, touch, log_m = max(candidates, key=lambda item: item[2])

    config = AnsatzConfig(
        a=float(a_best),
        rho=float(_cone_radius(a_best, s)),
        k1=math.exp(-log_m),
        k2=math.exp(-log_m / s.Q),
        M=math.exp(log_m),
        touch_s=float(touch),
    )
    return config, math.exp(-log_m)


def _agrees(closed, oracle):
    return math.isfinite(closed) and abs(closed - oracle) <= AGREEMENT_TOLERANCE * abs(oracle)


def compare_rectangle(s, n=DEFAULT_SAMPLES):
    """Rectangle closed form, apex formula and oracle side by side."""
    closed = lambda_inf_rectangle(s)
    config, oracle_value = ansatz_oracle_rectangle(s, n)
    report = OracleReport(
        spec=s,
        paper_value=closed.value,
        oracle_value=oracle_value,
        agreement=_agrees(closed.value, oracle_value),
        config=config,
        paper_threshold=closed.paper_threshold,
        construction_threshold=closed.construction_threshold,
        apex_value=apex_formula_value(s),
        branch=closed.branch,
    )
    if not report.agreement:
        logger.warning(
            "oracle_disagreement",
            paper_value=report.paper_value,
            oracle_value=report.oracle_value,
            branch=report.branch,
            **s.as_dict(),
        )
    return report


def compare_ball(s, n=DEFAULT_SAMPLES):
    """Disk closed form beside 1/M from the profile scan."""
    s_star, M = profile_max_bruteforce(s, n)
    paper_value = lambda_inf_ball(s)
    config = AnsatzConfig(
        a=0.0,
        rho=s.R,
        k1=1.0 / M,
        k2=math.exp(-math.log(M) / s.Q),
        M=M,
        touch_s=s_star,
    )
    report = OracleReport(
        spec=s,
        paper_value=paper_value,
        oracle_value=1.0 / M,
        agreement=_agrees(paper_value, 1.0 / M),
        config=config,
        paper_threshold=paper_threshold(s),
        construction_threshold=construction_threshold(s),
    )
    if not report.agreement:
        logger.warning(
            "oracle_disagreement",
            paper_value=report.paper_value,
            oracle_value=report.oracle_value,
            **s.as_dict(),
        )
    return report


def compare_with_oracle(s, n=DEFAULT_SAMPLES):
    return compare_rectangle(s, n) if s.is_rectangle else compare_ball(s, n)
