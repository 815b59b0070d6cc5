"""
Log-domain arithmetic for large exponents.

A power |x|^p is carried as p * log|x|. Zeros have log -inf and drop out of
every sum.
"""
import numpy as np
from scipy.special import logsumexp

from apps.core.exceptions import ScaleError

# Largest log magnitude a single power term may reach before exp() is unsafe
MAX_LOG = 700.0


def log_abs(x):
    """log|x| elementwise, -inf where x == 0."""
    magnitude = np.abs(np.asarray(x, dtype=float))
    out = np.full(magnitude.shape, -np.inf)
    np.log(magnitude, out=out, where=magnitude > 0)
    return out


def log_power(log_x, power):
    """log(|x|^power) from log|x|."""
    log_x = np.asarray(log_x, dtype=float)
    if power == 0:
        return np.zeros_like(log_x)
    return power * log_x


def check_log_scale(log_values, what):
    """Raise ScaleError when any log magnitude exceeds MAX_LOG."""
    peak = np.max(np.asarray(log_values, dtype=float), initial=-np.inf)
    if peak > MAX_LOG:
        raise ScaleError(
            f'{what} overflows (log magnitude {peak:.1f} > {MAX_LOG:.0f}); renormalize the fields'
        )
    return peak


def log_sum(log_terms):
    """log(sum(exp(log_terms))), -inf for an empty or all-zero sum."""
    log_terms = np.asarray(log_terms, dtype=float).ravel()
    if not np.any(log_terms > -np.inf):
        return -np.inf
    return float(logsumexp(log_terms))


def signed_log_sum(log_terms, signs):
    """
    Sum of signed terms kept in the log domain.

    Returns:
        (log|S|, sign(S)) for S = sum(signs * exp(log_terms)); (-inf, 0.0) when S == 0
    """
    log_terms = np.asarray(log_terms, dtype=float).ravel()
    signs = np.asarray(signs, dtype=float).ravel()
    keep = (log_terms > -np.inf) & (signs != 0)
    if not keep.any():
        return -np.inf, 0.0
    log_terms, signs = log_terms[keep], signs[keep]
    with np.errstate(divide='ignore', invalid='ignore'):
        value, sign = logsumexp(log_terms, b=signs, return_sign=True)
    if not (np.isfinite(value) and np.isfinite(sign)):
        # near-exact cancellation; sum the peak-rescaled terms directly
        peak = float(np.max(log_terms))
        total = float(np.sum(signs * np.exp(log_terms - peak)))
        if total == 0 or not np.isfinite(total):
            return -np.inf, 0.0
        return peak + float(np.log(abs(total))), float(np.sign(total))
    if not sign:
        return -np.inf, 0.0
    return float(value), float(sign)


def safe_exp(log_value, what):
    """exp(log_value), raising ScaleError instead of overflowing."""
    if log_value > MAX_LOG:
        raise ScaleError(
            f'{what} overflows (log value {log_value:.1f} > {MAX_LOG:.0f}); renormalize the fields'
        )
    return float(np.exp(log_value))
