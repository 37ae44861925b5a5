"""Standard-normal CDF, density, and quantile.

The quantile is computed in-repo (rational initial estimate refined by
safeguarded Newton steps against the erfc-based CDF) so that constellation
points and seeded noise are reproducible to ~1e-12 absolute across
platforms, independent of any library's own inverse-CDF.
"""

from __future__ import annotations

import math

import numpy as np
from scipy.special import erfc

_SQRT2 = math.sqrt(2.0)
_INV_SQRT_2PI = 1.0 / math.sqrt(2.0 * math.pi)


def gaussian_cdf(x):
    """P(Z <= x) for standard normal Z; accepts scalars or arrays."""
    return 0.5 * erfc(-np.asarray(x, dtype=np.float64) / _SQRT2)


def gaussian_pdf(x):
    """Standard normal density."""
    x = np.asarray(x, dtype=np.float64)
    return _INV_SQRT_2PI * np.exp(-0.5 * x * x)


# Rational approximation coefficients (Acklam); |error| < 1.2e-9 before
# refinement.  Regions split at plow/phigh.
_A = (-3.969683028665376e01, 2.209460984245205e02, -2.759285104469687e02,
      1.383577518672690e02, -3.066479806614716e01, 2.506628277459239e00)
_B = (-5.447609879822406e01, 1.615858368580409e02, -1.556989798598866e02,
      6.680131188771972e01, -1.328068155288572e01)
_C = (-7.784894002430293e-03, -3.223964580411365e-01, -2.400758277161838e00,
      -2.549732539343734e00, 4.374664141464968e00, 2.938163982698783e00)
_D = (7.784695709041462e-03, 3.224671290700398e-01, 2.445134137142996e00,
      3.754408661907416e00)
_PLOW = 0.02425


def _quantile_estimate(u: np.ndarray) -> np.ndarray:
    """Initial rational estimate of the quantile, valid on (0, 1)."""
    x = np.empty_like(u)
    lower = u < _PLOW
    upper = u > 1.0 - _PLOW
    mid = ~(lower | upper)

    if np.any(mid):
        q = u[mid] - 0.5
        r = q * q
        num = ((((_A[0] * r + _A[1]) * r + _A[2]) * r + _A[3]) * r + _A[4]) * r + _A[5]
        den = ((((_B[0] * r + _B[1]) * r + _B[2]) * r + _B[3]) * r + _B[4]) * r + 1.0
        x[mid] = q * num / den
    for sel, tail in ((lower, u), (upper, 1.0 - u)):
        if np.any(sel):
            q = np.sqrt(-2.0 * np.log(tail[sel]))
            num = ((((_C[0] * q + _C[1]) * q + _C[2]) * q + _C[3]) * q + _C[4]) * q + _C[5]
            den = (((_D[0] * q + _D[1]) * q + _D[2]) * q + _D[3]) * q + 1.0
            x[sel] = num / den
            if tail is not u:
                x[sel] = -x[sel]
    return x


def _lower_tail(y: np.ndarray) -> np.ndarray:
    """P(Z <= -y) for y >= 0, with full relative precision in the tail."""
    return 0.5 * erfc(y / _SQRT2)


def gaussian_quantile(u):
    """Inverse standard-normal CDF on (0, 1), abs error <= 1e-12.

    Works on the tail probability v = min(u, 1-u) so nothing cancels near
    the endpoints (1-u is exact for u >= 1/2), then refines the rational
    estimate with safeguarded Newton steps against the erfc-based tail CDF:
    any step leaving the current bracket is replaced by its midpoint.
    """
    scalar = np.isscalar(u)
    u = np.atleast_1d(np.asarray(u, dtype=np.float64))
    if np.any((u <= 0.0) | (u >= 1.0)):
        raise ValueError("gaussian_quantile: argument must lie strictly in (0, 1)")

    sign = np.where(u < 0.5, -1.0, 1.0)
    v = np.where(u < 0.5, u, 1.0 - u)  # tail mass, in (0, 1/2]

    y = np.abs(_quantile_estimate(v))
    lo = np.zeros_like(y)
    hi = np.full_like(y, 45.0)
    for _ in range(3):
        resid = _lower_tail(y) - v  # decreasing in y
        lo = np.where(resid > 0.0, y, lo)
        hi = np.where(resid < 0.0, y, hi)
        nxt = y + resid / np.maximum(gaussian_pdf(y), 1e-300)
        outside = (nxt < lo) | (nxt > hi)
        y = np.where(outside, 0.5 * (lo + hi), nxt)
    x = sign * y
    return float(x[0]) if scalar else x
