"""Special functions used by the closed-form Bayes factors.

Log-gamma and the regularized incomplete gamma/beta functions are taken from
``scipy.special``; this module adds domain checking, the chi-square and F
distribution wrappers, and an F quantile found by bisection.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import special

from .core import DomainViolation


@dataclass(frozen=True)
class Tolerance:
    rel: float = 1e-12
    max_iter: int = 200

    def __post_init__(self):
        if not 0 < self.rel <= 1e-6 or self.max_iter < 1:
            raise DomainViolation("need 0 < rel <= 1e-6 and max_iter >= 1")


DEFAULT_TOL = Tolerance()


def ln_gamma(x):
    """Natural log of the gamma function for ``x > 0`` (scalar or array)."""
    arr = np.asarray(x, dtype=float)
    if np.any(~(arr > 0)) or np.any(~np.isfinite(arr)):
        raise DomainViolation(f"ln_gamma requires finite x > 0, got {x}")
    out = special.gammaln(arr)
    return float(out) if np.ndim(out) == 0 else out


def ln_factorial(k):
    """log(k!) for non-negative integers."""
    arr = np.asarray(k, dtype=float)
    if np.any(arr < 0) or np.any(arr != np.floor(arr)):
        raise DomainViolation("factorial needs non-negative integers")
    out = special.gammaln(arr + 1.0)
    return float(out) if np.ndim(out) == 0 else out


def _check_dof(*dofs):
    for d in dofs:
        if not (d > 0 and math.isfinite(d)):
            raise DomainViolation(f"degrees of freedom must be positive, got {d}")


def chi2_cdf(x, dof):
    """Chi-square CDF, the regularized lower incomplete gamma P(dof/2, x/2)."""
    _check_dof(dof)
    arr = np.maximum(np.asarray(x, dtype=float), 0.0)
    out = special.gammainc(dof / 2.0, arr / 2.0)
    return float(out) if np.ndim(out) == 0 else out


def chi2_sf(x, dof):
    """Chi-square upper tail, kept separate to avoid cancellation near 1."""
    _check_dof(dof)
    arr = np.maximum(np.asarray(x, dtype=float), 0.0)
    out = special.gammaincc(dof / 2.0, arr / 2.0)
    return float(out) if np.ndim(out) == 0 else out


def f_cdf(x: float, d1: float, d2: float) -> float:
    _check_dof(d1, d2)
    if x <= 0:
        return 0.0
    if math.isinf(x):
        return 1.0
    return float(special.betainc(d1 / 2.0, d2 / 2.0, d1 * x / (d1 * x + d2)))


def f_quantile(p: float, d1: float, d2: float, tol: Tolerance = DEFAULT_TOL) -> float:
    """Inverse of :func:`f_cdf` by bracketing and bisection."""
    if not 0.0 < p < 1.0:
        raise DomainViolation(f"probability must lie in (0, 1), got {p}")
    _check_dof(d1, d2)
    lo, hi = 0.0, 1.0
    for _ in range(tol.max_iter):
        if f_cdf(hi, d1, d2) >= p:
            break
        lo, hi = hi, hi * 2.0
    else:
        raise DomainViolation("could not bracket the F quantile")
    for _ in range(tol.max_iter):
        mid = 0.5 * (lo + hi)
        if f_cdf(mid, d1, d2) < p:
            lo = mid
        else:
            hi = mid
        if hi - lo <= tol.rel * hi:
            return 0.5 * (lo + hi)
    raise DomainViolation("F quantile bisection did not converge")
