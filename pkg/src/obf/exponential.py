"""Exponential rate test, H0: lambda = lambda0 against H1: lambda > 0.

Under H1 the default prior is ``1/lambda``. A single observation y is a
minimal training sample and its Bayes factor is ``y lambda0 exp(-lambda0 y)``,
maximised at ``y = 1/lambda0`` with value ``1/e``.
"""

from __future__ import annotations

import math

import numpy as np
from scipy import integrate, special

from . import mts
from .core import (
    BoundReport,
    DomainViolation,
    Exponential,
    IbfBounds,
    ImproperTrainingSample,
    LogValue,
    Variant,
    as_values,
    assemble_bounds,
)


def _check_lambda0(lambda0):
    if not (lambda0 > 0 and math.isfinite(lambda0)):
        raise DomainViolation(f"lambda0 must be positive, got {lambda0}")


def _check_sample(y):
    if np.any(y < 0):
        raise DomainViolation("exponential data must be non-negative")


def exp_log_bf01(n, s, lambda0):
    """Vectorised ``log B01 = n log(lambda0 s) - lambda0 s - log Gamma(n)``."""
    n = np.asarray(n, dtype=float)
    s = np.asarray(s, dtype=float)
    return n * np.log(lambda0 * s) - lambda0 * s - special.gammaln(n)


def exp_bf01_full(sample, lambda0: float) -> LogValue:
    y = as_values(sample)
    _check_lambda0(lambda0)
    _check_sample(y)
    if y.size < 2:
        raise DomainViolation("the full Bayes factor needs n >= 2")
    s = float(y.sum())
    if s <= 0:
        raise DomainViolation("sum of observations must be positive")
    return LogValue.of(float(exp_log_bf01(y.size, s, lambda0)))


def exp_mts_bf01(y: float, lambda0: float) -> LogValue:
    """B01 of the one-point training sample ``y``; exactly zero at ``y = 0``."""
    _check_lambda0(lambda0)
    if y < 0:
        raise DomainViolation("exponential data must be non-negative")
    if y == 0:
        return LogValue.zero()
    return LogValue.of(math.log(y * lambda0) - lambda0 * y)


def exp_bounds(sample, lambda0: float) -> IbfBounds:
    """Theoretical, empirical and arithmetic IBF bounds.

    The empirical bound scans observed points and keeps the largest
    training-sample B01, i.e. the observation closest (in the ``y e^{-y}``
    sense) to ``1/lambda0``.
    """
    y = as_values(sample)
    _check_lambda0(lambda0)
    _check_sample(y)
    if not np.any(y > 0):
        raise ImproperTrainingSample("every observation is zero")
    b01 = exp_bf01_full(y, lambda0)
    idx = mts.proper_training_samples(y, Exponential(lambda0))
    pts = y[[i for (i,) in idx]]
    logs = np.log(pts * lambda0) - lambda0 * pts
    return assemble_bounds(
        b01.log_magnitude, logs, idx, theoretical_sup=-1.0, theoretical_attainer=1.0 / lambda0
    )


def exp_sp_log_bf10(n, s, lambda0):
    """Vectorised log SP Bayes factor with the Exponential(mean lambda0) prior."""
    n = np.asarray(n, dtype=float)
    s = np.asarray(s, dtype=float)
    return (
        special.gammaln(n + 1.0) + lambda0 * s
        - (n + 1.0) * np.log(s + 1.0 / lambda0) - (n + 1.0) * math.log(lambda0)
    )


def exp_sp_bf10(sample, lambda0: float) -> LogValue:
    y = as_values(sample)
    _check_lambda0(lambda0)
    _check_sample(y)
    return LogValue.of(float(exp_sp_log_bf10(y.size, y.sum(), lambda0)))


def exp_sp_prior(lam, lambda0: float):
    """Sequential-posterior prior: exponential density with mean lambda0."""
    lam = np.asarray(lam, dtype=float)
    return np.exp(-lam / lambda0) / lambda0


def exp_ep_prior(sample, lam):
    """Empirical-posterior prior, the average of ``y_i exp(-lam y_i)``."""
    y = as_values(sample)
    lam = np.asarray(lam, dtype=float)
    out = np.mean(y[:, None] * np.exp(-np.outer(y, np.atleast_1d(lam))), axis=0)
    return float(out[0]) if lam.ndim == 0 else out


def exp_ep_bf10(sample, lambda0: float) -> LogValue:
    y = as_values(sample)
    _check_lambda0(lambda0)
    _check_sample(y)
    n, s = y.size, float(y.sum())
    pos = y[y > 0]
    if pos.size == 0:
        raise ImproperTrainingSample("every observation is zero")
    terms = np.log(pos) - (n + 1) * np.log(s + pos)
    log_m1 = special.logsumexp(terms) - math.log(n) + special.gammaln(n + 1.0)
    return LogValue.of(float(log_m1 - (n * math.log(lambda0) - lambda0 * s)))


def exp_empirical_sp_bf10(sample, lambda0: float) -> BoundReport:
    """Empirical SP Bayes factor by explicit posterior reuse.

    Train on the best observed point ``y*`` (the empirical-bound attainer),
    use the resulting posterior as the prior for the remaining data, and
    integrate the alternative's predictive density numerically.
    """
    y = as_values(sample, min_size=2)
    _check_lambda0(lambda0)
    _check_sample(y)
    pos = np.flatnonzero(y > 0)
    if pos.size == 0:
        raise ImproperTrainingSample("every observation is zero")
    score = np.log(y[pos] * lambda0) - lambda0 * y[pos]
    star = int(pos[np.argmax(score)])
    ystar = y[star]
    rest = np.delete(y, star)
    k, s_rest = rest.size, float(rest.sum())
    s_all = s_rest + ystar
    # posterior after y* under the 1/lambda prior: ystar * exp(-lambda ystar)
    mode = k / s_all
    log_peak = k * math.log(mode) - mode * s_all

    def scaled(lam):
        return math.exp(k * math.log(lam) - lam * s_all - log_peak) if lam > 0 else 0.0

    width = math.sqrt(k) / s_all
    pieces = [0.0, max(mode - 8 * width, 0.0), mode, mode + 8 * width, mode + 40 * width]
    total = 0.0
    for a, b in zip(pieces[:-1], pieces[1:]):
        if b > a:
            total += integrate.quad(scaled, a, b, epsabs=0, epsrel=1e-13, limit=200)[0]
    total += integrate.quad(scaled, pieces[-1], math.inf, epsabs=0, epsrel=1e-13, limit=200)[0]
    log_m1 = math.log(ystar) + log_peak + math.log(total)
    log_m0 = k * math.log(lambda0) - lambda0 * s_rest
    return BoundReport(Variant.SPBF10, LogValue.of(log_m1 - log_m0), (star,), "posterior reuse")


@mts.is_proper.register
def _(test: Exponential, y, idx):
    return y[idx[0]] > 0
