"""Normal-model tests: precision (scale), mean with known or unknown variance.

Default priors are the usual objective ones: flat in the mean, ``1/h`` in
the precision for the scale test, ``1/sigma`` and ``1/sigma**2`` for the mean
test with unknown variance.
"""

from __future__ import annotations

import dataclasses
import math
from collections.abc import Callable
from dataclasses import dataclass

import numpy as np

from . import mts
from .core import (
    BoundReport,
    DomainViolation,
    IbfBounds,
    LogValue,
    NormalMeanKnownVar,
    NormalMeanUnknownVar,
    NormalScale,
    SimpleNormalMean,
    Variant,
    as_values,
    assemble_bounds,
)
from .specialfn import ln_gamma

LOG_PI = math.log(math.pi)
LOG_2PI = math.log(2.0 * math.pi)


@dataclass(frozen=True)
class NormalStats:
    n: int
    ybar: float
    s2: float  # sum of squared deviations from the sample mean


def normal_stats(sample) -> NormalStats:
    y = as_values(sample)
    ybar = float(y.mean())
    return NormalStats(y.size, ybar, float(np.sum((y - ybar) ** 2)))


@dataclass(frozen=True)
class PriorDensity:
    family: str
    params: dict
    support: tuple[float, float]
    pdf: Callable[[np.ndarray], np.ndarray]

    def __call__(self, x):
        return self.pdf(x)


# ---------------------------------------------------------------- scale test


def _scale_log_bf01(n, s2, h0):
    k = (n - 1) / 2.0
    return k * math.log(h0) - h0 * s2 / 2.0 - k * (math.log(2.0) - math.log(s2)) - ln_gamma(k)


def scale_bf01_full(stats: NormalStats, h0: float) -> LogValue:
    """log B01 for H0: h = h0 against H1: h unknown, mean unknown in both."""
    if stats.n < 3:
        raise DomainViolation("the scale test needs n >= 3 observations")
    if not stats.s2 > 0:
        raise DomainViolation("constant data: sum of squares is zero")
    if not h0 > 0:
        raise DomainViolation("h0 must be positive")
    return LogValue.of(_scale_log_bf01(stats.n, stats.s2, h0))


def scale_pair_bf01(d: float, h0: float) -> LogValue:
    """B01 of a two-point training sample with difference ``d``.

    This is the full-sample formula evaluated at n = 2, which is what makes
    the trained factor equal ``B01(y) / B01(pair)`` exactly.
    """
    if d == 0:
        return LogValue.zero()
    return LogValue.of(
        0.5 * math.log(h0) + math.log(abs(d)) - h0 * d * d / 4.0 - math.log(2.0) - 0.5 * LOG_PI
    )


@dataclass(frozen=True)
class ScaleMtsSup:
    d_hat: float
    sup_b10_mts: LogValue  # the published correction sqrt(h0/pi) |d| exp(-h0 d^2/4)
    pair_sup: LogValue  # supremum of scale_pair_bf01 over d


def scale_mts_sup(h0: float) -> ScaleMtsSup:
    """Maximiser and maximum of the pair factor over the difference d.

    Both quantities peak at ``d = sqrt(2/h0)``. The published correction
    carries an extra factor of two relative to :func:`scale_pair_bf01`, so
    ``pair_sup`` is half of ``sup_b10_mts``.
    """
    if not h0 > 0:
        raise DomainViolation("h0 must be positive")
    d = math.sqrt(2.0 / h0)
    corr = 0.5 * (math.log(h0) - LOG_PI) - h0 * d * d / 4.0 + math.log(d)
    return ScaleMtsSup(d, LogValue.of(corr), scale_pair_bf01(d, h0))


def scale_eibf_ratio(h, h0: float = 1.0):
    """Expected correction factor when the pair difference is drawn under precision h."""
    t = np.asarray(h, dtype=float) / h0
    out = 2.0 * np.sqrt(t) / (math.pi * (t + 1.0))
    return float(out) if np.ndim(out) == 0 else out


def scale_bounds(sample, h0: float) -> IbfBounds:
    y = as_values(sample)
    stats = normal_stats(y)
    b01 = scale_bf01_full(stats, h0)
    test = NormalScale(h0)
    idx = mts.proper_training_samples(y, test)
    logs = [scale_pair_bf01(y[j] - y[i], h0).log_magnitude for i, j in idx]
    sup = scale_mts_sup(h0)
    return assemble_bounds(
        b01.log_magnitude,
        logs,
        idx,
        theoretical_sup=sup.pair_sup.log_magnitude,
        theoretical_attainer=sup.d_hat,
        notes="theoretical bound uses the pair-factor supremum, half the published correction",
    )


def scale_sp_prior(h0: float) -> PriorDensity:
    """Gamma(1/2, scale 2 h0) prior on the precision."""

    def pdf(h):
        h = np.asarray(h, dtype=float)
        return np.exp(-h / (2.0 * h0)) / np.sqrt(2.0 * math.pi * h * h0)

    return PriorDensity("Gamma", {"shape": 0.5, "scale": 2.0 * h0}, (0.0, math.inf), pdf)


def scale_intrinsic_prior(h0: float) -> PriorDensity:
    """Scaled beta-2 prior SBeta2(1/2, 1/2, h0) on the precision."""

    def pdf(h):
        t = np.asarray(h, dtype=float) / h0
        return 1.0 / (math.pi * h0 * np.sqrt(t) * (t + 1.0))

    return PriorDensity("SBeta2", {"p": 0.5, "q": 0.5, "b": h0}, (0.0, math.inf), pdf)


def scale_sp_mean_prior(center: float, h0: float) -> PriorDensity:
    """Cauchy prior on the mean with kernel 1/(1/(2 h0) + (mu - center)^2)."""
    g2 = 1.0 / (2.0 * h0)

    def pdf(mu):
        mu = np.asarray(mu, dtype=float)
        return math.sqrt(g2) / (math.pi * (g2 + (mu - center) ** 2))

    return PriorDensity("Cauchy", {"loc": center, "scale": math.sqrt(g2)}, (-math.inf, math.inf), pdf)


# ------------------------------------------------------ mean, known variance


def mean_known_bf01(sample, mu0: float, sigma0: float) -> LogValue:
    y = as_values(sample)
    n = y.size
    z2 = n * (y.mean() - mu0) ** 2 / (2.0 * sigma0**2)
    return LogValue.of(-z2 + 0.5 * math.log(n) - 0.5 * LOG_2PI - math.log(sigma0))


def mean_known_bounds(sample, mu0: float, sigma0: float) -> IbfBounds:
    """Bounds for H0: mu = mu0 against a flat prior on mu, sigma0 known.

    The single-observation factor ``N(y; mu0, sigma0)`` peaks at ``y = mu0``;
    the expected IBF is reported as an extra ``EIBF10`` entry.
    """
    y = as_values(sample)
    test = NormalMeanKnownVar(mu0, sigma0)
    n = y.size
    b01 = mean_known_bf01(y, mu0, sigma0)
    mts_logs = -((y - mu0) ** 2) / (2.0 * sigma0**2) - 0.5 * LOG_2PI - math.log(sigma0)
    idx = [(i,) for i in range(n)]
    out = assemble_bounds(
        b01.log_magnitude,
        mts_logs,
        idx,
        theoretical_sup=-0.5 * LOG_2PI - math.log(test.sigma0),
        theoretical_attainer=float(mu0),
    )
    d2 = (y.mean() - mu0) ** 2 / (2.0 * sigma0**2)
    eibf = LogValue.of(-0.5 * math.log(2.0 * n) + (n - 0.5) * d2)
    return dataclasses.replace(out, extra=(BoundReport(Variant.EIBF10, eibf),))


# ---------------------------------------------------- mean, unknown variance


def _mean_unknown_log_bf01(y, mu0):
    n = y.size
    b0 = np.sum((y - mu0) ** 2) / 2.0
    b1 = np.sum((y - y.mean()) ** 2) / 2.0
    log_m0 = -math.log(2.0) - n / 2.0 * LOG_2PI + ln_gamma(n / 2.0) - n / 2.0 * math.log(b0)
    log_m1 = (
        -math.log(2.0) - 0.5 * math.log(n) - (n - 1) / 2.0 * LOG_2PI
        + ln_gamma(n / 2.0) - n / 2.0 * math.log(b1)
    )
    return float(log_m0 - log_m1)


def mean_unknown_bf01(sample, mu0: float) -> LogValue:
    y = as_values(sample, min_size=2)
    if np.ptp(y) == 0:
        raise DomainViolation("constant data: sum of squares is zero")
    return LogValue.of(_mean_unknown_log_bf01(y, mu0))


def mean_unknown_pair_bf01(y1: float, y2: float, mu0: float) -> LogValue:
    if y1 == y2:
        return LogValue.zero()
    a, b = y1 - mu0, y2 - mu0
    return LogValue.of(2.0 * math.log(abs(a - b)) - math.log(2.0) - 0.5 * LOG_PI - math.log(a * a + b * b))


def mean_unknown_bounds(sample, mu0: float) -> IbfBounds:
    """Bounds for H0: mu = mu0 with sigma unknown; the pair factor is at most 1/sqrt(pi)."""
    y = as_values(sample, min_size=3)
    if np.ptp(y) == 0:
        raise DomainViolation("constant data: sum of squares is zero")
    test = NormalMeanUnknownVar(mu0)
    b01 = mean_unknown_bf01(y, mu0)
    idx = mts.proper_training_samples(y, test)
    logs = [mean_unknown_pair_bf01(y[i], y[j], mu0).log_magnitude for i, j in idx]
    return assemble_bounds(
        b01.log_magnitude, logs, idx,
        theoretical_sup=-0.5 * LOG_PI,
        notes="pair-factor supremum 1/sqrt(pi), attained at y1 - mu0 = mu0 - y2",
    )


# -------------------------------------------------------- simple mean test


def simple_mean_upper10(sample) -> LogValue:
    """Upper bound ``(2 pi)^((n-1)/2) exp(sum y^2 / 2)`` for N(0,1) against N(mu,1)."""
    y = as_values(sample)
    return LogValue.of((y.size - 1) / 2.0 * LOG_2PI + float(np.sum(y**2)) / 2.0)


# ------------------------------------------------------------- properness


@mts.is_proper.register
def _(test: NormalScale, y, idx):
    return y[idx[0]] != y[idx[1]]


@mts.is_proper.register
def _(test: NormalMeanUnknownVar, y, idx):
    return y[idx[0]] != y[idx[1]]


@mts.is_proper.register
def _(test: NormalMeanKnownVar, y, idx):
    return True


@mts.is_proper.register
def _(test: SimpleNormalMean, y, idx):
    return True
