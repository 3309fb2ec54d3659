"""Count-data tests: Poisson against Geometric and against Negative Binomial.

Priors: ``lambda^{-1/2}`` for the Poisson rate and the Jeffreys prior
``theta^{-1} (1-theta)^{-1/2}`` for the Geometric success probability. The
Negative Binomial closed form (known r) corresponds to the prior
``r^{1/2} theta^{-1/2} (1-theta)^{-1}``. Counts are failures before the
first (or r-th) success.
"""

from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass
from importlib import resources

import numpy as np
from scipy import special

from . import mts
from .core import (
    BoundReport,
    DomainViolation,
    IbfBounds,
    ImproperTrainingSample,
    LogValue,
    PoissonVsGeometric,
    PoissonVsNegBinomial,
    Variant,
    as_values,
    assemble_bounds,
)

LOG_GAMMA_HALF = 0.5 * math.log(math.pi)
LOG_GAMMA_3_2 = math.lgamma(1.5)


@dataclass(frozen=True)
class CountStats:
    n: int
    s: int
    log_prod_fact: float
    y_min: int
    y_max: int


def as_counts(sample) -> np.ndarray:
    y = as_values(sample)
    if np.any(y < 0) or np.any(y != np.floor(y)):
        raise DomainViolation("count data must be non-negative integers")
    return y


def count_stats(sample) -> CountStats:
    y = as_counts(sample)
    return CountStats(
        y.size, int(y.sum()), float(special.gammaln(y + 1).sum()), int(y.min()), int(y.max())
    )


# ---------------------------------------------------- Poisson vs Geometric


def pg_log_bf01(n, s, log_prod_fact):
    """Vectorised full log B01 of Poisson against Geometric."""
    n = np.asarray(n, dtype=float)
    s = np.asarray(s, dtype=float)
    return special.gammaln(n + s + 0.5) - log_prod_fact - special.gammaln(n) - (s + 0.5) * np.log(n)


def pg_bf01_full(stats: CountStats) -> LogValue:
    if stats.n < 1:
        raise DomainViolation("need at least one observation")
    return LogValue.of(float(pg_log_bf01(stats.n, stats.s, stats.log_prod_fact)))


def pg_mts_bf01(y: int) -> LogValue:
    """Published one-point training factor ``1/Gamma(y + 3/2)``.

    This is what the bound calculations use. It is not the full-sample
    formula at n = 1, which gives ``Gamma(y + 3/2) / y!`` (see
    :func:`pg_training_bf01`).
    """
    if y < 0 or y != math.floor(y):
        raise DomainViolation("count must be a non-negative integer")
    return LogValue.of(-math.lgamma(y + 1.5))


def pg_training_bf01(y: int) -> LogValue:
    """Full-sample B01 evaluated on the single training point ``y``."""
    if y < 0 or y != math.floor(y):
        raise DomainViolation("count must be a non-negative integer")
    return LogValue.of(math.lgamma(y + 1.5) - math.lgamma(y + 1.0))


def pg_bounds(sample) -> IbfBounds:
    """Bounds from the published training factor, maximised at y = 0.

    The empirical bound is attained at the smallest observation and the
    theoretical one at zero, so both coincide whenever the sample holds a 0.
    """
    y = as_counts(sample)
    stats = count_stats(y)
    logs = -special.gammaln(y + 1.5)
    idx = [(i,) for i in range(y.size)]
    return assemble_bounds(
        pg_bf01_full(stats).log_magnitude, logs, idx,
        theoretical_sup=-LOG_GAMMA_3_2, theoretical_attainer=0.0,
    )


@dataclass(frozen=True)
class CoxStep:
    prefix_n: int
    upper10: LogValue
    lower01: LogValue


def cox_sequential(sample, randomize_seed: int | None = None) -> list[CoxStep]:
    """Theoretical bounds on every prefix of the (optionally shuffled) sample."""
    y = as_counts(sample)
    if randomize_seed is not None:
        y = np.random.default_rng(randomize_seed).permutation(y)
    k = np.arange(1, y.size + 1)
    log_b01 = pg_log_bf01(k, np.cumsum(y), np.cumsum(special.gammaln(y + 1)))
    upper = -log_b01 - LOG_GAMMA_3_2
    return [CoxStep(int(i), LogValue.of(u), LogValue.of(-u)) for i, u in zip(k, upper)]


def load_cox_fixture() -> np.ndarray:
    text = resources.files("obf").joinpath("data/cox1962.txt").read_text()
    lines = [ln for ln in text.splitlines() if not ln.lstrip().startswith("#")]
    return np.array(" ".join(lines).split(), dtype=float)


# ---------------------------------------------- Poisson vs Negative Binomial


def _check_r(r):
    if int(r) != r or r < 1:
        raise DomainViolation(f"r must be a positive integer, got {r}")


def pnb_log_bf10(y: np.ndarray, r: int) -> float:
    n, s = y.size, float(y.sum())
    if s == 0:
        raise ImproperTrainingSample("all counts are zero")
    return float(
        np.sum(special.gammaln(y + r) - special.gammaln(r))
        + 0.5 * math.log(r)
        + special.gammaln(r * n + 0.5)
        + special.gammaln(s)
        - special.gammaln(n * r + s + 0.5)
        - special.gammaln(s + 0.5)
        + (s + 0.5) * math.log(n)
    )


def pnb_bf10_full(sample, r: int) -> LogValue:
    """log B10 of Negative Binomial (known r) against Poisson."""
    _check_r(r)
    return LogValue.of(pnb_log_bf10(as_counts(sample), r))


def pnb_mts_bf01(y: int, r: int) -> LogValue:
    """One-point training B01; an exact zero at ``y = 0`` where H1 is improper."""
    _check_r(r)
    if y == 0:
        return LogValue.zero()
    return LogValue.of(-pnb_log_bf10(np.array([float(y)]), r))


def pnb_mts_ratio(y, r: int):
    """The y-dependent part ``Gamma(r+y+1/2) Gamma(y+1/2) / (Gamma(y+r) Gamma(y))``."""
    y = np.asarray(y, dtype=float)
    return np.exp(
        special.gammaln(r + y + 0.5) + special.gammaln(y + 0.5)
        - special.gammaln(y + r) - special.gammaln(y)
    )


def pnb_theoretical_lower01(sample, r: int) -> LogValue:
    """The published closed-form lower bound with the ``Gamma(r)/Gamma(1/2)`` factor."""
    _check_r(r)
    y = as_counts(sample)
    n, s = y.size, float(y.sum())
    if s == 0:
        raise ImproperTrainingSample("all counts are zero")
    val = (
        (n - 1) * math.lgamma(r)
        + special.gammaln(n * (r + s / n) + 0.5)
        + special.gammaln(s + 0.5)
        - np.sum(special.gammaln(y + r))
        - (s + 0.5) * math.log(n)
        - special.gammaln(r * n + 0.5)
        - special.gammaln(s)
        + math.lgamma(r)
        - LOG_GAMMA_HALF
    )
    return LogValue.of(float(val))


def pnb_bounds(sample, r: int) -> IbfBounds:
    """Empirical and arithmetic bounds plus the published theoretical lower bound.

    The training factor grows without bound in y, so there is no theoretical
    upper bound. Among proper points (y >= 1) the empirical supremum sits at
    the largest count.
    """
    _check_r(r)
    y = as_counts(sample)
    full10 = pnb_bf10_full(y, r)
    idx = mts.proper_training_samples(y, PoissonVsNegBinomial(r))
    if not idx:
        raise ImproperTrainingSample("no positive counts to train on")
    logs = [pnb_mts_bf01(y[i], r).log_magnitude for (i,) in idx]
    out = assemble_bounds(-full10.log_magnitude, logs, idx)
    lower = BoundReport(
        Variant.THEORETICAL_LOWER01,
        pnb_theoretical_lower01(y, r),
        None,
        "closed form; not the infimum of the trained factor, which is zero",
    )
    return dataclasses.replace(out, theoretical_lower01=lower)


@mts.is_proper.register
def _(test: PoissonVsGeometric, y, idx):
    return True


@mts.is_proper.register
def _(test: PoissonVsNegBinomial, y, idx):
    return y[idx[0]] > 0
