"""p-value calibration: the -e p log p bound and the Wilks p-value."""

from __future__ import annotations

import math

from .core import (
    BoundReport,
    DomainViolation,
    Exponential,
    ModelTest,
    NonExistentBound,
    SimpleNormalMean,
    Variant,
    as_values,
)
from .normal import simple_mean_upper10
from .specialfn import chi2_sf

INV_E = math.exp(-1.0)


class PValue(float):
    """A float constrained to [0, 1]."""

    def __new__(cls, p):
        p = float(p)
        if not 0.0 <= p <= 1.0:
            raise DomainViolation(f"p-value must lie in [0, 1], got {p}")
        return super().__new__(cls, p)


def robust_lower_bound(p: float) -> float:
    """Lower bound ``-e p log p`` on B01 for ``p < 1/e``, and 1 otherwise."""
    p = PValue(p)
    if p == 0.0:
        return 0.0
    if p < INV_E:
        return -math.e * p * math.log(p)
    return 1.0


def exp_wilks_pvalue(sample, lambda0: float) -> PValue:
    """Likelihood-ratio p-value for H0: lambda = lambda0, one degree of freedom."""
    y = as_values(sample)
    if not lambda0 > 0:
        raise DomainViolation("lambda0 must be positive")
    n, s = y.size, float(y.sum())
    if s <= 0:
        raise DomainViolation("sum of observations must be positive")
    log_lr = n * math.log(lambda0) - lambda0 * s - n * (math.log(n) - math.log(s) - 1.0)
    ts = max(-2.0 * log_lr, 0.0)
    return PValue(chi2_sf(ts, 1))


def gs_bayes_factor(test: ModelTest, sample) -> BoundReport:
    """Sup over the alternative of the training-sample-corrected Bayes factor."""
    if isinstance(test, SimpleNormalMean):
        return BoundReport(Variant.GS10, simple_mean_upper10(sample))
    if isinstance(test, Exponential):
        raise NonExistentBound("the training constant is unbounded for the exponential test")
    raise NonExistentBound(f"no GS Bayes factor available for {type(test).__name__}")
