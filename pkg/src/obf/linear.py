"""Nested normal linear models and one-way ANOVA.

Model i is ``y = A_i theta_i + e`` with ``e ~ N(0, sigma^2 I)`` and prior
``sigma^{-(1+q_i)}``, flat in ``theta_i``. The marginal density is computed
up to the arbitrary prior constant, which cancels in every trained factor.
"""

from __future__ import annotations

import itertools
import math
from collections.abc import Iterator, Sequence
from dataclasses import dataclass

import numpy as np
from scipy import special

from . import mts
from .core import (
    DomainViolation,
    IbfBounds,
    ImproperTrainingSample,
    InsufficientData,
    LogValue,
    NestedLinear,
    NonExistentBound,
    OneWayAnova,
    PriorKind,
    RankDeficientDesign,
    as_values,
    assemble_bounds,
)
from .specialfn import f_quantile

LOG_2PI = math.log(2.0 * math.pi)
RANK_TOL = 1e-10


def _qr(A: np.ndarray):
    q, r = np.linalg.qr(A)
    d = np.abs(np.diag(r))
    if d.size == 0 or d.min() <= RANK_TOL * max(d.max(), 1.0):
        raise RankDeficientDesign(f"design with {A.shape[1]} columns is rank deficient")
    return q, d


def residual_ss(A: np.ndarray, y: np.ndarray) -> float:
    q, _ = _qr(A)
    res = y - q @ (q.T @ y)
    return float(res @ res)


def _zero_rss(y: np.ndarray) -> float:
    """Residual sums of squares at or below this are rounding noise."""
    return 1e-12 * max(1.0, float(y @ y))


def log_det_gram(A: np.ndarray) -> float:
    """log |A^T A| from the diagonal of the QR factor."""
    _, d = _qr(A)
    return float(2.0 * np.log(d).sum())


@dataclass(frozen=True, eq=False)
class DesignPair:
    A0: np.ndarray
    A1: np.ndarray
    q0: float
    q1: float

    def __post_init__(self):
        A0 = np.atleast_2d(np.asarray(self.A0, dtype=float))
        A1 = np.atleast_2d(np.asarray(self.A1, dtype=float))
        if A0.shape[0] != A1.shape[0]:
            raise DomainViolation("designs must have the same number of rows")
        n, p0 = A0.shape
        p1 = A1.shape[1]
        if not p0 < p1 <= n - 1:
            raise DomainViolation(f"need p0 < p1 <= n - 1, got p0={p0}, p1={p1}, n={n}")
        q1, _ = _qr(A1)
        _qr(A0)
        if np.linalg.norm(A0 - q1 @ (q1.T @ A0)) > 1e-8 * max(1.0, np.linalg.norm(A0)):
            raise DomainViolation("the null design is not nested in the alternative")
        object.__setattr__(self, "A0", A0)
        object.__setattr__(self, "A1", A1)

    @property
    def n(self) -> int:
        return self.A0.shape[0]

    @property
    def p0(self) -> int:
        return self.A0.shape[1]

    @property
    def p1(self) -> int:
        return self.A1.shape[1]

    @property
    def n01(self) -> int:
        return max(self.p0, self.p1) + 1

    def as_test(self) -> NestedLinear:
        return NestedLinear(self.A0, self.A1, self.q0, self.q1)


@dataclass(frozen=True)
class LinearFit:
    R0: float
    R1: float
    F: float
    n: int
    p0: int
    p1: int


def fit(design: DesignPair, y) -> LinearFit:
    y = as_values(y)
    if y.size != design.n:
        raise DomainViolation("response length does not match the design")
    r0 = residual_ss(design.A0, y)
    r1 = residual_ss(design.A1, y)
    if r1 <= _zero_rss(y):
        raise DomainViolation("alternative fits the data exactly")
    n, p0, p1 = design.n, design.p0, design.p1
    F = ((r0 - r1) / (p1 - p0)) / (r1 / (n - p1))
    return LinearFit(r0, r1, F, n, p0, p1)


def gl_marginal_log(A: np.ndarray, y: np.ndarray, q: float) -> float:
    """log of the marginal density with the prior constant set to one.

    ``m = (2 pi)^{-(n-p)/2} |A^T A|^{-1/2} Gamma(k/2) (R/2)^{-k/2} / 2`` with
    ``k = n - p + q``.
    """
    A = np.atleast_2d(np.asarray(A, dtype=float))
    y = np.asarray(y, dtype=float)
    n, p = A.shape
    k = n - p + q
    if k <= 0:
        raise DomainViolation(f"n - p + q must be positive, got {k}")
    R = residual_ss(A, y)
    if R <= _zero_rss(y):
        raise DomainViolation("zero residual sum of squares")
    return (
        -(n - p) / 2.0 * LOG_2PI
        - 0.5 * log_det_gram(A)
        - math.log(2.0)
        + special.gammaln(k / 2.0)
        - k / 2.0 * math.log(R / 2.0)
    )


def gl_bf01(design: DesignPair, y, rows: Sequence[int] | None = None) -> LogValue:
    """log B01 on all rows, or on the training rows ``rows``."""
    y = as_values(y)
    A0, A1 = design.A0, design.A1
    if rows is not None:
        rows = list(rows)
        A0, A1, y = A0[rows], A1[rows], y[rows]
    return LogValue.of(gl_marginal_log(A0, y, design.q0) - gl_marginal_log(A1, y, design.q1))


def gl_empirical_bound(
    design: DesignPair, y, subsample: int | None = None, seed: int = 0
) -> IbfBounds:
    """Empirical and arithmetic bounds over row subsets of size ``max(p0, p1) + 1``.

    With ``subsample`` set, that many subsets are drawn at random instead of
    enumerating all of them.
    """
    y = as_values(y)
    if subsample is None:
        cand = mts.enumerate_mts(design.n, design.n01)
    else:
        cand = mts.random_subsample(design.n, design.n01, subsample, seed)
    idx = mts.filter_proper(y, design.as_test(), cand)
    if not idx:
        raise ImproperTrainingSample("no proper training subsets")
    b01 = gl_bf01(design, y)
    logs = [gl_bf01(design, y, rows).log_magnitude for rows in idx]
    return assemble_bounds(b01.log_magnitude, logs, idx)


@mts.is_proper.register
def _(test: NestedLinear, y, idx):
    rows = list(idx)
    try:
        log_det_gram(np.asarray(test.A0)[rows])
        return residual_ss(np.asarray(test.A1)[rows], y[rows]) > _zero_rss(y[rows])
    except RankDeficientDesign:
        return False


# ------------------------------------------------------------- one-way ANOVA


def q_preset(kind: PriorKind, p0: int, p1: int) -> tuple[float, float]:
    if kind is PriorKind.FULL_JEFFREYS:
        return float(p0), float(p1)
    if kind is PriorKind.MODIFIED_JEFFREYS:
        return 0.0, float(p1 - p0)
    return 0.0, 0.0


def anova_design(test: OneWayAnova) -> DesignPair:
    n, m = test.n, test.m
    A1 = np.zeros((n, m))
    A1[np.arange(n), np.repeat(np.arange(m), test.group_sizes)] = 1.0
    q0, q1 = q_preset(test.prior_kind, 1, m)
    return DesignPair(np.ones((n, 1)), A1, q0, q1)


def anova_from_groups(groups: Sequence[Sequence[float]], prior_kind=PriorKind.FULL_JEFFREYS):
    """Pack grouped data into a test description and a flat response vector."""
    arrays = [as_values(g) for g in groups]
    return OneWayAnova(tuple(a.size for a in arrays), prior_kind), np.concatenate(arrays)


def stratified_training_rows(group_sizes: Sequence[int]) -> Iterator[tuple[int, ...]]:
    """Row subsets with one group sampled twice and every other group once.

    These are exactly the size ``m + 1`` subsets on which the group design
    has full rank. Output is in lexicographic order.
    """
    starts = np.concatenate([[0], np.cumsum(group_sizes)[:-1]]).astype(int)
    ranges = [range(s, s + k) for s, k in zip(starts, group_sizes)]
    out = []
    for j, rj in enumerate(ranges):
        others = [r if i != j else None for i, r in enumerate(ranges)]
        for pair in itertools.combinations(rj, 2):
            singles = [r for r in others if r is not None]
            for pick in itertools.product(*singles):
                out.append(tuple(sorted(pair + pick)))
    return iter(sorted(out))


def _exponent(test: OneWayAnova) -> int:
    if test.prior_kind is PriorKind.FULL_JEFFREYS:
        return test.n
    if test.prior_kind is PriorKind.MODIFIED_JEFFREYS:
        return test.n - 1
    raise NonExistentBound(
        "under the reference prior the trained factor tends to zero or infinity "
        "with the training sample, so no finite bound exists"
    )


def _check_anova(test: OneWayAnova):
    if test.n < test.m + 2:
        raise InsufficientData(f"need n >= m + 2 = {test.m + 2}, got {test.n}")


def anova_theoretical_upper10(test: OneWayAnova, F: float) -> LogValue:
    """``0.5 [log(2/(m+1)) + log(n / prod n_i) + e log(1 + (m-1) F / (n-m))]``.

    ``e = n`` for the full Jeffreys prior and ``n - 1`` for the modified one.
    """
    _check_anova(test)
    e = _exponent(test)
    n, m = test.n, test.m
    log_prod = float(np.sum(np.log(test.group_sizes)))
    return LogValue.of(
        0.5 * (math.log(2.0 / (m + 1)) + math.log(n) - log_prod + e * math.log1p((m - 1) * F / (n - m)))
    )


def anova_ss_bf01(test: OneWayAnova, F: float) -> LogValue:
    """Bayes factor for H0 with the training constants fixed by an ideal training sample."""
    upper = anova_theoretical_upper10(test, F)
    return LogValue.of(-upper.log_magnitude)


def anova_ss_bf01_from_p(test: OneWayAnova, p: float) -> LogValue:
    """The same Bayes factor written through the p-value of the F test."""
    _check_anova(test)
    F = f_quantile(1.0 - p, test.m - 1, test.n - test.m)
    return anova_ss_bf01(test, F)


def anova_bounds(test: OneWayAnova, y) -> IbfBounds:
    """Theoretical, empirical and arithmetic bounds for the one-way layout.

    ``y`` lists the observations group by group in the order of
    ``test.group_sizes``. The reference prior has no finite bound.
    """
    _check_anova(test)
    _exponent(test)
    y = as_values(y)
    design = anova_design(test)
    m = test.m
    idx = [rows for rows in stratified_training_rows(test.group_sizes)
           if mts.is_proper(design.as_test(), y, rows)]
    if not idx:
        raise ImproperTrainingSample("every stratified training subset has zero residual")
    b01 = gl_bf01(design, y)
    logs = [gl_bf01(design, y, rows).log_magnitude for rows in idx]
    sup = -(m - 1) / 2.0 * LOG_2PI + 0.5 * math.log(2.0 / (m + 1))
    return assemble_bounds(
        b01.log_magnitude, logs, idx, theoretical_sup=sup,
        notes="training ratio R1/R0 tends to one as the group means of the subset coincide",
    )
