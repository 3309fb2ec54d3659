"""Shared types for log-space Bayes factors, bound reports and errors.

Every Bayes factor in the package is carried on the natural-log scale. A
:class:`LogValue` holds the log magnitude together with an explicit flag for
an exact zero, so that improper training samples and degenerate limits never
leak out as ``-inf`` arithmetic.
"""

from __future__ import annotations

import enum
import functools
import math
from collections.abc import Sequence
from dataclasses import dataclass, field

import numpy as np
from scipy.special import logsumexp


class EvidenceError(Exception):
    """Base class for all library errors.

    ``exit_code`` is the process status used by the command line front end.
    """

    kind = "EvidenceError"
    exit_code = 1

    def __init__(self, detail: str):
        super().__init__(detail)
        self.detail = detail


class DomainViolation(EvidenceError, ValueError):
    kind = "DomainViolation"
    exit_code = 2


class NonExistentBound(EvidenceError):
    kind = "NonExistentBound"
    exit_code = 3


class ImproperTrainingSample(EvidenceError):
    kind = "ImproperTrainingSample"
    exit_code = 4


class RankDeficientDesign(EvidenceError):
    kind = "RankDeficientDesign"
    exit_code = 5


class InsufficientData(EvidenceError, ValueError):
    kind = "InsufficientData"
    exit_code = 6


@functools.total_ordering
@dataclass(frozen=True)
class LogValue:
    """A non-negative quantity stored as its natural log.

    ``is_zero`` marks an exact zero; in that case ``log_magnitude`` is
    ``-inf`` and carries no further information.
    """

    log_magnitude: float
    is_zero: bool = False

    def __post_init__(self):
        if self.is_zero:
            object.__setattr__(self, "log_magnitude", -math.inf)
        elif math.isnan(self.log_magnitude):
            raise DomainViolation("log magnitude is NaN")
        elif self.log_magnitude == -math.inf:
            object.__setattr__(self, "is_zero", True)

    @classmethod
    def of(cls, log_magnitude: float) -> LogValue:
        return cls(float(log_magnitude))

    @classmethod
    def zero(cls) -> LogValue:
        return cls(-math.inf, True)

    @classmethod
    def from_value(cls, x: float) -> LogValue:
        if x < 0 or math.isnan(x):
            raise DomainViolation(f"cannot take the log of {x}")
        return cls.zero() if x == 0 else cls(math.log(x))

    @property
    def value(self) -> float:
        return 0.0 if self.is_zero else math.exp(self.log_magnitude)

    @property
    def log10(self) -> float:
        return self.log_magnitude / math.log(10.0)

    @property
    def is_finite(self) -> bool:
        return not self.is_zero and math.isfinite(self.log_magnitude)

    def __mul__(self, other: LogValue) -> LogValue:
        if self.is_zero or other.is_zero:
            return LogValue.zero()
        return LogValue(self.log_magnitude + other.log_magnitude)

    def __truediv__(self, other: LogValue) -> LogValue:
        if other.is_zero:
            raise DomainViolation("division by an exact zero")
        if self.is_zero:
            return LogValue.zero()
        return LogValue(self.log_magnitude - other.log_magnitude)

    def __lt__(self, other: LogValue) -> bool:
        return self.log_magnitude < other.log_magnitude


def reciprocal(value: LogValue) -> LogValue:
    """Flip the orientation of a Bayes factor (B01 <-> B10)."""
    if value.is_zero:
        raise DomainViolation("reciprocal of an exact zero")
    return LogValue(-value.log_magnitude)


@dataclass(frozen=True)
class Sample:
    values: tuple[float, ...]
    label: str = ""

    def __post_init__(self):
        object.__setattr__(self, "values", tuple(float(v) for v in self.values))

    def __len__(self):
        return len(self.values)

    def as_array(self) -> np.ndarray:
        return np.asarray(self.values, dtype=float)


def as_values(sample, min_size: int = 1) -> np.ndarray:
    """Coerce a :class:`Sample` or array-like into a finite 1-d float array."""
    if isinstance(sample, Sample):
        y = sample.as_array()
    else:
        y = np.atleast_1d(np.asarray(sample, dtype=float))
    if y.ndim != 1:
        raise DomainViolation("sample must be one-dimensional")
    if y.size < min_size:
        raise InsufficientData(f"need at least {min_size} observations, got {y.size}")
    if not np.all(np.isfinite(y)):
        raise DomainViolation("sample contains non-finite values")
    return y


class PriorKind(enum.Enum):
    FULL_JEFFREYS = "full-jeffreys"
    MODIFIED_JEFFREYS = "modified-jeffreys"
    REFERENCE = "reference"


class ModelTest:
    """Marker base for the supported pairs of nested models."""

    @property
    def mts_size(self) -> int:
        raise NotImplementedError


def _positive(name, x):
    if not (x > 0 and math.isfinite(x)):
        raise DomainViolation(f"{name} must be positive and finite, got {x}")


@dataclass(frozen=True)
class NormalScale(ModelTest):
    """H0: N(mu, 1/h0) against H1: N(mu, 1/h), mu unknown in both."""

    h0: float = 1.0

    def __post_init__(self):
        _positive("h0", self.h0)

    @property
    def mts_size(self):
        return 2


@dataclass(frozen=True)
class NormalMeanKnownVar(ModelTest):
    mu0: float = 0.0
    sigma0: float = 1.0

    def __post_init__(self):
        _positive("sigma0", self.sigma0)

    @property
    def mts_size(self):
        return 1


@dataclass(frozen=True)
class NormalMeanUnknownVar(ModelTest):
    mu0: float = 0.0

    @property
    def mts_size(self):
        return 2


@dataclass(frozen=True)
class SimpleNormalMean(ModelTest):
    """H0: N(0, 1) against H1: N(mu, 1) with the alternative's marginal taken as one."""

    @property
    def mts_size(self):
        return 1


@dataclass(frozen=True)
class Exponential(ModelTest):
    lambda0: float = 1.0

    def __post_init__(self):
        _positive("lambda0", self.lambda0)

    @property
    def mts_size(self):
        return 1


@dataclass(frozen=True)
class PoissonVsGeometric(ModelTest):
    @property
    def mts_size(self):
        return 1


@dataclass(frozen=True)
class PoissonVsNegBinomial(ModelTest):
    r: int = 1

    def __post_init__(self):
        if int(self.r) != self.r or self.r < 1:
            raise DomainViolation(f"r must be a positive integer, got {self.r}")

    @property
    def mts_size(self):
        return 1


@dataclass(frozen=True, eq=False)
class NestedLinear(ModelTest):
    A0: np.ndarray
    A1: np.ndarray
    q0: float
    q1: float

    @property
    def mts_size(self):
        return max(np.shape(self.A0)[1], np.shape(self.A1)[1]) + 1


@dataclass(frozen=True)
class OneWayAnova(ModelTest):
    group_sizes: tuple[int, ...]
    prior_kind: PriorKind = PriorKind.FULL_JEFFREYS

    def __post_init__(self):
        sizes = tuple(int(k) for k in self.group_sizes)
        if len(sizes) < 2 or min(sizes) < 1:
            raise DomainViolation("need at least two non-empty groups")
        object.__setattr__(self, "group_sizes", sizes)

    @property
    def m(self) -> int:
        return len(self.group_sizes)

    @property
    def n(self) -> int:
        return sum(self.group_sizes)

    @property
    def mts_size(self):
        return self.m + 1


class Variant(enum.Enum):
    THEORETICAL_LOWER01 = "TheoreticalLower01"
    THEORETICAL_UPPER10 = "TheoreticalUpper10"
    EMPIRICAL_LOWER01 = "EmpiricalLower01"
    EMPIRICAL_UPPER10 = "EmpiricalUpper10"
    AIBF10 = "AIBF10"
    EIBF10 = "EIBF10"
    SPBF10 = "SPBF10"
    EPBF10 = "EPBF10"
    GS10 = "GS10"
    PLAIN01 = "Plain01"


@dataclass(frozen=True)
class BoundReport:
    """One reported Bayes factor or bound.

    ``attainer`` is either a tuple of 0-based training-sample indices, a
    real point of the sample space at which a supremum is attained, or None.
    """

    variant: Variant
    value: LogValue
    attainer: tuple[int, ...] | float | None = None
    notes: str = ""


@dataclass(frozen=True)
class ChainCheck:
    aibf01: LogValue
    lower01_emp: LogValue
    ordered: bool


def _log_mean(logs: np.ndarray) -> float:
    return float(logsumexp(logs) - math.log(logs.size))


def bound_chain_check(b01_full: LogValue, b01_mts_values: Sequence[LogValue]) -> ChainCheck:
    """Arithmetic IBF and empirical lower bound from training-sample B01 values.

    ``aibf01 = b01_full / mean(mts)`` and ``lower01_emp = b01_full / max(mts)``;
    the lower bound can never exceed the average.
    """
    if len(b01_mts_values) == 0:
        raise ImproperTrainingSample("no training-sample Bayes factors supplied")
    if any(v.is_zero for v in b01_mts_values):
        raise DomainViolation("training-sample Bayes factor is an exact zero")
    logs = np.array([v.log_magnitude for v in b01_mts_values])
    aibf01 = b01_full / LogValue(_log_mean(logs))
    lower = b01_full / LogValue(float(logs.max()))
    return ChainCheck(aibf01, lower, lower.log_magnitude <= aibf01.log_magnitude + 1e-12)


@dataclass(frozen=True)
class IbfBounds:
    """The full family of bounds for one dataset and one model test."""

    full_bf01: BoundReport
    empirical_upper10: BoundReport
    empirical_lower01: BoundReport
    aibf10: BoundReport
    theoretical_upper10: BoundReport | None = None
    theoretical_lower01: BoundReport | None = None
    extra: tuple[BoundReport, ...] = field(default_factory=tuple)

    def reports(self) -> list[BoundReport]:
        out = [self.full_bf01]
        if self.theoretical_lower01 is not None:
            out.append(self.theoretical_lower01)
        if self.theoretical_upper10 is not None:
            out.append(self.theoretical_upper10)
        out += [self.empirical_lower01, self.empirical_upper10, self.aibf10]
        out += list(self.extra)
        return out


def assemble_bounds(
    log_b01_full: float,
    mts_log_b01: Sequence[float],
    attainers: Sequence,
    theoretical_sup: float | None = None,
    theoretical_attainer=None,
    notes: str = "",
) -> IbfBounds:
    """Build :class:`IbfBounds` from the full B01 and the per-training-sample B01.

    The trained factor for training sample l is ``B10(y) * B01(y(l))``, so
    the empirical upper bound uses the largest ``B01(y(l))``. Ties go to the
    first attainer, which is the lexicographically smallest when
    ``attainers`` is in enumeration order. ``theoretical_sup`` is the log of
    the supremum of ``B01(y(l))`` over the sample space.
    """
    logs = np.asarray(mts_log_b01, dtype=float)
    if logs.size == 0:
        raise ImproperTrainingSample("no proper training samples")
    b01 = LogValue.of(log_b01_full)
    chain = bound_chain_check(b01, [LogValue(float(v)) for v in logs])
    best = int(np.argmax(logs))
    att = attainers[best]
    upper = reciprocal(chain.lower01_emp)
    reports = dict(
        full_bf01=BoundReport(Variant.PLAIN01, b01, None, notes),
        empirical_upper10=BoundReport(Variant.EMPIRICAL_UPPER10, upper, att, notes),
        empirical_lower01=BoundReport(Variant.EMPIRICAL_LOWER01, chain.lower01_emp, att, notes),
        aibf10=BoundReport(Variant.AIBF10, reciprocal(chain.aibf01), None, notes),
    )
    if theoretical_sup is not None:
        t_upper = reciprocal(b01) * LogValue.of(theoretical_sup)
        reports["theoretical_upper10"] = BoundReport(
            Variant.THEORETICAL_UPPER10, t_upper, theoretical_attainer, notes
        )
        reports["theoretical_lower01"] = BoundReport(
            Variant.THEORETICAL_LOWER01, reciprocal(t_upper), theoretical_attainer, notes
        )
    return IbfBounds(**reports)
