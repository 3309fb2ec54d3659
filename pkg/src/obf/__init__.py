"""Bounds and calibration tools for intrinsic Bayes factors."""

from . import calibration, core, discrete, exponential, linear, montecarlo, mts, normal, specialfn
from .core import (
    BoundReport,
    DomainViolation,
    EvidenceError,
    IbfBounds,
    ImproperTrainingSample,
    InsufficientData,
    LogValue,
    NonExistentBound,
    RankDeficientDesign,
    Sample,
    Variant,
)

__all__ = [
    "BoundReport",
    "DomainViolation",
    "EvidenceError",
    "IbfBounds",
    "ImproperTrainingSample",
    "InsufficientData",
    "LogValue",
    "NonExistentBound",
    "RankDeficientDesign",
    "Sample",
    "Variant",
    "calibration",
    "core",
    "discrete",
    "exponential",
    "linear",
    "montecarlo",
    "mts",
    "normal",
    "specialfn",
]
