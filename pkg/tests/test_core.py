import math

import numpy as np
import pytest
from hypothesis import given, strategies as st
from numpy.testing import assert_allclose

from obf import core
from obf.core import (
    BoundReport,
    DomainViolation,
    ImproperTrainingSample,
    InsufficientData,
    LogValue,
    NonExistentBound,
    RankDeficientDesign,
    Variant,
    assemble_bounds,
    bound_chain_check,
    reciprocal,
)

finite_logs = st.floats(-50, 50, allow_nan=False)


class TestLogValue:
    def test_exact_zero_normalised(self):
        z = LogValue(-math.inf)
        assert z.is_zero
        assert z.value == 0.0
        assert LogValue.zero() == z
        assert not z.is_finite

    def test_nan_rejected(self):
        with pytest.raises(DomainViolation):
            LogValue(float("nan"))

    def test_from_value(self):
        assert LogValue.from_value(0.0).is_zero
        assert_allclose(LogValue.from_value(4.0).log_magnitude, math.log(4.0))
        with pytest.raises(DomainViolation):
            LogValue.from_value(-1.0)

    def test_log10(self):
        assert_allclose(LogValue.from_value(1000.0).log10, 3.0)

    @given(finite_logs, finite_logs)
    def test_mul_div_are_log_add_sub(self, a, b):
        x, y = LogValue(a), LogValue(b)
        assert (x * y).log_magnitude == a + b
        assert (x / y).log_magnitude == a - b

    def test_zero_arithmetic(self):
        z, one = LogValue.zero(), LogValue(0.0)
        assert (z * one).is_zero
        assert (z / one).is_zero
        with pytest.raises(DomainViolation):
            one / z

    def test_ordering(self):
        assert LogValue.zero() < LogValue(-700.0) < LogValue(0.0)


class TestReciprocal:
    def test_unity(self):
        assert reciprocal(LogValue(0.0)).log_magnitude == 0.0

    def test_four(self):
        assert_allclose(reciprocal(LogValue.from_value(4.0)).value, 0.25)

    def test_zero_rejected(self):
        with pytest.raises(DomainViolation):
            reciprocal(LogValue.zero())

    @given(finite_logs)
    def test_orientation_sums_to_zero(self, a):
        assert a + reciprocal(LogValue(a)).log_magnitude == 0.0


class TestBoundChainCheck:
    def test_all_equal(self):
        res = bound_chain_check(LogValue(0.0), [LogValue(0.0)] * 3)
        assert_allclose(res.aibf01.log_magnitude, 0.0, atol=1e-15)
        assert res.lower01_emp.log_magnitude == 0.0
        assert res.ordered

    def test_hand_example(self):
        res = bound_chain_check(LogValue(math.log(2)), [LogValue(0.0), LogValue(math.log(4))])
        assert_allclose(res.lower01_emp.value, 0.5)
        assert_allclose(res.aibf01.value, 0.8)
        assert res.ordered

    def test_exact_zero_rejected(self):
        with pytest.raises(DomainViolation):
            bound_chain_check(LogValue(0.0), [LogValue(0.0), LogValue.zero()])

    def test_empty_rejected(self):
        with pytest.raises(ImproperTrainingSample):
            bound_chain_check(LogValue(0.0), [])

    @given(finite_logs, st.lists(st.floats(-30, 30, allow_nan=False), min_size=1, max_size=20))
    def test_lower_never_exceeds_average(self, full, logs):
        res = bound_chain_check(LogValue(full), [LogValue(v) for v in logs])
        assert res.ordered


class TestAssembleBounds:
    def test_reciprocal_pairs(self):
        b = assemble_bounds(0.3, [-1.0, -0.2, -0.5], [(0,), (1,), (2,)], theoretical_sup=0.0)
        assert b.empirical_upper10.value.log_magnitude == -b.empirical_lower01.value.log_magnitude
        assert b.theoretical_upper10.value.log_magnitude == -b.theoretical_lower01.value.log_magnitude
        assert b.empirical_upper10.attainer == (1,)
        assert_allclose(b.empirical_upper10.value.log_magnitude, -0.3 - 0.2)

    def test_ties_go_to_first(self):
        b = assemble_bounds(0.0, [-1.0, -0.5, -0.5], [(0, 1), (0, 2), (1, 2)])
        assert b.empirical_upper10.attainer == (0, 2)

    def test_reports_order(self):
        b = assemble_bounds(0.0, [-1.0], [(0,)], theoretical_sup=0.0)
        variants = [r.variant for r in b.reports()]
        assert variants == [
            Variant.PLAIN01,
            Variant.THEORETICAL_LOWER01,
            Variant.THEORETICAL_UPPER10,
            Variant.EMPIRICAL_LOWER01,
            Variant.EMPIRICAL_UPPER10,
            Variant.AIBF10,
        ]

    def test_no_training_samples(self):
        with pytest.raises(ImproperTrainingSample):
            assemble_bounds(0.0, [], [])


def test_exit_codes_distinct():
    kinds = [DomainViolation, NonExistentBound, ImproperTrainingSample, RankDeficientDesign, InsufficientData]
    codes = [k("x").exit_code for k in kinds]
    assert len(set(codes)) == len(codes)
    assert NonExistentBound("x").exit_code == 3


def test_model_test_validation_and_mts_size():
    assert core.NormalScale(1.0).mts_size == 2
    assert core.Exponential(2.0).mts_size == 1
    assert core.PoissonVsGeometric().mts_size == 1
    assert core.OneWayAnova((2, 3, 2)).mts_size == 4
    with pytest.raises(DomainViolation):
        core.Exponential(-1.0)
    with pytest.raises(DomainViolation):
        core.NormalScale(0.0)
    with pytest.raises(DomainViolation):
        core.PoissonVsNegBinomial(0)


def test_as_values():
    assert_allclose(core.as_values(core.Sample([1, 2, 3])), [1.0, 2.0, 3.0])
    with pytest.raises(InsufficientData):
        core.as_values([])
    with pytest.raises(DomainViolation):
        core.as_values([1.0, np.inf])


def test_bound_report_defaults():
    r = BoundReport(Variant.GS10, LogValue(0.0))
    assert r.attainer is None
    assert r.notes == ""
