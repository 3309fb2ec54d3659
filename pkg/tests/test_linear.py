import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from numpy.testing import assert_allclose

import oracles as O
from obf import linear, mts
from obf.core import (
    DomainViolation,
    ImproperTrainingSample,
    InsufficientData,
    NonExistentBound,
    OneWayAnova,
    PriorKind,
    RankDeficientDesign,
)


def _simple_design(n, rng, q0=1.0, q1=2.0):
    x = rng.normal(size=n)
    return linear.DesignPair(np.ones((n, 1)), np.column_stack([np.ones(n), x]), q0, q1), x


class TestDesignPair:
    def test_dimensions(self):
        d, _ = _simple_design(6, np.random.default_rng(0))
        assert (d.n, d.p0, d.p1, d.n01) == (6, 1, 2, 3)

    def test_p1_too_large(self):
        with pytest.raises(DomainViolation):
            linear.DesignPair(np.ones((3, 1)), np.eye(3), 0, 0)

    def test_not_nested(self):
        x = np.arange(5.0)
        with pytest.raises(DomainViolation):
            linear.DesignPair(x[:, None] ** 2, np.column_stack([np.ones(5), x]), 0, 0)

    def test_rank_deficient(self):
        A1 = np.column_stack([np.ones(5), 2 * np.ones(5)])
        with pytest.raises(RankDeficientDesign):
            linear.DesignPair(np.ones((5, 1)), A1, 0, 0)


class TestFit:
    def test_constant_response(self):
        d, _ = _simple_design(5, np.random.default_rng(1))
        y = np.full(5, 3.0)
        assert linear.residual_ss(d.A0, y) == pytest.approx(0.0, abs=1e-20)
        assert linear.residual_ss(d.A1, y) == pytest.approx(0.0, abs=1e-20)
        with pytest.raises(DomainViolation):
            linear.fit(d, y)

    @settings(max_examples=50)
    @given(st.integers(0, 2**32 - 1))
    def test_projection_monotone(self, seed):
        rng = np.random.default_rng(seed)
        d, _ = _simple_design(8, rng)
        f = linear.fit(d, rng.normal(size=8))
        assert f.R0 >= f.R1 > 0
        assert_allclose(f.R0 / f.R1, 1 + (f.p1 - f.p0) / (f.n - f.p1) * f.F, rtol=1e-10)

    def test_length_mismatch(self):
        d, _ = _simple_design(5, np.random.default_rng(1))
        with pytest.raises(DomainViolation):
            linear.fit(d, np.ones(4))


class TestMarginal:
    @pytest.mark.parametrize("p, q", [(1, 0.0), (1, 1.0), (2, 2.0), (2, 1.0), (3, 0.0)])
    def test_against_quadrature(self, p, q):
        rng = np.random.default_rng(42)
        n = 7
        A = np.column_stack([np.ones(n)] + [rng.normal(size=n) for _ in range(p - 1)])
        y = rng.normal(size=n)
        assert_allclose(linear.gl_marginal_log(A, y, q), O.linear_log_marginal(A, y, q), rtol=1e-9)

    @pytest.mark.parametrize("q", [0.0, 1.0])
    def test_against_nested_quadrature(self, q):
        rng = np.random.default_rng(3)
        a = rng.normal(size=5)
        y = rng.normal(size=5)
        assert_allclose(linear.gl_marginal_log(a[:, None], y, q), O.linear_dblquad_log_marginal(a, y, q), rtol=1e-9)

    def test_needs_positive_degrees(self):
        with pytest.raises(DomainViolation):
            linear.gl_marginal_log(np.eye(3)[:, :2], np.array([1.0, 2.0, 3.0]), -1.0)

    def test_trained_identity_exhaustive(self):
        rng = np.random.default_rng(42)
        d, x = _simple_design(6, rng)
        y = 1.0 + 0.5 * x + rng.normal(size=6)
        o0 = O.linear_log_marginal(d.A0, y, d.q0)
        o1 = O.linear_log_marginal(d.A1, y, d.q1)
        full = linear.gl_bf01(d, y).log_magnitude
        for rows in mts.enumerate_mts(6, d.n01):
            r = list(rows)
            oracle = (o0 - O.linear_log_marginal(d.A0[r], y[r], d.q0)) - (o1 - O.linear_log_marginal(d.A1[r], y[r], d.q1))
            assert_allclose(full - linear.gl_bf01(d, y, rows).log_magnitude, oracle, rtol=1e-9)


class TestEmpiricalBound:
    def test_chain(self):
        rng = np.random.default_rng(5)
        d, x = _simple_design(8, rng)
        b = linear.gl_empirical_bound(d, x + rng.normal(size=8))
        assert b.empirical_lower01.value.log_magnitude <= -b.aibf10.value.log_magnitude
        assert len(b.empirical_upper10.attainer) == 3

    def test_subsample_deterministic(self):
        rng = np.random.default_rng(5)
        d, x = _simple_design(30, rng)
        y = x + rng.normal(size=30)
        a = linear.gl_empirical_bound(d, y, subsample=200, seed=9)
        b = linear.gl_empirical_bound(d, y, subsample=200, seed=9)
        assert a == b


class TestAnovaDesign:
    def test_stratified_rows_are_the_full_rank_subsets(self):
        sizes = (2, 3, 2)
        test = OneWayAnova(sizes)
        A1 = linear.anova_design(test).A1
        got = list(linear.stratified_training_rows(sizes))
        brute = [
            rows for rows in itertools.combinations(range(test.n), test.m + 1)
            if np.linalg.matrix_rank(A1[list(rows)]) == test.m
        ]
        assert got == brute
        assert len(got) == 1 * 3 * 2 + 3 * 2 * 2 + 2 * 3 * 1

    def test_q_presets(self):
        assert linear.q_preset(PriorKind.FULL_JEFFREYS, 1, 3) == (1.0, 3.0)
        assert linear.q_preset(PriorKind.MODIFIED_JEFFREYS, 1, 3) == (0.0, 2.0)
        assert linear.q_preset(PriorKind.REFERENCE, 1, 3) == (0.0, 0.0)


class TestAnovaBayesFactor:
    def test_f_zero(self):
        test = OneWayAnova((2, 2))
        assert_allclose(linear.anova_ss_bf01(test, 0.0).value, math.sqrt(1.5), rtol=1e-14)

    def test_f_zero_general(self):
        test = OneWayAnova((2, 3, 4))
        want = math.sqrt((test.m + 1) / 2 * (2 * 3 * 4) / test.n)
        assert_allclose(linear.anova_ss_bf01(test, 0.0).value, want, rtol=1e-14)

    def test_full_jeffreys_upper(self):
        test = OneWayAnova((2, 3))
        want = 0.5 * (math.log(2 / 3) + math.log(5 / 6) + 5 * math.log(1 + 9 / 3))
        assert_allclose(linear.anova_theoretical_upper10(test, 9.0).log_magnitude, want, rtol=1e-14)

    def test_modified_jeffreys_exponent(self):
        test = OneWayAnova((2, 3), PriorKind.MODIFIED_JEFFREYS)
        want = 0.5 * (math.log(2 / 3) + math.log(5 / 6) + 4 * math.log(1 + 9 / 3))
        assert_allclose(linear.anova_theoretical_upper10(test, 9.0).log_magnitude, want, rtol=1e-14)

    def test_reference(self):
        test = OneWayAnova((2, 3), PriorKind.REFERENCE)
        with pytest.raises(NonExistentBound):
            linear.anova_theoretical_upper10(test, 1.0)

    def test_too_few(self):
        with pytest.raises(InsufficientData):
            linear.anova_theoretical_upper10(OneWayAnova((1, 2)), 1.0)

    def test_upper_matches_trained_bound(self):
        # the closed form equals the full-data factor over the training supremum
        rng = np.random.default_rng(11)
        for kind in (PriorKind.FULL_JEFFREYS, PriorKind.MODIFIED_JEFFREYS):
            test, y = linear.anova_from_groups([rng.normal(size=k) for k in (3, 4, 2)], kind)
            F = linear.fit(linear.anova_design(test), y).F
            b = linear.anova_bounds(test, y)
            assert_allclose(
                linear.anova_theoretical_upper10(test, F).log_magnitude,
                b.theoretical_upper10.value.log_magnitude, rtol=1e-10,
            )


class TestAnovaBounds:
    def test_example_data_is_improper(self):
        test = OneWayAnova((2, 2))
        with pytest.raises(ImproperTrainingSample):
            linear.anova_bounds(test, [0.0, 0.0, 1.0, 1.0])

    def test_training_ratio_below_one(self):
        rng = np.random.default_rng(2)
        test, y = linear.anova_from_groups([rng.normal(size=k) for k in (3, 3, 2)])
        d = linear.anova_design(test)
        for rows in linear.stratified_training_rows(test.group_sizes):
            r = list(rows)
            ratio = linear.residual_ss(d.A1[r], y[r]) / linear.residual_ss(d.A0[r], y[r])
            assert ratio ** (test.m + 1) <= 1 + 1e-12

    def test_ratio_tends_to_one_as_subset_means_meet(self):
        d = linear.anova_design(OneWayAnova((2, 3)))
        ratios = []
        for gap in (1.0, 0.1, 0.01, 0.0):
            y = np.array([0.0, 2.0, 1.0 + gap, 5.0, -3.0])
            r = [0, 1, 2]
            ratios.append(linear.residual_ss(d.A1[r], y[r]) / linear.residual_ss(d.A0[r], y[r]))
        assert np.all(np.diff(ratios) > 0)
        assert_allclose(ratios[-1], 1.0, rtol=1e-14)

    def test_supremum_attained(self):
        test = OneWayAnova((2, 3))
        b = linear.anova_bounds(test, [0.0, 2.0, 1.0, 5.0, -3.0])
        assert b.empirical_upper10.attainer == (0, 1, 2)
        assert_allclose(
            b.empirical_upper10.value.log_magnitude, b.theoretical_upper10.value.log_magnitude, rtol=1e-12
        )

    def test_reference_prior(self):
        with pytest.raises(NonExistentBound):
            linear.anova_bounds(OneWayAnova((2, 3), PriorKind.REFERENCE), [0.1, 0.5, 1.0, 1.7, 2.1])

    def test_from_p(self):
        test = OneWayAnova((3, 3, 4))
        F = 2.5
        from obf.specialfn import f_cdf

        p = 1 - f_cdf(F, 2, 7)
        assert_allclose(
            linear.anova_ss_bf01_from_p(test, p).log_magnitude, linear.anova_ss_bf01(test, F).log_magnitude, rtol=1e-9
        )
