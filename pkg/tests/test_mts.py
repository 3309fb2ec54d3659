import itertools
import math

import numpy as np
import pytest
from hypothesis import given, strategies as st
from scipy import integrate

from obf import mts
from obf.core import (
    DomainViolation,
    Exponential,
    InsufficientData,
    NormalMeanUnknownVar,
    PoissonVsGeometric,
    PoissonVsNegBinomial,
)


def test_enumerate_small():
    assert list(mts.enumerate_mts(4, 2)) == [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)]
    assert mts.count(4, 2) == 6
    assert len(list(mts.enumerate_mts(5, 3))) == 10


def test_enumerate_insufficient():
    with pytest.raises(InsufficientData):
        mts.enumerate_mts(3, 4)


def test_enumerate_cap():
    with pytest.raises(DomainViolation):
        mts.enumerate_mts(100, 5, cap=1000)


def test_enumerate_is_lazy():
    it = mts.enumerate_mts(60, 5)
    assert next(it) == (0, 1, 2, 3, 4)


@pytest.mark.parametrize("n", range(1, 13))
def test_cardinality_and_order(n):
    for k in range(1, n + 1):
        got = list(mts.enumerate_mts(n, k))
        assert len(got) == math.comb(n, k)
        assert got == sorted(got)
        assert all(all(a < b for a, b in zip(t, t[1:])) for t in got)


@given(st.integers(1, 12).flatmap(lambda n: st.tuples(st.just(n), st.integers(1, n))))
def test_unrank_matches_enumeration(nk):
    n, k = nk
    for r, t in enumerate(itertools.combinations(range(n), k)):
        assert mts.unrank(r, n, k) == t


class TestRandomSubsample:
    def test_exhaustive_corner(self):
        got = mts.random_subsample(10, 2, 45, seed=3)
        assert len(set(got)) == 45
        assert set(got) == set(mts.enumerate_mts(10, 2))

    def test_deterministic(self):
        assert mts.random_subsample(30, 3, 20, 9) == mts.random_subsample(30, 3, 20, 9)

    def test_distinct(self):
        got = mts.random_subsample(100, 2, 50, seed=1)
        assert len(set(got)) == 50

    @given(st.integers(2, 10), st.integers(0, 2**32))
    def test_subset_of_enumeration(self, n, seed):
        k = min(3, n)
        c = min(5, math.comb(n, k))
        full = set(mts.enumerate_mts(n, k))
        assert set(mts.random_subsample(n, k, c, seed)) <= full

    def test_too_many(self):
        with pytest.raises(DomainViolation):
            mts.random_subsample(5, 2, 11, 0)

    def test_huge_space(self):
        got = mts.random_subsample(10**6, 5, 10, 2)
        assert len(set(got)) == 10
        assert all(len(t) == 5 and max(t) < 10**6 for t in got)


class TestFilterProper:
    def test_nb_zero_excluded(self):
        y = np.array([0.0, 2.0, 0.0, 1.0])
        got = mts.filter_proper(y, PoissonVsNegBinomial(1), mts.enumerate_mts(4, 1))
        assert got == [(1,), (3,)]

    def test_nb_zero_marginal_diverges(self):
        # single observation y under NB(r=1) with prior theta^{-1/2}(1-theta)^{-1}:
        # the integrand is theta^{1/2} (1-theta)^{y-1}, which is not integrable at 1 for y=0
        def truncated(y, eps):
            return integrate.quad(lambda t: t**0.5 * (1 - t) ** (y - 1), 0, 1 - eps, limit=200)[0]

        grow = [truncated(0, eps) for eps in (1e-3, 1e-6, 1e-9)]
        assert grow[1] - grow[0] > 6.0 and grow[2] - grow[1] > 6.0
        conv = [truncated(1, eps) for eps in (1e-3, 1e-6, 1e-9)]
        assert abs(conv[2] - conv[1]) < 1e-5

    def test_exponential_positive_retained(self):
        assert mts.filter_proper([2.0, 0.0], Exponential(1.0), [(0,), (1,)]) == [(0,)]

    def test_unknown_variance_equal_pair_excluded(self):
        y = [1.0, 1.0, 2.0]
        got = mts.filter_proper(y, NormalMeanUnknownVar(0.0), mts.enumerate_mts(3, 2))
        assert got == [(0, 2), (1, 2)]

    def test_pg_keeps_everything(self):
        y = np.array([0.0, 0.0, 3.0])
        assert len(mts.proper_training_samples(y, PoissonVsGeometric())) == 3

    def test_unregistered_test(self):
        class Other(Exponential):
            pass

        # subclasses dispatch to the parent rule
        assert mts.is_proper(Other(1.0), np.array([1.0]), (0,))
