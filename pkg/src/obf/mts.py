"""Minimal training samples: enumeration, subsampling and properness."""

from __future__ import annotations

import functools
import itertools
import math
from collections.abc import Iterable, Iterator

import numpy as np

from .core import DomainViolation, InsufficientData, ModelTest, as_values

TrainingIndex = tuple[int, ...]

DEFAULT_CAP = 10**7


def count(n: int, k: int) -> int:
    return math.comb(n, k)


def _check(n, k):
    if k < 1:
        raise DomainViolation(f"training sample size must be positive, got {k}")
    if k > n:
        raise InsufficientData(f"cannot draw {k} training points from {n}")


def enumerate_mts(n: int, k: int, cap: int = DEFAULT_CAP) -> Iterator[TrainingIndex]:
    """All k-subsets of range(n) as sorted tuples, lexicographically, lazily."""
    _check(n, k)
    if math.comb(n, k) > cap:
        raise DomainViolation(
            f"C({n},{k}) = {math.comb(n, k)} exceeds the enumeration cap {cap}; "
            "use random_subsample"
        )
    return itertools.combinations(range(n), k)


def unrank(rank: int, n: int, k: int) -> TrainingIndex:
    """The combination at position ``rank`` of the lexicographic order."""
    out = []
    x = 0
    for i in range(k, 0, -1):
        while True:
            c = math.comb(n - x - 1, i - 1)
            if rank < c:
                break
            rank -= c
            x += 1
        out.append(x)
        x += 1
    return tuple(out)


def random_subsample(n: int, k: int, count: int, seed: int) -> list[TrainingIndex]:
    """``count`` distinct k-subsets drawn uniformly, sorted lexicographically."""
    _check(n, k)
    total = math.comb(n, k)
    if count < 0 or count > total:
        raise DomainViolation(f"cannot draw {count} distinct subsets out of {total}")
    rng = np.random.default_rng(seed)
    if total < 2**62:
        ranks = rng.choice(total, size=count, replace=False)
        return sorted(unrank(int(r), n, k) for r in ranks)
    seen: set[TrainingIndex] = set()
    while len(seen) < count:
        seen.add(tuple(sorted(int(i) for i in rng.choice(n, size=k, replace=False))))
    return sorted(seen)


@functools.singledispatch
def is_proper(test: ModelTest, y: np.ndarray, idx: TrainingIndex) -> bool:
    """Whether ``y[idx]`` gives finite, non-zero marginals under both models."""
    raise DomainViolation(f"no properness rule for {type(test).__name__}")


def filter_proper(sample, test: ModelTest, candidates: Iterable[TrainingIndex]) -> list[TrainingIndex]:
    y = as_values(sample)
    return [tuple(idx) for idx in candidates if is_proper(test, y, tuple(idx))]


def proper_training_samples(sample, test: ModelTest, cap: int = DEFAULT_CAP) -> list[TrainingIndex]:
    y = as_values(sample)
    return filter_proper(y, test, enumerate_mts(y.size, test.mts_size, cap))
