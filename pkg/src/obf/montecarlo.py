"""Seeded Monte Carlo studies of the bounds as the sample size grows.

Each replicate draws one stream of ``n_max`` observations and evaluates the
statistics of its scenario on every prefix ``y[:n]``. Replicate ``r`` uses
its own generator seeded by ``SeedSequence(seed, spawn_key=(r,))``, so the
output does not depend on how replicates are spread over workers.
"""

from __future__ import annotations

import csv
import math
import time
from collections.abc import Callable
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np
from scipy import special

from .core import DomainViolation, Exponential, ModelTest, PoissonVsGeometric, PoissonVsNegBinomial
from .discrete import LOG_GAMMA_3_2, pg_log_bf01
from .exponential import exp_log_bf01, exp_sp_log_bf10
from .specialfn import chi2_sf

LOG10 = math.log(10.0)


# ----------------------------------------------------------------- generators


@dataclass(frozen=True)
class Generator:
    """A data-generating distribution such as ``exponential:1`` or ``geometric:0.5``.

    ``exponential`` takes a rate, ``poisson`` a mean and ``geometric`` a
    success probability; geometric draws count failures before the first
    success.
    """

    family: str
    param: float

    @classmethod
    def parse(cls, text: str) -> Generator:
        try:
            family, value = text.split(":")
            gen = cls(family.strip().lower(), float(value))
        except ValueError as exc:
            raise DomainViolation(f"cannot parse generator {text!r}") from exc
        if gen.family not in ("exponential", "poisson", "geometric"):
            raise DomainViolation(f"unknown generator family {gen.family!r}")
        if not gen.param > 0 or (gen.family == "geometric" and gen.param > 1):
            raise DomainViolation(f"bad parameter for {gen.family}: {gen.param}")
        return gen

    def draw(self, rng: np.random.Generator, size: int) -> np.ndarray:
        if self.family == "exponential":
            return rng.exponential(1.0 / self.param, size)
        if self.family == "poisson":
            return rng.poisson(self.param, size).astype(float)
        return (rng.geometric(self.param, size) - 1).astype(float)

    def __str__(self):
        return f"{self.family}:{self.param:g}"


# ------------------------------------------------------------------ scenarios


@dataclass(frozen=True)
class Scenario:
    name: str
    statistics: tuple[str, ...]
    averaging: str  # "log" averages log values, "raw" averages the values themselves
    generator: str
    test: ModelTest
    compute: Callable[[np.ndarray, ModelTest], np.ndarray]
    description: str = ""


def _prefix(y):
    k = np.arange(1, y.size + 1, dtype=float)
    return k, np.cumsum(y)


def _exp_upper10(k, s, lam0):
    with np.errstate(divide="ignore", invalid="ignore"):
        out = -exp_log_bf01(k, s, lam0) - 1.0
    out[(k < 2) | (s <= 0)] = np.nan
    return out


def _exp_sp_vs_bound(y, test):
    k, s = _prefix(y)
    return np.column_stack([exp_sp_log_bf10(k, s, test.lambda0), _exp_upper10(k, s, test.lambda0)])


def _exp_ep_log_bf10(y, lam0):
    k, s = _prefix(y)
    n = y.size
    with np.errstate(divide="ignore"):
        logy = np.log(y)
    # terms[j, i] = log y_i - (k_j + 1) log(S_j + y_i) for i <= j
    terms = logy[None, :] - (k[:, None] + 1.0) * np.log(s[:, None] + y[None, :])
    terms[np.triu_indices(n, 1)] = -np.inf
    log_m1 = special.logsumexp(terms, axis=1) - np.log(k) + special.gammaln(k + 1.0)
    return log_m1 - (k * math.log(lam0) - lam0 * s)


def _exp_sp_vs_ep(y, test):
    k, s = _prefix(y)
    return np.column_stack([exp_sp_log_bf10(k, s, test.lambda0), _exp_ep_log_bf10(y, test.lambda0)])


def _log_robust(p):
    p = np.asarray(p, dtype=float)
    out = np.zeros_like(p)
    small = p < math.exp(-1.0)
    with np.errstate(divide="ignore", invalid="ignore"):
        out[small] = 1.0 + np.log(p[small]) + np.log(-np.log(p[small]))
    out[p == 0] = -np.inf
    return out


def _eplogp_vs_ibf(y, test):
    lam0 = test.lambda0
    k, s = _prefix(y)
    with np.errstate(divide="ignore", invalid="ignore"):
        log_lr = k * math.log(lam0) - lam0 * s - k * (np.log(k) - np.log(s) - 1.0)
        p = chi2_sf(np.maximum(-2.0 * log_lr, 0.0), 1)
    robust = _log_robust(p)
    lower = -_exp_upper10(k, s, lam0)
    return np.column_stack([robust, lower, robust - lower])


def _exp_sup_gap(y, test):
    lam0 = test.lambda0
    with np.errstate(divide="ignore"):
        emp = np.maximum.accumulate(np.log(y * lam0) - lam0 * y)
        gap = np.log(np.abs(np.exp(emp) - math.exp(-1.0)))
    return gap[:, None]


def _pg_prefix(y):
    k, s = _prefix(y)
    lpf = np.cumsum(special.gammaln(y + 1.0))
    return k, pg_log_bf01(k, s, lpf)


def _pg_bound(y, test):
    _, b01 = _pg_prefix(y)
    return (-b01 - LOG_GAMMA_3_2)[:, None]


def _pg_empirical(y, test):
    _, b01 = _pg_prefix(y)
    emp = -special.gammaln(np.minimum.accumulate(y) + 1.5)
    return np.column_stack([-b01 - LOG_GAMMA_3_2, -b01 + emp])


def _pg_aibf(y, test):
    k, b01 = _pg_prefix(y)
    log_mean = np.logaddexp.accumulate(-special.gammaln(y + 1.5)) - np.log(k)
    return np.column_stack([b01 + LOG_GAMMA_3_2, b01 - log_mean])


def _pnb_lower(y, test):
    r = test.r
    k, s = _prefix(y)
    with np.errstate(divide="ignore", invalid="ignore"):
        val = (
            k * math.lgamma(r)
            + special.gammaln(k * r + s + 0.5)
            + special.gammaln(s + 0.5)
            - np.cumsum(special.gammaln(y + r))
            - (s + 0.5) * np.log(k)
            - special.gammaln(r * k + 0.5)
            - special.gammaln(s)
            - 0.5 * math.log(math.pi)
        )
    val[s == 0] = np.nan
    return val[:, None]


SCENARIOS: dict[str, Scenario] = {
    sc.name: sc
    for sc in [
        Scenario("exp-sp-vs-bound", ("sp_bf10", "theoretical_upper10"), "log",
                 "exponential:1", Exponential(1.0), _exp_sp_vs_bound,
                 "SP Bayes factor against the theoretical IBF upper bound"),
        Scenario("exp-sp-vs-ep", ("sp_bf10", "ep_bf10"), "log",
                 "exponential:1", Exponential(1.0), _exp_sp_vs_ep,
                 "SP against EP Bayes factor"),
        Scenario("eplogp-vs-ibf", ("robust_bound", "ibf_lower01", "ratio"), "raw",
                 "exponential:1", Exponential(1.0), _eplogp_vs_ibf,
                 "-e p log p calibration against the IBF lower bound"),
        Scenario("exp-sup-convergence", ("abs_gap",), "log",
                 "exponential:1", Exponential(1.0), _exp_sup_gap,
                 "distance of the empirical training supremum from 1/e"),
        Scenario("pg-bound", ("theoretical_upper10",), "raw",
                 "geometric:0.5", PoissonVsGeometric(), _pg_bound,
                 "theoretical IBF upper bound, Poisson against Geometric"),
        Scenario("pg-empirical", ("theoretical_upper10", "empirical_upper10"), "raw",
                 "geometric:0.5", PoissonVsGeometric(), _pg_empirical,
                 "theoretical against empirical upper bound"),
        Scenario("pg-aibf", ("theoretical_lower01", "aibf01"), "raw",
                 "poisson:1", PoissonVsGeometric(), _pg_aibf,
                 "theoretical lower bound against the arithmetic IBF"),
        Scenario("pnb-lower", ("theoretical_lower01",), "raw",
                 "poisson:1", PoissonVsNegBinomial(1), _pnb_lower,
                 "closed-form lower bound, Poisson against Negative Binomial"),
    ]
}


# ---------------------------------------------------------------- execution


@dataclass(frozen=True)
class SimulationPlan:
    scenario: str
    n_max: int
    n_reps: int
    seed: int
    generator: str | None = None
    test: ModelTest | None = None

    def __post_init__(self):
        if self.scenario not in SCENARIOS:
            raise DomainViolation(
                f"unknown scenario {self.scenario!r}; choose from {', '.join(SCENARIOS)}"
            )
        if self.n_max < 2 or self.n_reps < 1:
            raise DomainViolation("need n_max >= 2 and at least one replicate")
        sc = SCENARIOS[self.scenario]
        if self.generator is None:
            object.__setattr__(self, "generator", sc.generator)
        Generator.parse(self.generator)
        if self.test is None:
            object.__setattr__(self, "test", sc.test)
        if type(self.test) is not type(sc.test):
            raise DomainViolation(f"scenario {self.scenario} needs a {type(sc.test).__name__} test")

    @property
    def statistics(self) -> tuple[str, ...]:
        return SCENARIOS[self.scenario].statistics


@dataclass
class SimulationResult:
    plan: SimulationPlan
    ns: np.ndarray
    per_rep: np.ndarray  # [rep, n, statistic], natural-log values, NaN where undefined
    averages: np.ndarray  # [n, statistic], log of the per-scenario average
    meta: dict = field(default_factory=dict)

    @property
    def statistics(self) -> tuple[str, ...]:
        return self.plan.statistics

    def average(self, statistic: str) -> np.ndarray:
        return self.averages[:, self.statistics.index(statistic)]

    def rows(self):
        name = self.plan.scenario
        stats = self.statistics
        for r in range(self.per_rep.shape[0]):
            for i, n in enumerate(self.ns):
                for j, st in enumerate(stats):
                    yield name, str(r), int(n), st, self.per_rep[r, i, j]
        for i, n in enumerate(self.ns):
            for j, st in enumerate(stats):
                yield name, "avg", int(n), st, self.averages[i, j]


def rep_rng(seed: int, rep: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(rep,)))


def run_rep(plan: SimulationPlan, rep: int) -> np.ndarray:
    sc = SCENARIOS[plan.scenario]
    y = Generator.parse(plan.generator).draw(rep_rng(plan.seed, rep), plan.n_max)
    return np.asarray(sc.compute(y, plan.test), dtype=float)


def _run_chunk(args):
    plan, reps = args
    return [run_rep(plan, r) for r in reps]


def _average(per_rep: np.ndarray, how: str) -> np.ndarray:
    defined = ~np.isnan(per_rep)
    cnt = defined.sum(axis=0)
    with np.errstate(divide="ignore", invalid="ignore"):
        if how == "log":
            out = np.where(defined, per_rep, 0.0).sum(axis=0) / cnt
        else:
            out = special.logsumexp(np.where(defined, per_rep, -np.inf), axis=0) - np.log(cnt)
    return np.where(cnt > 0, out, np.nan)


def run(plan: SimulationPlan, workers: int = 1) -> SimulationResult:
    """Run all replicates; ``workers > 1`` spreads them over processes."""
    t0 = time.perf_counter()
    reps = list(range(plan.n_reps))
    if workers <= 1:
        mats = [run_rep(plan, r) for r in reps]
    else:
        chunks = [(plan, reps[i::workers]) for i in range(workers)]
        with ProcessPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(_run_chunk, chunks))
        mats = [None] * plan.n_reps
        for (_, idx), res in zip(chunks, parts):
            for r, mat in zip(idx, res):
                mats[r] = mat
    per_rep = np.stack(mats)
    how = SCENARIOS[plan.scenario].averaging
    averages = _average(per_rep, how)
    meta = {
        "scenario": plan.scenario,
        "generator": plan.generator,
        "averaging": how,
        "seed": plan.seed,
        "wall_seconds": time.perf_counter() - t0,
    }
    return SimulationResult(plan, np.arange(1, plan.n_max + 1), per_rep, averages, meta)


def format_log10(x: float) -> str:
    if math.isnan(x):
        return "nan"
    if math.isinf(x):
        return "-inf" if x < 0 else "inf"
    return f"{x / LOG10:.12g}"


def write_csv(result: SimulationResult, fh) -> None:
    w = csv.writer(fh, lineterminator="\n")
    w.writerow(["scenario", "rep", "n", "statistic", "log10_value"])
    for name, rep, n, st, v in result.rows():
        w.writerow([name, rep, n, st, format_log10(float(v))])
