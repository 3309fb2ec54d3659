"""Command line front end: ``obf <subcommand> ...``.

All Bayes factors are printed as log10 values with 12 significant digits.
Errors go to stderr as a single line; the exit status identifies the kind.
"""

from __future__ import annotations

import argparse
import csv
import math
import os
import sys

import numpy as np

from . import calibration, discrete, exponential, linear, montecarlo, mts, normal
from .core import (
    BoundReport,
    EvidenceError,
    Exponential,
    PriorKind,
    SimpleNormalMean,
    Variant,
)

EXIT_INPUT = 2


class InputError(Exception):
    """Malformed input; exits with status 2."""


def _open(path):
    if str(path) == "-":
        return sys.stdin
    try:
        return open(path, encoding="utf-8")
    except OSError as exc:
        raise InputError(f"{path}: {exc.strerror}") from exc


def read_data(path) -> np.ndarray:
    """Whitespace-separated numbers; lines starting with '#' are skipped."""
    out = []
    fh = _open(path)
    try:
        for lineno, line in enumerate(fh, 1):
            if line.lstrip().startswith("#"):
                continue
            for tok in line.split():
                try:
                    out.append(float(tok))
                except ValueError:
                    raise InputError(f"{path}: line {lineno}: malformed token {tok!r}") from None
    finally:
        if fh is not sys.stdin:
            fh.close()
    if not out:
        raise InputError(f"{path}: no data")
    return np.array(out)


def read_matrix(path) -> np.ndarray:
    rows = []
    fh = _open(path)
    try:
        for lineno, line in enumerate(fh, 1):
            if not line.strip() or line.lstrip().startswith("#"):
                continue
            try:
                rows.append([float(t) for t in line.split()])
            except ValueError:
                raise InputError(f"{path}: line {lineno}: malformed row") from None
    finally:
        if fh is not sys.stdin:
            fh.close()
    if not rows or len({len(r) for r in rows}) != 1:
        raise InputError(f"{path}: rows must be non-empty and of equal length")
    return np.array(rows)


def read_groups(path) -> list[np.ndarray]:
    """CSV rows ``group_label,value``; groups keep their order of first appearance."""
    groups: dict[str, list[float]] = {}
    fh = _open(path)
    try:
        for lineno, row in enumerate(csv.reader(fh), 1):
            if not row or row[0].lstrip().startswith("#"):
                continue
            if len(row) != 2:
                raise InputError(f"{path}: line {lineno}: expected group_label,value")
            try:
                val = float(row[1])
            except ValueError:
                raise InputError(f"{path}: line {lineno}: malformed value {row[1]!r}") from None
            groups.setdefault(row[0].strip(), []).append(val)
    finally:
        if fh is not sys.stdin:
            fh.close()
    if len(groups) < 2:
        raise InputError(f"{path}: need at least two groups")
    return [np.array(v) for v in groups.values()]


def fmt(x: float) -> str:
    if math.isinf(x):
        return "-inf" if x < 0 else "inf"
    return f"{x:.12g}"


def _attainer(att) -> str:
    if att is None:
        return ""
    if isinstance(att, tuple):
        return ";".join(str(i + 1) for i in att)
    return f"y={att:.12g}"


def _write_reports(reports: list[BoundReport], out=None):
    w = csv.writer(out or sys.stdout, lineterminator="\n")
    w.writerow(["variant", "log10_value", "attainer"])
    for rep in reports:
        w.writerow([rep.variant.value, fmt(rep.value.log10), _attainer(rep.attainer)])


def _parse_grid(text: str) -> np.ndarray:
    try:
        a, b, step = (float(t) for t in text.split(":"))
    except ValueError:
        raise InputError(f"grid must be a:b:step, got {text!r}") from None
    if not (step > 0 and b >= a):
        raise InputError("grid needs b >= a and a positive step")
    k = int(math.floor((b - a) / step + 1e-9))
    return a + step * np.arange(k + 1)


EXPLAIN = {
    "exponential": [
        "full B01 = (lambda0 S)^n exp(-lambda0 S) / Gamma(n)",
        "training factor y lambda0 exp(-lambda0 y), supremum 1/e at y = 1/lambda0",
        "empirical bound uses the observation with the largest training factor",
    ],
    "poisson-vs-geometric": [
        "full B01 = Gamma(n + s + 1/2) / (prod y! Gamma(n) n^(s + 1/2))",
        "training factor 1/Gamma(y + 3/2) as published, supremum 2/sqrt(pi) at y = 0",
        "note: the full formula at n = 1 gives Gamma(y + 3/2)/y! instead",
    ],
    "poisson-vs-negbinomial": [
        "trained factor grows without bound in y: no theoretical upper bound",
        "theoretical lower bound is the published Gamma(r)/Gamma(1/2) closed form",
    ],
    "normal-scale": [
        "full B01 = h0^((n-1)/2) exp(-h0 S2/2) / ((2/S2)^((n-1)/2) Gamma((n-1)/2))",
        "pair factor supremum exp(-1/2)/sqrt(2 pi), half the published correction",
    ],
    "normal-mean-known": ["training factor N(y; mu0, sigma0^2), supremum at y = mu0"],
    "normal-mean-unknown": ["pair factor supremum 1/sqrt(pi)"],
    "simple-normal-mean": ["upper bound (2 pi)^((n-1)/2) exp(sum y^2 / 2)"],
}


def cmd_bounds(args):
    y = read_data(args.data)
    t = args.test
    extra: list[BoundReport] = []
    if t == "exponential":
        b = exponential.exp_bounds(y, args.lambda0)
        extra = [
            BoundReport(Variant.SPBF10, exponential.exp_sp_bf10(y, args.lambda0)),
            exponential.exp_empirical_sp_bf10(y, args.lambda0),
            BoundReport(Variant.EPBF10, exponential.exp_ep_bf10(y, args.lambda0)),
        ]
        reports = b.reports() + extra
    elif t == "poisson-vs-geometric":
        reports = discrete.pg_bounds(y).reports()
    elif t == "poisson-vs-negbinomial":
        reports = discrete.pnb_bounds(y, args.r).reports()
    elif t == "normal-scale":
        reports = normal.scale_bounds(y, args.h0).reports()
    elif t == "normal-mean-known":
        reports = normal.mean_known_bounds(y, args.mu0, args.sigma0).reports()
    elif t == "normal-mean-unknown":
        reports = normal.mean_unknown_bounds(y, args.mu0).reports()
    else:
        reports = [calibration.gs_bayes_factor(SimpleNormalMean(), y)]
    _write_reports(reports)
    if args.explain:
        for line in EXPLAIN[t]:
            print(f"# {line}", file=sys.stderr)
        for note in sorted({r.notes for r in reports if r.notes}):
            print(f"# {note}", file=sys.stderr)


def cmd_priors(args):
    grid = _parse_grid(args.grid)
    w = csv.writer(sys.stdout, lineterminator="\n")
    if args.test == "normal-scale":
        sp = normal.scale_sp_prior(args.h0)(grid)
        ip = normal.scale_intrinsic_prior(args.h0)(grid)
        w.writerow(["h", "sp_prior", "intrinsic_prior"])
        for h, a, b in zip(grid, sp, ip):
            w.writerow([fmt(h), fmt(a), fmt(b)])
    else:
        if args.data is None:
            raise InputError("--data is required for the exponential priors")
        y = read_data(args.data)
        sp = exponential.exp_sp_prior(grid, args.lambda0)
        ep = exponential.exp_ep_prior(y, grid)
        w.writerow(["lambda", "sp_prior", "ep_prior"])
        for lam, a, b in zip(grid, sp, ep):
            w.writerow([fmt(lam), fmt(a), fmt(b)])


def cmd_mts(args):
    if args.limit is not None:
        items = mts.random_subsample(args.n, args.k, args.limit, args.seed)
    else:
        items = mts.enumerate_mts(args.n, args.k)
    out = sys.stdout
    for idx in items:
        out.write(",".join(str(i + 1) for i in idx) + "\n")


def cmd_anova(args):
    groups = read_groups(args.groups)
    test, y = linear.anova_from_groups(groups, PriorKind(args.prior))
    design = linear.anova_design(test)
    f = linear.fit(design, y)
    b = linear.anova_bounds(test, y)
    w = csv.writer(sys.stdout, lineterminator="\n")
    w.writerow(["variant", "log10_value", "attainer"])
    w.writerow(["F", fmt(f.F), ""])
    w.writerow(["SS01", fmt(linear.anova_ss_bf01(test, f.F).log10), ""])
    for rep in b.reports():
        w.writerow([rep.variant.value, fmt(rep.value.log10), _attainer(rep.attainer)])


def cmd_lm(args):
    A0, A1 = read_matrix(args.a0), read_matrix(args.a1)
    y = read_data(args.y)
    design = linear.DesignPair(A0, A1, args.q0, args.q1)
    b = linear.gl_empirical_bound(design, y, args.subsample, args.seed)
    _write_reports(b.reports())


def cmd_calibrate(args):
    if args.p is not None:
        print(fmt(calibration.robust_lower_bound(args.p)))
        return
    if args.test != "exponential" or args.data is None:
        raise InputError("calibrate needs --p, or --test exponential --data FILE")
    y = read_data(args.data)
    p = calibration.exp_wilks_pvalue(y, args.lambda0)
    lower = exponential.exp_bounds(y, args.lambda0).theoretical_lower01
    w = csv.writer(sys.stdout, lineterminator="\n")
    w.writerow(["p_wilks", "robust_bound", "log10_ibf_lower01"])
    w.writerow([fmt(p), fmt(calibration.robust_lower_bound(p)), fmt(lower.value.log10)])


def cmd_simulate(args):
    seed = args.seed
    if seed is None:
        env = os.environ.get("OBF_SEED")
        try:
            seed = int(env) if env is not None else 0
        except ValueError:
            raise InputError(f"OBF_SEED must be an integer, got {env!r}") from None
    sc = montecarlo.SCENARIOS.get(args.scenario)
    if sc is None:
        raise InputError(f"unknown scenario {args.scenario!r}; choose from {', '.join(montecarlo.SCENARIOS)}")
    test = sc.test
    if args.lambda0 is not None and isinstance(test, Exponential):
        test = Exponential(args.lambda0)
    if args.r is not None and hasattr(test, "r"):
        test = type(test)(args.r)
    plan = montecarlo.SimulationPlan(args.scenario, args.n, args.reps, seed, args.generator, test)
    res = montecarlo.run(plan, workers=args.workers)
    if args.out == "-":
        montecarlo.write_csv(res, sys.stdout)
    else:
        with open(args.out, "w", encoding="utf-8", newline="") as fh:
            montecarlo.write_csv(res, fh)


def cmd_cox(args):
    y = read_data(args.data) if args.data else discrete.load_cox_fixture()
    steps = discrete.cox_sequential(y, args.shuffle_seed)
    w = csv.writer(sys.stdout, lineterminator="\n")
    w.writerow(["prefix_n", "log10_upper10", "log10_lower01"])
    for s in steps:
        w.writerow([s.prefix_n, fmt(s.upper10.log10), fmt(s.lower01.log10)])


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="obf", description="Intrinsic Bayes factor bounds")
    sub = p.add_subparsers(dest="command", required=True)

    b = sub.add_parser("bounds", help="bounds for one dataset")
    b.add_argument("--test", required=True, choices=sorted(EXPLAIN))
    b.add_argument("--data", required=True)
    b.add_argument("--lambda0", type=float, default=1.0)
    b.add_argument("--r", type=int, default=1)
    b.add_argument("--h0", type=float, default=1.0)
    b.add_argument("--mu0", type=float, default=0.0)
    b.add_argument("--sigma0", type=float, default=1.0)
    b.add_argument("--explain", action="store_true", help="print formula notes to stderr")
    b.set_defaults(func=cmd_bounds)

    pr = sub.add_parser("priors", help="tabulate prior densities on a grid")
    pr.add_argument("--test", required=True, choices=["normal-scale", "exponential"])
    pr.add_argument("--h0", type=float, default=1.0)
    pr.add_argument("--lambda0", type=float, default=1.0)
    pr.add_argument("--data")
    pr.add_argument("--grid", default="0.1:5:0.1")
    pr.set_defaults(func=cmd_priors)

    m = sub.add_parser("mts", help="list minimal training samples (1-based)")
    m.add_argument("--n", type=int, required=True)
    m.add_argument("--k", type=int, required=True)
    m.add_argument("--limit", type=int)
    m.add_argument("--seed", type=int, default=0)
    m.set_defaults(func=cmd_mts)

    a = sub.add_parser("anova", help="one-way ANOVA bounds")
    a.add_argument("--groups", required=True)
    a.add_argument("--prior", required=True, choices=[k.value for k in PriorKind])
    a.set_defaults(func=cmd_anova)

    lm = sub.add_parser("lm", help="nested linear model bounds")
    lm.add_argument("--a0", required=True)
    lm.add_argument("--a1", required=True)
    lm.add_argument("--y", required=True)
    lm.add_argument("--q0", type=float, default=0.0)
    lm.add_argument("--q1", type=float, default=0.0)
    lm.add_argument("--subsample", type=int)
    lm.add_argument("--seed", type=int, default=0)
    lm.set_defaults(func=cmd_lm)

    c = sub.add_parser("calibrate", help="p-value calibration")
    c.add_argument("--p", type=float)
    c.add_argument("--test", choices=["exponential"])
    c.add_argument("--lambda0", type=float, default=1.0)
    c.add_argument("--data")
    c.set_defaults(func=cmd_calibrate)

    s = sub.add_parser("simulate", help="run a Monte Carlo scenario")
    s.add_argument("--scenario", required=True)
    s.add_argument("--seed", type=int, help="defaults to $OBF_SEED, else 0")
    s.add_argument("--reps", type=int, default=100)
    s.add_argument("--n", type=int, default=100)
    s.add_argument("--out", required=True)
    s.add_argument("--workers", type=int, default=1)
    s.add_argument("--generator", help="e.g. exponential:1, poisson:1, geometric:0.5")
    s.add_argument("--lambda0", type=float)
    s.add_argument("--r", type=int)
    s.set_defaults(func=cmd_simulate)

    x = sub.add_parser("cox", help="sequential bounds on the Cox count data")
    x.add_argument("--data", help="defaults to the bundled fixture")
    x.add_argument("--shuffle-seed", type=int)
    x.set_defaults(func=cmd_cox)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        args.func(args)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except EvidenceError as exc:
        print(f"error: {exc.kind}: {exc.detail}", file=sys.stderr)
        return exc.exit_code
    return 0


if __name__ == "__main__":
    sys.exit(main())
