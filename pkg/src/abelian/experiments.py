"""Correctness sweeps, scaling benchmarks, and estimator calibration.

Everything here compares the library's answers against ground truth that
never touches an oracle: the canonical invariant factors of Z_{m1} x ... are
computed by prime-power bucketing (CRT), so a sweep trial is "build a basis
through the oracle, compare the invariant lists".  Benchmarks read the
oracle's access counters and fit a log-log slope; the calibration report
measures how often the birthday size estimate brackets the truth.
"""

from __future__ import annotations

import csv
import os
import random
import statistics
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, fields

import numpy as np

from .errors import RandomizedFailure
from .iso import find_basis
from .numtheory import canonical_invariant_factors
from .oracle import format_group_spec, make_group
from .randgen import estimate_size

OUTCOMES = ("ok", "mismatch", "fail")


@dataclass
class TrialRecord:
    """Outcome and cost of one basis-vs-ground-truth trial."""

    group: str
    label_seed: int
    rng_seed: int
    model: str
    mode: str
    delta: float
    outcome: str
    products: int
    elements: int
    millis: float


CSV_COLUMNS = [f.name for f in fields(TrialRecord)]


def write_trials(path, records) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(CSV_COLUMNS)
        for rec in records:
            writer.writerow([getattr(rec, col) for col in CSV_COLUMNS])


def read_trials(path) -> list[TrialRecord]:
    out = []
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        if header != CSV_COLUMNS:
            raise ValueError(f"unexpected csv header {header!r}")
        for row in reader:
            vals = dict(zip(CSV_COLUMNS, row))
            out.append(
                TrialRecord(
                    group=vals["group"],
                    label_seed=int(vals["label_seed"]),
                    rng_seed=int(vals["rng_seed"]),
                    model=vals["model"],
                    mode=vals["mode"],
                    delta=float(vals["delta"]),
                    outcome=vals["outcome"],
                    products=int(vals["products"]),
                    elements=int(vals["elements"]),
                    millis=float(vals["millis"]),
                )
            )
    return out


def enumerate_factor_multisets(
    max_product: int, include_trivial: bool = True
) -> list[tuple[int, ...]]:
    """All nondecreasing tuples of factors >= 2 with product <= max_product."""
    out: list[tuple[int, ...]] = [()] if include_trivial else []

    def rec(prefix: list[int], prod: int, start: int):
        for f in range(start, max_product // prod + 1):
            prefix.append(f)
            out.append(tuple(prefix))
            rec(prefix, prod * f, f)
            prefix.pop()

    rec([], 1, 2)
    out.sort(key=lambda t: (int(np.prod(t, dtype=object)) if t else 1, t))
    return out


def run_trial(
    factors,
    label_seed: int,
    rng_seed: int,
    model: str = "fs",
    mode: str = "rand",
    delta: float = 1e-2,
    retries: int = 3,
) -> TrialRecord:
    """One basis construction compared against the CRT ground truth."""
    spec = make_group(factors, label_seed=label_seed)
    want = canonical_invariant_factors(factors)
    name = format_group_spec(factors)
    rng = random.Random(f"sweep:{name}:{label_seed}:{rng_seed}:{model}:{mode}")
    t0 = time.perf_counter()
    outcome = "fail"
    oracle = spec.oracle(model)
    for _ in range(max(1, retries)):
        oracle = spec.oracle(model)
        try:
            got = find_basis(oracle, rng, delta=delta, method=mode).invariants
        except RandomizedFailure:
            continue
        outcome = "ok" if got == want else "mismatch"
        break
    millis = (time.perf_counter() - t0) * 1000.0
    return TrialRecord(
        group=name,
        label_seed=label_seed,
        rng_seed=rng_seed,
        model=model,
        mode=mode,
        delta=delta,
        outcome=outcome,
        products=oracle.products,
        elements=oracle.elements,
        millis=millis,
    )


def _run_trial_packed(args) -> TrialRecord:
    factors, label_seed, rng_seed, model, mode, delta, retries = args
    return run_trial(
        factors,
        label_seed=label_seed,
        rng_seed=rng_seed,
        model=model,
        mode=mode,
        delta=delta,
        retries=retries,
    )


def run_sweep(
    max_product: int = 100,
    labelings: int = 5,
    models=("fs", "ps"),
    modes=("rand",),
    rng_seeds: int = 1,
    delta: float = 1e-2,
    retries: int = 3,
    seed: int = 0,
    workers: int | None = None,
    progress=None,
) -> list[TrialRecord]:
    """The full grid: every factor multiset x labelings x models x modes.

    Size-hidden trials are skipped for the deterministic mode, which cannot
    run there.  Trials are independent, so they run across a process pool
    (``workers`` defaults to the CPU count); the collecting loop here is the
    only shared sink.  ``progress``, if given, is called with (done, total).
    """
    grid = enumerate_factor_multisets(max_product)
    combos = [
        (factors, seed * 1000 + lab, seed * 1000 + rs, model, mode, delta, retries)
        for factors in grid
        for lab in range(labelings)
        for rs in range(rng_seeds)
        for model in models
        for mode in modes
        if not (model == "ps" and mode == "det")
    ]
    if workers is None:
        workers = max(1, os.cpu_count() or 1)
    records = []
    if workers <= 1:
        results = map(_run_trial_packed, combos)
        for i, rec in enumerate(results):
            records.append(rec)
            if progress is not None:
                progress(i + 1, len(combos))
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            for i, rec in enumerate(pool.map(_run_trial_packed, combos, chunksize=16)):
                records.append(rec)
                if progress is not None:
                    progress(i + 1, len(combos))
    return records


def sweep_summary(records) -> dict:
    counts = {k: 0 for k in OUTCOMES}
    for rec in records:
        counts[rec.outcome] += 1
    bad = counts["mismatch"] + counts["fail"]
    total = len(records)
    return {
        "trials": total,
        "ok": counts["ok"],
        "mismatch": counts["mismatch"],
        "fail": counts["fail"],
        "bad_rate": (bad / total) if total else 0.0,
    }


_FAMILIES = {
    "Z_2^m": lambda p, m: (2,) * m,
    "Z_p^m": lambda p, m: (p,) * m,
    "Z_p2^m": lambda p, m: (p * p,) * m,
}


def family_factors(family: str, p: int, m: int) -> tuple[int, ...]:
    """Cyclic factors for one of the benchmark families."""
    key = family.replace("²", "2").strip()
    if key not in _FAMILIES:
        raise ValueError(f"family must be one of {sorted(_FAMILIES)}, got {family!r}")
    return _FAMILIES[key](p, m)


@dataclass
class BenchPoint:
    """Median access counts for one group size."""

    m: int
    n: int
    trials: int
    products: int
    elements: int
    total: int
    ratio_sqrt: float  # total / (sqrt(n) * log2(n)^3)
    ratio_linear: float  # total / n
    millis: float


def least_squares_slope(ns, totals) -> float | None:
    """Slope of log2(total) against log2(n); None for fewer than two points."""
    if len(ns) < 2:
        return None
    return float(np.polyfit(np.log2(ns), np.log2(totals), 1)[0])


def bench_scaling(
    family: str = "Z_2^m",
    p: int = 2,
    m_lo: int = 10,
    m_hi: int = 22,
    mode: str = "rand",
    model: str = "fs",
    trials: int = 20,
    delta: float = 1e-2,
    seed: int = 0,
    retries: int = 5,
    progress=None,
) -> dict:
    """Access-count scaling across a family, with a log-log slope.

    Per size, the reported counts are medians over ``trials`` runs (one run
    for the deterministic mode, which has no variance across rng seeds).
    """
    points: list[BenchPoint] = []
    for m in range(m_lo, m_hi + 1):
        factors = family_factors(family, p, m)
        spec = make_group(factors, label_seed=seed)
        n = spec.n
        reps = trials if mode == "rand" else 1
        prods, elems, totals, times = [], [], [], []
        for tr in range(reps):
            rng = random.Random(f"bench:{seed}:{family}:{m}:{tr}")
            t0 = time.perf_counter()
            for attempt in range(max(1, retries)):
                oracle = spec.oracle(model)
                try:
                    find_basis(oracle, rng, delta=delta, method=mode)
                    break
                except RandomizedFailure:
                    if attempt == max(1, retries) - 1:
                        raise
            times.append((time.perf_counter() - t0) * 1000.0)
            prods.append(oracle.products)
            elems.append(oracle.elements)
            totals.append(oracle.total_accesses)
            if progress is not None:
                progress(m, tr + 1, reps)
        med_total = int(statistics.median(totals))
        points.append(
            BenchPoint(
                m=m,
                n=n,
                trials=reps,
                products=int(statistics.median(prods)),
                elements=int(statistics.median(elems)),
                total=med_total,
                ratio_sqrt=med_total / (n**0.5 * float(np.log2(n)) ** 3),
                ratio_linear=med_total / n,
                millis=float(statistics.median(times)),
            )
        )
    slope = least_squares_slope([pt.n for pt in points], [pt.total for pt in points])
    return {
        "family": family,
        "p": p,
        "mode": mode,
        "model": model,
        "delta": delta,
        "trials": trials,
        "points": points,
        "slope": slope,
    }


def estimate_covered(n: int, q: int) -> bool:
    """Whether an estimate brackets the truth: n <= q <= 70 * n * log2(n)."""
    upper = 70.0 * n * max(1.0, float(np.log2(n)))
    return n <= q <= upper


def estimate_size_report(factors, trials: int = 200, seed: int = 0) -> dict:
    """Calibration of the birthday size estimator on one group."""
    spec = make_group(factors, label_seed=seed)
    n = spec.n
    records: list[tuple[int, int]] = []
    for tr in range(trials):
        oracle = spec.oracle("ps")
        rng = random.Random(f"est:{seed}:{format_group_spec(factors)}:{tr}")
        est = estimate_size(oracle, rng)
        records.append((est.q, est.draws))
    qs = sorted(q for q, _ in records)
    draws = sorted(d for _, d in records)
    hits = sum(1 for q, _ in records if estimate_covered(n, q))
    return {
        "group": format_group_spec(factors),
        "n": n,
        "trials": trials,
        "records": records,
        "coverage": hits / trials if trials else 0.0,
        "q_quartiles": [
            qs[len(qs) // 4],
            qs[len(qs) // 2],
            qs[(3 * len(qs)) // 4],
        ]
        if qs
        else [],
        "draws_median": draws[len(draws) // 2] if draws else 0,
    }