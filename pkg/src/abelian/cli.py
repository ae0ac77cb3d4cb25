"""Command-line front end.

Subcommands
-----------
gen            discover a generator chain for a hidden group
basis          invariant factors and a basis through the oracle
iso            decide isomorphism of two hidden groups
snf            Smith normal form of a presentation's relation matrix
estimate-size  calibrate the collision size estimator on one group
bench          access-count scaling across a group family
sweep          correctness grid against the closed-form ground truth
adversary      run the deterministic pipeline against the lower-bound adversary

Exit codes: 0 ok, 1 mismatch (non-isomorphic / failed property / sweep
mismatch), 2 usage, 3 randomized failure after all retries.

Report commands (sweep, bench, estimate-size) write delimited output to
``--out`` and render a PNG figure next to it unless ``--no-plot`` is given.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import random
import sys

from . import experiments, plots
from .detgen import generator_plus, generators
from .errors import ModelViolation, RandomizedFailure
from .iso import find_basis, is_isomorphic
from .monomial import format_monomial, format_presentation, parse_presentation
from .oracle import MODES, format_group_spec, make_group, parse_group_spec
from .randgen import estimate_size, random_generators
from .snf import build_relation_matrix, smith_normal_form
from .adversary import adversary_demo


def _global_flags() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=0, help="labeling and rng seed")
    common.add_argument("--delta", type=float, default=1e-2, help="failure budget")
    common.add_argument("--model", choices=MODES, default="fs", help="oracle model")
    common.add_argument("--out", default=None, help="write output to this path")
    common.add_argument(
        "--format", choices=("json", "csv"), default=None, help="output format"
    )
    common.add_argument(
        "--no-plot", action="store_true", help="skip the figure next to --out"
    )
    common.add_argument(
        "--retries", type=int, default=3, help="attempts before giving up (rand mode)"
    )
    return common


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="abelian",
        description="black-box algorithms on finite Abelian groups",
    )
    common = _global_flags()
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen", parents=[common], help="discover a generator chain")
    p.add_argument("group", help="group spec, e.g. 4x3x3 (1 = trivial)")
    p.add_argument("--mode", choices=("det", "rand"), default=None)

    p = sub.add_parser("basis", parents=[common], help="invariant factors and basis")
    p.add_argument("group")
    p.add_argument("--mode", choices=("det", "rand"), default="rand")

    p = sub.add_parser("iso", parents=[common], help="decide isomorphism")
    p.add_argument("group_g")
    p.add_argument("group_h")
    p.add_argument("--mode", choices=("det", "rand"), default="rand")

    p = sub.add_parser("snf", parents=[common], help="Smith normal form")
    p.add_argument("group", nargs="?", default=None)
    p.add_argument(
        "--presentation",
        default=None,
        help="file with a presentation (generator orders and relation rows)",
    )

    p = sub.add_parser(
        "estimate-size", parents=[common], help="calibrate the size estimator"
    )
    p.add_argument("group")
    p.add_argument("--trials", type=int, default=200)

    p = sub.add_parser("bench", parents=[common], help="access-count scaling")
    p.add_argument("--family", default="Z_2^m", help="Z_2^m, Z_p^m, or Z_p2^m")
    p.add_argument("--p", type=int, default=2)
    p.add_argument("--m-lo", type=int, default=10)
    p.add_argument("--m-hi", type=int, default=16)
    p.add_argument("--mode", choices=("det", "rand"), default="rand")
    p.add_argument("--trials", type=int, default=7)

    p = sub.add_parser("sweep", parents=[common], help="correctness grid")
    p.add_argument("--max-product", type=int, default=100)
    p.add_argument("--labelings", type=int, default=5)
    p.add_argument("--models", default="fs,ps", help="comma list of oracle models")
    p.add_argument("--mode", choices=("det", "rand"), default="rand")
    p.add_argument("--rng-seeds", type=int, default=1)
    p.add_argument("--workers", type=int, default=None)

    p = sub.add_parser(
        "adversary", parents=[common], help="lower-bound adversary demo"
    )
    p.add_argument("--p", type=int, default=2)
    p.add_argument("--m", type=int, default=5)

    return parser


def _emit(text: str, out: str | None) -> None:
    if out is None:
        sys.stdout.write(text if text.endswith("\n") else text + "\n")
    else:
        with open(out, "w") as fh:
            fh.write(text if text.endswith("\n") else text + "\n")


def _emit_json(obj, out: str | None) -> None:
    _emit(json.dumps(obj, indent=2), out)


def _emit_kv_csv(obj: dict, out: str | None) -> None:
    buf = io.StringIO()
    writer = csv.writer(buf)
    writer.writerow(["key", "value"])
    for key, val in obj.items():
        writer.writerow([key, json.dumps(val) if isinstance(val, (dict, list)) else val])
    _emit(buf.getvalue(), out)


def _emit_object(obj: dict, args) -> None:
    if (args.format or "json") == "csv":
        _emit_kv_csv(obj, args.out)
    else:
        _emit_json(obj, args.out)


def _figure_path(out: str) -> str:
    return os.path.splitext(out)[0] + ".png"


def _rng(args) -> random.Random:
    return random.Random(f"cli:{args.seed}")


def _with_retries(args, fn):
    """Run fn() retrying on randomized failure; exhausting retries exits 3."""
    last = None
    for _ in range(max(1, args.retries)):
        try:
            return fn()
        except RandomizedFailure as exc:
            last = exc
    raise last


def cmd_gen(args) -> int:
    factors = parse_group_spec(args.group)
    spec = make_group(factors, label_seed=args.seed)
    mode = args.mode or ("det" if args.model == "fs" else "rand")
    if mode == "det":
        oracle = spec.oracle(args.model)
        chain, _table = generator_plus(oracle)
    else:
        holder: dict = {}
        rng = _rng(args)

        def attempt():
            oracle = spec.oracle(args.model)
            holder["oracle"] = oracle
            budget = estimate_size(oracle, rng).q if args.model == "ps" else None
            return random_generators(oracle, rng, delta=args.delta, budget=budget)

        chain = _with_retries(args, attempt)
        oracle = holder["oracle"]
    _emit_object(
        {
            "group": format_group_spec(factors),
            "model": args.model,
            "mode": mode,
            "generators": list(chain.A),
            "orders": list(chain.K),
            "relations": [list(row) for row in chain.L] if chain.L is not None else None,
            "counters": oracle.counters,
        },
        args,
    )
    return 0


def cmd_basis(args) -> int:
    factors = parse_group_spec(args.group)
    spec = make_group(factors, label_seed=args.seed)
    rng = _rng(args)
    holder: dict = {}

    def attempt():
        oracle = spec.oracle(args.model)
        holder["oracle"] = oracle
        return find_basis(oracle, rng, delta=args.delta, method=args.mode)

    result = _with_retries(args, attempt)
    oracle = holder["oracle"]
    obj = {
        "group": format_group_spec(factors),
        "model": args.model,
        "mode": args.mode,
        "invariant_factors": result.invariants,
        "basis": [format_monomial(y) for y in result.basis],
        "counters": oracle.counters,
    }
    if args.model == "fs":
        obj["basis_labels"] = result.basis_labels(oracle)
    _emit_object(obj, args)
    return 0


def cmd_iso(args) -> int:
    factors_g = parse_group_spec(args.group_g)
    factors_h = parse_group_spec(args.group_h)
    spec_g = make_group(factors_g, label_seed=args.seed)
    spec_h = make_group(factors_h, label_seed=args.seed + 1)
    rng = _rng(args)
    holder: dict = {}

    def attempt():
        og = spec_g.oracle(args.model)
        oh = spec_h.oracle(args.model)
        holder["og"], holder["oh"] = og, oh
        ans, wit = is_isomorphic(og, oh, rng, delta=args.delta, method=args.mode)
        if wit is not None:
            inv_g = inv_h = list(wit.invariants)
        else:
            inv_g = find_basis(og, rng, delta=args.delta, method=args.mode).invariants
            inv_h = find_basis(oh, rng, delta=args.delta, method=args.mode).invariants
        return ans, inv_g, inv_h

    ans, inv_g, inv_h = _with_retries(args, attempt)
    _emit_object(
        {
            "isomorphic": ans,
            "invariant_factors_g": inv_g,
            "invariant_factors_h": inv_h,
            "counters_g": holder["og"].counters,
            "counters_h": holder["oh"].counters,
        },
        args,
    )
    return 0 if ans else 1


def cmd_snf(args) -> int:
    if (args.presentation is None) == (args.group is None):
        raise UsageError("snf needs a group spec or --presentation, not both")
    if args.presentation is not None:
        if args.presentation == "-":
            text = sys.stdin.read()
        else:
            with open(args.presentation) as fh:
                text = fh.read()
        pres = parse_presentation(text)
    else:
        factors = parse_group_spec(args.group)
        oracle = make_group(factors, label_seed=args.seed).oracle("fs")
        chain, _ = generator_plus(oracle)
        from .monomial import Presentation

        pres = Presentation.from_chain(chain)
    rel = build_relation_matrix(pres)
    res = smith_normal_form(rel)
    _emit_object(
        {
            "presentation": format_presentation(pres),
            "relation_matrix": rel.to_json_obj(),
            "D": res.D.to_json_obj(),
            "U": res.U.to_json_obj(),
            "V": res.V.to_json_obj(),
            "invariant_factors": [d for d in res.D.diagonal() if d > 1],
        },
        args,
    )
    return 0


def cmd_estimate_size(args) -> int:
    factors = parse_group_spec(args.group)
    report = experiments.estimate_size_report(factors, trials=args.trials, seed=args.seed)
    fmt = args.format or "csv"
    if fmt == "csv":
        buf = io.StringIO()
        writer = csv.writer(buf)
        writer.writerow(["trial", "q", "draws"])
        for i, (q, draws) in enumerate(report["records"]):
            writer.writerow([i, q, draws])
        _emit(buf.getvalue(), args.out)
        summary = (
            f"n={report['n']} trials={report['trials']} "
            f"coverage={report['coverage']:.3f} "
            f"q_quartiles={report['q_quartiles']} draws_median={report['draws_median']}"
        )
        print(summary, file=sys.stderr)
    else:
        _emit_json(report, args.out)
    if args.out and not args.no_plot:
        plots.save_estimate_figure(report, _figure_path(args.out))
    return 0


def cmd_bench(args) -> int:
    bench = experiments.bench_scaling(
        family=args.family,
        p=args.p,
        m_lo=args.m_lo,
        m_hi=args.m_hi,
        mode=args.mode,
        model=args.model,
        trials=args.trials,
        delta=args.delta,
        seed=args.seed,
        retries=args.retries,
    )
    fmt = args.format or "csv"
    if fmt == "csv":
        buf = io.StringIO()
        writer = csv.writer(buf)
        cols = [
            "m", "n", "trials", "products", "elements",
            "total", "ratio_sqrt", "ratio_linear", "millis",
        ]
        writer.writerow(cols)
        for pt in bench["points"]:
            writer.writerow([getattr(pt, c) for c in cols])
        _emit(buf.getvalue(), args.out)
        print(f"slope={bench['slope']}", file=sys.stderr)
    else:
        obj = dict(bench)
        obj["points"] = [vars(pt) for pt in bench["points"]]
        _emit_json(obj, args.out)
    if args.out and not args.no_plot:
        plots.save_scaling_figure(bench, _figure_path(args.out))
    return 0


def cmd_sweep(args) -> int:
    models = tuple(m.strip() for m in args.models.split(",") if m.strip())
    for m in models:
        if m not in MODES:
            raise UsageError(f"unknown model {m!r}")
    records = experiments.run_sweep(
        max_product=args.max_product,
        labelings=args.labelings,
        models=models,
        modes=(args.mode,),
        rng_seeds=args.rng_seeds,
        delta=args.delta,
        retries=args.retries,
        seed=args.seed,
        workers=args.workers,
    )
    summary = experiments.sweep_summary(records)
    fmt = args.format or "csv"
    if fmt == "csv":
        if args.out:
            experiments.write_trials(args.out, records)
        else:
            writer = csv.writer(sys.stdout)
            writer.writerow(experiments.CSV_COLUMNS)
            for rec in records:
                writer.writerow([getattr(rec, c) for c in experiments.CSV_COLUMNS])
        print(json.dumps(summary), file=sys.stderr)
    else:
        _emit_json({"summary": summary, "records": [vars(r) for r in records]}, args.out)
    if args.out and not args.no_plot:
        plots.save_sweep_figure(records, _figure_path(args.out))
    return 0 if summary["mismatch"] == 0 else 1


def cmd_adversary(args) -> int:
    report = adversary_demo(args.p, args.m)
    _emit_object(report, args)
    if report["inconclusive"]:
        return 3
    ok = (
        report["committed"]
        and report["answers_correct"]
        and report["commit_beyond_threshold"]
        and report["replay_ok"]
        and report["prefixes_equal"]
    )
    return 0 if ok else 1


class UsageError(Exception):
    pass


_COMMANDS = {
    "gen": cmd_gen,
    "basis": cmd_basis,
    "iso": cmd_iso,
    "snf": cmd_snf,
    "estimate-size": cmd_estimate_size,
    "bench": cmd_bench,
    "sweep": cmd_sweep,
    "adversary": cmd_adversary,
}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return _COMMANDS[args.command](args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except ModelViolation as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except RandomizedFailure as exc:
        print(f"randomized failure: {exc}", file=sys.stderr)
        return 3
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    raise SystemExit(main())