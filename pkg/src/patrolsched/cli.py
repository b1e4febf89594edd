"""Command-line surface for patrol scheduling, evaluation, oracles, and attacks.

Subcommands
-----------
validate      check an instance document (metric axioms, weights)
gen           generate a random instance document
plan          run the approximation planner on an instance
eval          evaluate a schedule document against an instance
oracle-tsp    exact shortest closed tour (small point sets)
oracle-opt    exhaustive best weighted schedule up to a period bound
oracle-cover  exact min-max tree cover by partition enumeration
treecover     approximate min-max tree cover for a point subset
attack        best attacker response against a schedule
mix           collapse a mixed strategy into one periodic schedule
bench         planner ratio table over a directory of instances

Exit codes: 0 success, 1 domain/validation failure, 2 I/O or usage error.

Every command prints a short human summary to stdout and, with ``--out``,
writes a JSON run report.  Reports are deterministic for fixed inputs,
flags, and seeds: keys are sorted, the instance file's SHA-256 is embedded,
and wall-clock measurements live under a separate top-level ``"timings"``
key so out-of-band variation never touches result fields.  Infinite values
serialize as the string ``"unbounded"``.
"""
from __future__ import annotations

import argparse
import csv
import hashlib
import json
import math
import sys
import time
from pathlib import Path
from typing import Any

import numpy as np

from .instance import (GEOMETRIES, WEIGHT_LAWS, Instance, MetricViolationError,
                       RandomSpec, generate_random, load_instance,
                       serialize_instance)
from .mst import Tree
from .oracle import (BRUTE_FORCE_MAX_POINTS, BRUTE_FORCE_MAX_PERIOD,
                     HELD_KARP_MAX, brute_force_weighted_opt, held_karp_tsp,
                     lower_bound, partition_tree_cover_oracle)
from .planner import plan
from .schedule import (Schedule, period_length, point_cost,
                       schedule_from_document, schedule_to_document,
                       weighted_objective)
from .security import (attacker_best_response, mix_tours, per_target_best,
                       strategy_from_document)
from .treecover import minmax_tree_cover


# ---------------------------------------------------------------------------
# report plumbing


def _encode(obj: Any) -> Any:
    """Recursively convert a report to JSON-safe values (inf -> "unbounded")."""
    if isinstance(obj, dict):
        return {str(k): _encode(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_encode(v) for v in obj]
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.floating):
        obj = float(obj)
    if isinstance(obj, float):
        if math.isnan(obj):
            raise ValueError("refusing to serialize NaN in a report")
        if math.isinf(obj):
            return "unbounded"
    return obj


def _digest(path: Path) -> str:
    return hashlib.sha256(path.read_bytes()).hexdigest()


def _write_report(report: dict[str, Any], out: str | None) -> None:
    if out is None:
        return
    text = json.dumps(_encode(report), indent=2, sort_keys=True, allow_nan=False)
    Path(out).write_text(text + "\n")


def _fmt(x: float) -> str:
    if math.isinf(x):
        return "unbounded"
    return format(x, ".6g")


def _read_json(path: str) -> Any:
    try:
        return json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise ValueError(f"{path}: not valid JSON: {exc}") from exc


def _load_instance_file(path: str) -> tuple[Instance, dict[str, Any]]:
    p = Path(path)
    text = p.read_text()
    inst = load_instance(text)
    ref = {"path": str(path), "sha256": hashlib.sha256(text.encode()).hexdigest()}
    return inst, ref


def _parse_p(text: str) -> float:
    if text.strip().lower() in ("inf", "infinity"):
        return math.inf
    try:
        value = float(text)
    except ValueError:
        raise ValueError(f"--p must be 'inf' or a number >= 2, got {text!r}") from None
    if math.isnan(value) or value < 2.0:
        raise ValueError(f"--p must be 'inf' or a number >= 2, got {text!r}")
    return value


def _p_key(p: float) -> str:
    return "inf" if math.isinf(p) else format(p, "g")


def _parse_subset(inst: Instance, text: str | None) -> list[int] | None:
    if text is None:
        return None
    labels = [part.strip() for part in text.split(",") if part.strip()]
    if not labels:
        raise ValueError("--subset must list at least one label")
    return [inst.index(label) for label in labels]


def _tree_doc(tree: Tree, inst: Instance) -> dict[str, Any]:
    return {
        "vertices": [inst.labels[v] for v in tree.vertices],
        "edges": [[inst.labels[u], inst.labels[v], float(inst.dist[u, v])]
                  for u, v in tree.edges],
        "cost": tree.cost,
    }


# ---------------------------------------------------------------------------
# subcommands


def _cmd_validate(args: argparse.Namespace) -> int:
    t0 = time.perf_counter()
    path = Path(args.instance)
    text = path.read_text()
    digest = hashlib.sha256(text.encode()).hexdigest()
    violations: list[dict[str, Any]] = []
    n = 0
    try:
        inst = load_instance(text)
        n = inst.n
        ok = True
    except MetricViolationError as exc:
        ok = False
        n = exc.report.n
        violations = [{"kind": v.kind, "where": list(v.where), "message": v.message}
                      for v in exc.report.violations]
    report = {
        "command": "validate",
        "instance": {"path": str(path), "sha256": digest},
        "parameters": {},
        "result": {"ok": ok, "n": n, "violations": violations},
        "timings": {"total_s": time.perf_counter() - t0},
    }
    _write_report(report, args.out)
    if ok:
        print(f"{path}: OK ({n} points)")
        return 0
    print(f"{path}: INVALID ({len(violations)} violations; "
          f"first: {violations[0]['message']})")
    return 1


def _cmd_gen(args: argparse.Namespace) -> int:
    spec = RandomSpec(n=args.n, weight_law=args.weight_law, geometry=args.geometry)
    inst = generate_random(spec, args.seed)
    text = serialize_instance(inst)
    if args.out is None:
        print(text)
    else:
        Path(args.out).write_text(text + "\n")
        print(f"wrote {args.out}: n={inst.n} geometry={args.geometry} "
              f"weight-law={args.weight_law} seed={args.seed}")
    return 0


def _plan_report_body(inst: Instance, eps: float) -> tuple[dict[str, Any], dict[str, Any], Schedule]:
    res = plan(inst, eps=eps)
    diag = res.diagnostics
    result = {
        "schedule": schedule_to_document(res.schedule, inst),
        "classes": [{
            "index": c.index,
            "rounded_weight": c.rounded_weight,
            "members": [inst.labels[x] for x in c.members],
            "theta": c.theta,
        } for c in res.classes],
        "class_trees": [{
            "class_index": i,
            "budget": cover.budget_used,
            "max_cost": cover.max_cost,
            "trees": [_tree_doc(t, inst) for t in cover.trees],
        } for i, cover in sorted(res.covers.items())],
        "lists": [{
            "index": tl.index,
            "lam": tl.lam,
            "tours": [[inst.labels[x] for x in t.visits] for t in tl.tours],
        } for tl in res.lists],
        "I": res.I,
        "J": res.J,
        "phases": res.phases,
        "objective_inf": diag["objective_inf"],
        "objective_2": diag["objective_2"],
        "lower_bound": diag["lower_bound"],
        "envelope_ratio": diag["envelope_ratio"],
        "envelope_limit": diag["envelope_limit"],
    }
    obj, lb = diag["objective_inf"], diag["lower_bound"]
    invariants = {
        "all_points_visited": diag["all_points_visited"],
        "list_weight_ok": diag["list_weight_ok"],
        "tree_budget_ok": diag["tree_budget_ok"],
        "envelope_ok": obj <= diag["envelope_limit"] * lb or (obj == 0.0 and lb == 0.0),
    }
    return result, invariants, res.schedule


def _cmd_plan(args: argparse.Namespace) -> int:
    t0 = time.perf_counter()
    inst, ref = _load_instance_file(args.instance)
    result, invariants, schedule = _plan_report_body(inst, args.eps)
    report = {
        "command": "plan",
        "instance": ref,
        "parameters": {"eps": args.eps},
        "result": result,
        "invariants": invariants,
        "timings": {"total_s": time.perf_counter() - t0},
    }
    _write_report(report, args.out)
    if args.schedule_out:
        doc = json.dumps(_encode(schedule_to_document(schedule, inst)),
                         indent=2, sort_keys=True)
        Path(args.schedule_out).write_text(doc + "\n")
    flags = " ".join(f"{k}={'pass' if v else 'FAIL'}" for k, v in sorted(invariants.items()))
    print(f"plan: {len(schedule)} visits over {result['phases']} phases, "
          f"objective_inf={_fmt(result['objective_inf'])}, "
          f"lower_bound={_fmt(result['lower_bound'])}, "
          f"limit={_fmt(result['envelope_limit'])}")
    print(f"invariants: {flags}")
    return 0


def _cmd_eval(args: argparse.Namespace) -> int:
    t0 = time.perf_counter()
    inst, ref = _load_instance_file(args.instance)
    sched = schedule_from_document(_read_json(args.schedule), inst)
    ps = [_parse_p(t) for t in (args.p or ["2", "inf"])]
    per_p: dict[str, Any] = {}
    for p in ps:
        per_p[_p_key(p)] = {
            "objective": weighted_objective(sched, inst, p),
            "point_costs": {inst.labels[x]: point_cost(sched, x, inst, p)
                            for x in range(inst.n)},
        }
    report = {
        "command": "eval",
        "instance": ref,
        "parameters": {"schedule": str(args.schedule), "p": [_p_key(p) for p in ps]},
        "result": {
            "visits": len(sched),
            "period": period_length(sched, inst),
            "per_p": per_p,
        },
        "timings": {"total_s": time.perf_counter() - t0},
    }
    _write_report(report, args.out)
    summary = ", ".join(f"p={k}: {_fmt(v['objective'])}" for k, v in per_p.items())
    print(f"eval: {len(sched)} visits, period {_fmt(period_length(sched, inst))}; {summary}")
    return 0


def _cmd_oracle_tsp(args: argparse.Namespace) -> int:
    t0 = time.perf_counter()
    inst, ref = _load_instance_file(args.instance)
    subset = _parse_subset(inst, args.subset)
    res = held_karp_tsp(inst, subset)
    report = {
        "command": "oracle-tsp",
        "instance": ref,
        "parameters": {"subset": None if subset is None
                       else [inst.labels[x] for x in subset]},
        "result": {
            "value": res.value,
            "witness": schedule_to_document(res.witness, inst),
            "search_bound": res.search_bound,
        },
        "timings": {"total_s": time.perf_counter() - t0},
    }
    _write_report(report, args.out)
    print(f"oracle-tsp: value {_fmt(res.value)} over "
          f"{res.search_bound['points']} points")
    return 0


def _cmd_oracle_opt(args: argparse.Namespace) -> int:
    t0 = time.perf_counter()
    inst, ref = _load_instance_file(args.instance)
    p = _parse_p(args.p)
    max_period = args.max_period if args.max_period is not None else inst.n
    res = brute_force_weighted_opt(inst, p, max_period)
    report = {
        "command": "oracle-opt",
        "instance": ref,
        "parameters": {"p": _p_key(p), "max_period": max_period},
        "result": {
            "value": res.value,
            "witness": schedule_to_document(res.witness, inst),
            "search_bound": res.search_bound,
        },
        "timings": {"total_s": time.perf_counter() - t0},
    }
    _write_report(report, args.out)
    print(f"oracle-opt: best weighted objective {_fmt(res.value)} "
          f"at p={_p_key(p)}, periods up to {max_period} visits "
          f"(upper bound on the unrestricted optimum)")
    return 0


def _cmd_oracle_cover(args: argparse.Namespace) -> int:
    t0 = time.perf_counter()
    inst, ref = _load_instance_file(args.instance)
    subset = _parse_subset(inst, args.subset)
    res = partition_tree_cover_oracle(inst, subset, args.k)
    report = {
        "command": "oracle-cover",
        "instance": ref,
        "parameters": {
            "subset": None if subset is None else [inst.labels[x] for x in subset],
            "k": args.k,
        },
        "result": {
            "value": res.value,
            "witness": [[inst.labels[x] for x in block] for block in res.witness],
            "search_bound": res.search_bound,
        },
        "timings": {"total_s": time.perf_counter() - t0},
    }
    _write_report(report, args.out)
    print(f"oracle-cover: exact min-max block cost {_fmt(res.value)} "
          f"with {len(res.witness)} blocks (k={args.k})")
    return 0


def _cmd_treecover(args: argparse.Namespace) -> int:
    t0 = time.perf_counter()
    inst, ref = _load_instance_file(args.instance)
    subset = _parse_subset(inst, args.subset)
    cover = minmax_tree_cover(inst, subset, args.k, eps=args.eps)
    report = {
        "command": "treecover",
        "instance": ref,
        "parameters": {
            "subset": None if subset is None else [inst.labels[x] for x in subset],
            "k": args.k,
            "eps": args.eps,
        },
        "result": {
            "budget": cover.budget_used,
            "max_cost": cover.max_cost,
            "guarantee_factor": 4.0 * (1.0 + args.eps),
            "trees": [_tree_doc(t, inst) for t in cover.trees],
        },
        "timings": {"total_s": time.perf_counter() - t0},
    }
    _write_report(report, args.out)
    print(f"treecover: {len(cover.trees)} trees (k={args.k}), "
          f"max cost {_fmt(cover.max_cost)} at budget {_fmt(cover.budget_used)}")
    return 0


def _cmd_attack(args: argparse.Namespace) -> int:
    t0 = time.perf_counter()
    inst, ref = _load_instance_file(args.instance)
    sched = schedule_from_document(_read_json(args.schedule), inst)
    outcomes = per_target_best(sched, inst)
    best = attacker_best_response(sched, inst)
    report = {
        "command": "attack",
        "instance": ref,
        "parameters": {"schedule": str(args.schedule)},
        "result": {
            "best": {"target": inst.labels[best.target],
                     "duration": best.duration,
                     "utility": best.utility},
            "per_target": [{"target": inst.labels[o.target],
                            "duration": o.duration,
                            "utility": o.utility} for o in outcomes],
        },
        "timings": {"total_s": time.perf_counter() - t0},
    }
    _write_report(report, args.out)
    print(f"attack: best target {inst.labels[best.target]}, "
          f"duration {_fmt(best.duration)}, utility {_fmt(best.utility)}")
    return 0


def _cmd_mix(args: argparse.Namespace) -> int:
    t0 = time.perf_counter()
    inst, ref = _load_instance_file(args.instance)
    strategy = strategy_from_document(_read_json(args.strategy), inst)
    mixed = mix_tours(strategy, inst)
    doc = schedule_to_document(mixed, inst)
    report = {
        "command": "mix",
        "instance": ref,
        "parameters": {"strategy": str(args.strategy),
                       "support": len(strategy.entries)},
        "result": {
            "schedule": doc,
            "visits": len(mixed),
            "period": period_length(mixed, inst),
            "objective_2": weighted_objective(mixed, inst, 2.0),
        },
        "timings": {"total_s": time.perf_counter() - t0},
    }
    _write_report(report, args.out)
    if args.schedule_out:
        Path(args.schedule_out).write_text(
            json.dumps(_encode(doc), indent=2, sort_keys=True) + "\n")
    print(f"mix: {len(strategy.entries)}-tour strategy collapsed to one tour "
          f"with {len(mixed)} visits, period {_fmt(period_length(mixed, inst))}")
    return 0


_BENCH_COLUMNS = [
    "file", "status", "error", "sha256", "n", "I", "phases", "visits",
    "objective_inf", "objective_2", "lower_bound", "envelope_ratio",
    "envelope_limit", "envelope_ok", "oracle_p", "oracle_value",
    "alg_over_oracle",
]


def _bench_row(path: Path, eps: float) -> dict[str, Any]:
    row: dict[str, Any] = {c: None for c in _BENCH_COLUMNS}
    row["file"] = path.name
    row["sha256"] = _digest(path)
    try:
        inst = load_instance(path.read_text())
        res = plan(inst, eps=eps)
        diag = res.diagnostics
        row.update({
            "status": "ok",
            "n": inst.n,
            "I": res.I,
            "phases": res.phases,
            "visits": len(res.schedule),
            "objective_inf": diag["objective_inf"],
            "objective_2": diag["objective_2"],
            "lower_bound": diag["lower_bound"],
            "envelope_ratio": diag["envelope_ratio"],
            "envelope_limit": diag["envelope_limit"],
            "envelope_ok": (diag["envelope_ratio"] is None
                            or diag["envelope_ratio"] <= diag["envelope_limit"]),
        })
        if inst.n <= BRUTE_FORCE_MAX_POINTS:
            max_period = min(inst.n + 2, BRUTE_FORCE_MAX_PERIOD)
            oracle = brute_force_weighted_opt(inst, math.inf, max_period)
            row["oracle_p"] = "inf"
            row["oracle_value"] = oracle.value
            if oracle.value > 0.0:
                row["alg_over_oracle"] = diag["objective_inf"] / oracle.value
    except (ValueError, KeyError) as exc:
        row["status"] = "failed"
        row["error"] = str(exc)
    return row


def _cmd_bench(args: argparse.Namespace) -> int:
    t0 = time.perf_counter()
    corpus = Path(args.corpus)
    if not corpus.is_dir():
        raise OSError(f"corpus directory not found: {corpus}")
    files = sorted(corpus.glob("*.json"), key=lambda p: p.name)
    rows = [_bench_row(path, args.eps) for path in files]

    ok = [r for r in rows if r["status"] == "ok"]
    failed = [r for r in rows if r["status"] != "ok"]
    ratios = [r["envelope_ratio"] for r in ok if r["envelope_ratio"] is not None]
    summary = {
        "instances": len(rows),
        "ok": len(ok),
        "failed": len(failed),
        "max_envelope_ratio": max(ratios) if ratios else None,
        "all_envelopes_ok": all(r["envelope_ok"] for r in ok),
    }
    report = {
        "command": "bench",
        "corpus": {"path": str(corpus), "files": len(rows)},
        "parameters": {"eps": args.eps, "seed": args.seed},
        "result": {"summary": summary, "rows": rows},
        "timings": {"total_s": time.perf_counter() - t0},
    }

    prefix = args.out
    if prefix is not None:
        _write_report(report, f"{prefix}.json")
        with open(f"{prefix}.csv", "w", newline="") as fh:
            writer = csv.DictWriter(fh, fieldnames=_BENCH_COLUMNS)
            writer.writeheader()
            for row in rows:
                writer.writerow({k: ("" if v is None else _encode(v))
                                 for k, v in row.items()})

    ratio_txt = (_fmt(summary["max_envelope_ratio"])
                 if summary["max_envelope_ratio"] is not None else "n/a")
    print(f"bench: {summary['instances']} instances, {summary['ok']} ok, "
          f"{summary['failed']} failed, max envelope ratio {ratio_txt}, "
          f"envelopes {'all ok' if summary['all_envelopes_ok'] else 'VIOLATED'}")
    return 0


# ---------------------------------------------------------------------------
# parser


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="patrolsched",
        description="Weighted patrol scheduling: planner, oracles, and attack analysis.")
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name: str, func, help_text: str) -> argparse.ArgumentParser:
        p = sub.add_parser(name, help=help_text)
        p.set_defaults(func=func)
        return p

    p = add("validate", _cmd_validate, "check an instance document")
    p.add_argument("instance")
    p.add_argument("--out", help="write a JSON run report")

    p = add("gen", _cmd_gen, "generate a random instance document")
    p.add_argument("--n", type=int, required=True, help="number of points (>= 3)")
    p.add_argument("--weight-law", choices=WEIGHT_LAWS, default="uniform")
    p.add_argument("--geometry", choices=GEOMETRIES, default="euclidean-plane")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", help="instance output path (default: stdout)")

    p = add("plan", _cmd_plan, "compute an approximate patrol schedule")
    p.add_argument("instance")
    p.add_argument("--eps", type=float, default=1e-6)
    p.add_argument("--out", help="write a JSON run report")
    p.add_argument("--schedule-out", help="also write the bare schedule document")

    p = add("eval", _cmd_eval, "evaluate a schedule document")
    p.add_argument("instance")
    p.add_argument("schedule", help="schedule document path")
    p.add_argument("--p", action="append",
                   help="absence-cost exponent: 'inf' or a number >= 2 "
                        "(repeatable; default: 2 and inf)")
    p.add_argument("--out", help="write a JSON run report")

    p = add("oracle-tsp", _cmd_oracle_tsp,
            f"exact shortest closed tour (<= {HELD_KARP_MAX} points)")
    p.add_argument("instance")
    p.add_argument("--subset", help="comma-separated point labels")
    p.add_argument("--out", help="write a JSON run report")

    p = add("oracle-opt", _cmd_oracle_opt,
            f"exhaustive best schedule (<= {BRUTE_FORCE_MAX_POINTS} points)")
    p.add_argument("instance")
    p.add_argument("--p", default="inf",
                   help="absence-cost exponent: 'inf' or a number >= 2")
    p.add_argument("--max-period", type=int,
                   help="longest visit sequence searched (default: n)")
    p.add_argument("--out", help="write a JSON run report")

    p = add("oracle-cover", _cmd_oracle_cover,
            "exact min-max tree cover by partition enumeration")
    p.add_argument("instance")
    p.add_argument("--subset", help="comma-separated point labels")
    p.add_argument("--k", type=int, required=True, help="maximum number of trees")
    p.add_argument("--out", help="write a JSON run report")

    p = add("treecover", _cmd_treecover, "approximate min-max tree cover")
    p.add_argument("instance")
    p.add_argument("--subset", help="comma-separated point labels")
    p.add_argument("--k", type=int, required=True, help="maximum number of trees")
    p.add_argument("--eps", type=float, default=1e-6)
    p.add_argument("--out", help="write a JSON run report")

    p = add("attack", _cmd_attack, "best attacker response against a schedule")
    p.add_argument("instance")
    p.add_argument("schedule", help="schedule document path")
    p.add_argument("--out", help="write a JSON run report")

    p = add("mix", _cmd_mix, "collapse a mixed strategy into one schedule")
    p.add_argument("instance")
    p.add_argument("strategy", help="strategy document path")
    p.add_argument("--out", help="write a JSON run report")
    p.add_argument("--schedule-out", help="also write the bare schedule document")

    p = add("bench", _cmd_bench, "planner ratio table over a corpus directory")
    p.add_argument("corpus", help="directory of instance *.json documents")
    p.add_argument("--eps", type=float, default=1e-6)
    p.add_argument("--seed", type=int, default=0,
                   help="echoed into the report for provenance")
    p.add_argument("--out", help="output prefix: writes PREFIX.json and PREFIX.csv")

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        code = exc.code if isinstance(exc.code, int) else 2
        return 0 if code == 0 else 2
    try:
        return args.func(args)
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (ValueError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
