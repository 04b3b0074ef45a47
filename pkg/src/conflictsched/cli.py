"""Command-line interface: generate, solve, validate, export, bench.

The bench subcommand scores every (instance, method) pair against the exact
solver's proven optimum, or its upper bound when a limit stops the proof, and
reports relative percentage errors; rows are sorted by (instance, method) so
reruns with identical seeds produce identical CSVs up to the timing column.
"""

from __future__ import annotations

import argparse
import csv
import math
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path
from typing import Optional, Sequence

from .core import (
    InstanceFormatError,
    Schedule,
    objective_value,
    schedule_from_json,
    schedule_to_json,
    validate_schedule,
)
from .gen import (
    GenParams,
    generate_instance,
    read_instance,
    read_manifest,
    write_instance,
    write_manifest,
)
from .heuristics import SearchConfig, ivns, vns, wspt_list_schedule
from .milp import build_ilp1, build_ilp2, export_lp, solve_bnb
from .uet import solve_uet_anchored_greedy, solve_uet_two_machines

METHODS = ("uet2", "familyA", "wspt", "vns", "ivns", "bnb")

CSV_COLUMNS = ["instance", "method", "objective", "reference", "ref_kind", "error_pct", "time_s", "seed"]


@dataclass(frozen=True)
class BenchRecord:
    instance_id: str
    method: str
    objective: Fraction
    reference: Fraction
    ref_kind: str  # "optimal" or "bound"
    error_pct: float
    wall_time: float
    seed: int


def _relative_error_pct(reference: Fraction, value: Fraction) -> float:
    if reference == 0:
        return 0.0
    return float(100 * (reference - value) / reference)


def _search_config(args, n: Optional[int] = None) -> SearchConfig:
    shake = None
    if getattr(args, "shake_frac", None) is not None:
        if n is None:
            raise ValueError("shake fraction needs a job count")
        shake = max(1, math.ceil(n * Fraction(args.shake_frac)))
    return SearchConfig(
        shake_moves=shake,
        restarts=args.restarts,
        rng_seed=args.seed,
    )


def _solve_with_method(inst, method: str, args) -> tuple[Schedule, Optional[str], float]:
    """Run one solver; returns (schedule, bnb status or None, wall seconds)."""
    started = time.perf_counter()
    status = None
    if method == "uet2":
        sched = solve_uet_two_machines(inst)
    elif method == "familyA":
        sched = solve_uet_anchored_greedy(inst)
    elif method == "wspt":
        sched = wspt_list_schedule(inst)
    elif method == "vns":
        sched = vns(inst, wspt_list_schedule(inst), _search_config(args, inst.n))
    elif method == "ivns":
        sched = ivns(inst, _search_config(args, inst.n))
    elif method == "bnb":
        result = solve_bnb(inst, time_limit=args.time_limit, node_limit=args.node_limit)
        status = result.status
        if result.schedule is None:
            raise RuntimeError(f"exact solver returned no schedule (status {result.status})")
        sched = result.schedule
    else:
        raise ValueError(f"unknown method {method!r}")
    return sched, status, time.perf_counter() - started


def cmd_generate(args) -> int:
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    entries = []
    for i in range(args.count):
        gp = GenParams(m=args.m, n=args.n, delta=Fraction(args.delta), c=Fraction(args.c), seed=args.seed + i)
        inst = generate_instance(gp)
        name = f"inst_{i:04d}.txt"
        write_instance(inst, out / name)
        entries.append({"id": f"inst_{i:04d}", "file": name, "seed": gp.seed})
    base = GenParams(m=args.m, n=args.n, delta=Fraction(args.delta), c=Fraction(args.c), seed=args.seed)
    write_manifest(out, base, entries)
    print(f"wrote {args.count} instances + manifest to {out}")
    return 0


def cmd_solve(args) -> int:
    inst = read_instance(args.instance)
    sched, status, seconds = _solve_with_method(inst, args.method, args)
    violation = validate_schedule(inst, sched)
    value = objective_value(inst, sched) if violation is None else None
    if args.out:
        Path(args.out).write_text(schedule_to_json(sched), encoding="ascii")
    line = f"method={args.method} F={value} valid={'yes' if violation is None else violation} time={seconds:.4f}s"
    if status is not None:
        line += f" status={status}"
    print(line)
    return 0 if violation is None else 1


def cmd_validate(args) -> int:
    inst = read_instance(args.instance)
    sched = schedule_from_json(Path(args.schedule).read_text(encoding="ascii"))
    violation = validate_schedule(inst, sched)
    if violation is None:
        print(f"ok F={objective_value(inst, sched)}")
        return 0
    print(f"violation: {violation}")
    return 1


def cmd_export(args) -> int:
    inst = read_instance(args.instance)
    model = build_ilp1(inst) if args.model == "ilp1" else build_ilp2(inst)
    export_lp(model, args.out)
    print(f"wrote {model.formulation} model ({model.binary_count} binaries) to {args.out}")
    return 0


def _bench_instance(task) -> list[BenchRecord]:
    directory, entry, methods, seed, restarts, shake_frac, time_limit, node_limit = task
    args = argparse.Namespace(
        seed=seed,
        restarts=restarts,
        shake_frac=shake_frac,
        time_limit=time_limit,
        node_limit=node_limit,
    )
    inst = read_instance(Path(directory) / entry["file"])
    reference_result = solve_bnb(inst, time_limit=time_limit, node_limit=node_limit)
    if reference_result.status == "optimal":
        reference, ref_kind = reference_result.value, "optimal"
    else:
        reference, ref_kind = reference_result.upper_bound, "bound"
    records = []
    for method in methods:
        if method == "bnb":
            value = reference_result.value if reference_result.value is not None else Fraction(0)
            seconds = reference_result.elapsed
        else:
            sched, _, seconds = _solve_with_method(inst, method, args)
            value = objective_value(inst, sched)
        records.append(
            BenchRecord(
                instance_id=entry["id"],
                method=method,
                objective=value,
                reference=reference,
                ref_kind=ref_kind,
                error_pct=_relative_error_pct(reference, value),
                wall_time=seconds,
                seed=seed,
            )
        )
    return records


def cmd_bench(args) -> int:
    manifest = read_manifest(args.corpus)
    methods = [m.strip() for m in args.methods.split(",") if m.strip()]
    for method in methods:
        if method not in METHODS:
            raise ValueError(f"unknown method {method!r}; choose from {METHODS}")
    tasks = [
        (args.corpus, entry, tuple(methods), args.seed, args.restarts, args.shake_frac,
         args.time_limit, args.node_limit)
        for entry in manifest["instances"]
    ]
    if args.threads > 1:
        with ProcessPoolExecutor(max_workers=args.threads) as pool:
            results = list(pool.map(_bench_instance, tasks))
    else:
        results = [_bench_instance(task) for task in tasks]
    records = sorted(
        (rec for batch in results for rec in batch),
        key=lambda r: (r.instance_id, r.method),
    )
    out = Path(args.out)
    with out.open("w", newline="", encoding="ascii") as fh:
        writer = csv.writer(fh)
        writer.writerow(CSV_COLUMNS)
        for r in records:
            writer.writerow(
                [r.instance_id, r.method, str(r.objective), str(r.reference), r.ref_kind,
                 f"{r.error_pct:.2f}", f"{r.wall_time:.4f}", r.seed]
            )
        for method in methods:
            group = [r for r in records if r.method == method]
            if not group:
                continue
            mean_err = sum(r.error_pct for r in group) / len(group)
            mean_time = sum(r.wall_time for r in group) / len(group)
            writer.writerow(["mean", method, "", "", "", f"{mean_err:.2f}", f"{mean_time:.4f}", args.seed])
    print(f"wrote {len(records)} records to {out}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="conflictsched",
        description="Schedule weighted jobs with a common deadline on parallel machines under a conflict graph.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_gen = sub.add_parser("generate", help="generate a seeded instance corpus")
    p_gen.add_argument("--m", type=int, required=True)
    p_gen.add_argument("--n", type=int, required=True)
    p_gen.add_argument("--delta", required=True, help="time-window ratio, e.g. 0.3")
    p_gen.add_argument("--c", required=True, help="conflict density in (0,1)")
    p_gen.add_argument("--seed", type=int, default=0)
    p_gen.add_argument("--count", type=int, default=1)
    p_gen.add_argument("--out", required=True)
    p_gen.set_defaults(func=cmd_generate)

    p_solve = sub.add_parser("solve", help="solve one instance file")
    p_solve.add_argument("instance")
    p_solve.add_argument("--method", choices=METHODS, required=True)
    p_solve.add_argument("--out", help="write the schedule JSON here")
    p_solve.add_argument("--seed", type=int, default=0)
    p_solve.add_argument("--restarts", type=int, default=10)
    p_solve.add_argument("--shake-frac", type=str, default=None, help="shake size as a fraction of n (default 0.05)")
    p_solve.add_argument("--time-limit", type=float, default=None)
    p_solve.add_argument("--node-limit", type=int, default=None)
    p_solve.set_defaults(func=cmd_solve)

    p_val = sub.add_parser("validate", help="check a schedule file against an instance")
    p_val.add_argument("instance")
    p_val.add_argument("schedule")
    p_val.set_defaults(func=cmd_validate)

    p_exp = sub.add_parser("export", help="export an integer programming model as an LP file")
    p_exp.add_argument("instance")
    p_exp.add_argument("--model", choices=("ilp1", "ilp2"), required=True)
    p_exp.add_argument("--out", required=True)
    p_exp.set_defaults(func=cmd_export)

    p_bench = sub.add_parser("bench", help="benchmark methods over a generated corpus")
    p_bench.add_argument("corpus", help="directory containing instances + manifest.json")
    p_bench.add_argument("--methods", default="wspt,vns,ivns,bnb")
    p_bench.add_argument("--out", required=True)
    p_bench.add_argument("--seed", type=int, default=0)
    p_bench.add_argument("--restarts", type=int, default=10)
    p_bench.add_argument("--shake-frac", type=str, default=None)
    p_bench.add_argument("--time-limit", type=float, default=None)
    p_bench.add_argument("--node-limit", type=int, default=None)
    p_bench.add_argument("--threads", type=int, default=1)
    p_bench.set_defaults(func=cmd_bench)

    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (InstanceFormatError, FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
