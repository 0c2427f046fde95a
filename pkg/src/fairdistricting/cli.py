"""Command-line entry point.

Exit status: 0 on success, 2 when the instance has no solution for the
requested target (a report is still written), 1 on usage or input errors.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from dataclasses import replace
from pathlib import Path

from .districting import DEFAULT_GUESS_BUDGET, decide_fair_districting, minimize_fair_districting
from .election import INF, MovSemantics, VoteProfile, margin_of_victory, winners
from .errors import FairDistrictingError, MalformedInputError
from .greedy import GreedyConfig, greedy_solve
from .ingest import (
    expand_to_instance,
    instance_to_dict,
    load_aggregate_csv,
    load_instance,
    load_locations_csv,
    save_instance,
)
from .model import Assignment, make_report, validate
from .partition import DEFAULT_BUDGET, solve_fair_partitioning, solve_fair_partitioning_milp
from .sweep import experiment_sweep, write_sweep_csv
from .synthgen import (
    LineModelConfig,
    SatFormula,
    TwoDcpInstance,
    generate_line_model,
    reduce_2dcp_to_fair_connected_districting,
    reduce_sat_to_fair_districting,
)


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _emit(payload: dict | str, out: str | None) -> None:
    text = payload if isinstance(payload, str) else json.dumps(payload, indent=2)
    if out:
        Path(out).write_text(text.rstrip("\n") + "\n", encoding="utf-8")
    else:
        print(text)


def _load(args) -> "object":
    inst = load_instance(args.input)
    changes = {}
    if getattr(args, "semantics", None):
        changes["semantics"] = MovSemantics.parse(args.semantics)
    if getattr(args, "smin", None) is not None:
        changes["s_min"] = args.smin
    if getattr(args, "smax", None) is not None:
        changes["s_max"] = args.smax
    return replace(inst, **changes) if changes else inst


def _cmd_generate(args) -> int:
    inst = generate_line_model(
        LineModelConfig(
            n_voters=args.voters,
            n_candidates=args.candidates,
            n_districts=args.districts,
            homophily=args.homophily,
            p0=args.p0,
            seed=args.seed,
            size_slack=None if args.size_slack < 0 else args.size_slack,
            semantics=args.semantics or "set-change",
        )
    )
    _emit(instance_to_dict(inst), args.out)
    return 0


def _cmd_ingest(args) -> int:
    data = load_aggregate_csv(args.input)
    locations = load_locations_csv(args.locations) if args.locations else None
    inst = expand_to_instance(
        data,
        locations,
        closest_q=args.closest_q,
        sample_rate=args.sample_rate,
        seed=args.seed,
        s_min=args.smin or 0,
        s_max=args.smax,
        semantics=args.semantics or "set-change",
    )
    _emit(instance_to_dict(inst), args.out)
    return 0


def _cmd_mov(args) -> int:
    try:
        tallies = [int(x) for x in args.tallies.split(",")]
    except ValueError:
        raise UsageError("--tallies must be comma-separated integers") from None
    prof = VoteProfile(tuple(tallies))
    sem = MovSemantics.parse(args.semantics or "set-change")
    mov = margin_of_victory(prof, sem)
    _emit(
        {
            "tallies": tallies,
            "winners": sorted(winners(prof)),
            "semantics": sem.value,
            "mov": None if mov == INF else mov,
        },
        args.out,
    )
    return 0


def _solve_exact(args, kind: str) -> int:
    inst = _load(args)
    start = time.perf_counter()
    params = {"target": args.target, "budget": args.budget, "semantics": inst.semantics.value}
    if kind == "dp":
        if args.method == "milp":
            value, witness = solve_fair_partitioning_milp(inst)
        else:
            value, witness = solve_fair_partitioning(inst, args.budget)
        params["method"] = args.method
        feasible = value < INF if args.target is None else value <= args.target
        name = "exact-partitioning"
    elif args.target is not None:
        feasible, witness = decide_fair_districting(inst, args.target, args.budget)
        value = None
        name = "exact-districting"
    else:
        value, witness = minimize_fair_districting(inst, args.budget)
        feasible = value < INF
        name = "exact-districting"
    report = make_report(
        inst,
        witness if (witness is not None and feasible) else inst.initial,
        solver=name,
        params=params,
        wall_time=time.perf_counter() - start,
        feasible=bool(feasible),
        optimum=value,
    )
    _emit(report.to_dict(), args.out)
    return 0 if feasible else 2


def _cmd_greedy(args) -> int:
    inst = _load(args)
    report = greedy_solve(
        inst, GreedyConfig(args.variant, args.max_iters, restart_other_districts=args.restart)
    )
    _emit(report.to_dict(), args.out)
    return 0


def _cmd_reduce_sat(args) -> int:
    phi = SatFormula.parse_dimacs(Path(args.input).read_text(encoding="utf-8"))
    _emit(instance_to_dict(reduce_sat_to_fair_districting(phi)), args.out)
    return 0


def _cmd_reduce_2dcp(args) -> int:
    src = TwoDcpInstance.from_dict(json.loads(Path(args.input).read_text(encoding="utf-8")))
    _emit(instance_to_dict(reduce_2dcp_to_fair_connected_districting(src)), args.out)
    return 0


def _read_assignment(path: str) -> Assignment:
    data = json.loads(Path(path).read_text(encoding="utf-8"))
    if isinstance(data, dict):
        data = data.get("assignment", data.get("district_of"))
    if not isinstance(data, list):
        raise MalformedInputError("assignment file must hold a list or an 'assignment' key")
    return Assignment(tuple(int(d) for d in data))


def _cmd_evaluate(args) -> int:
    inst = _load(args)
    a = _read_assignment(args.assignment)
    verdict = validate(inst, a, args.target)
    report = make_report(inst, a, solver="evaluate", params={"target": args.target}, feasible=verdict.ok)
    out = report.to_dict()
    out["violations"] = [v.message for v in verdict.violations]
    _emit(out, args.out)
    return 0 if verdict.ok else 2


def _cmd_sweep(args) -> int:
    config = json.loads(Path(args.config).read_text(encoding="utf-8"))
    if args.seed is not None:
        config["seed"] = args.seed
    rows = experiment_sweep(config)
    if args.out:
        write_sweep_csv(rows, args.out)
    else:
        write_sweep_csv(rows, sys.stdout)
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="fairdistricting", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def cmd(name, fn, help, needs_in=True):
        sp = sub.add_parser(name, help=help)
        sp.set_defaults(func=fn)
        if needs_in:
            sp.add_argument("--in", dest="input", required=True)
        sp.add_argument("--out")
        sp.add_argument("--semantics", choices=[s.value for s in MovSemantics])
        return sp

    sp = cmd("generate", _cmd_generate, "line-model instance", needs_in=False)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--voters", type=int, default=100)
    sp.add_argument("--candidates", type=int, default=5)
    sp.add_argument("--districts", type=int, default=5)
    sp.add_argument("--homophily", type=float, default=0.0)
    sp.add_argument("--p0", type=float, default=0.1)
    sp.add_argument("--size-slack", type=float, default=0.2, help="negative = unbounded")

    sp = cmd("ingest", _cmd_ingest, "aggregate CSV to instance")
    sp.add_argument("--locations")
    sp.add_argument("--closest-q", type=int)
    sp.add_argument("--sample-rate", type=float)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--smin", type=int)
    sp.add_argument("--smax", type=int)

    sp = cmd("mov", _cmd_mov, "margin of victory of a tally vector", needs_in=False)
    sp.add_argument("--tallies", required=True)

    for name, kind, budget in (("solve-dp", "dp", DEFAULT_BUDGET), ("solve-flow", "flow", DEFAULT_GUESS_BUDGET)):
        sp = cmd(name, lambda a, kind=kind: _solve_exact(a, kind), f"exact solver ({kind})")
        sp.add_argument("--target", type=int)
        sp.add_argument("--budget", type=int, default=budget)
        sp.add_argument("--smin", type=int)
        sp.add_argument("--smax", type=int)
        if kind == "dp":
            sp.add_argument("--method", choices=["dp", "milp"], default="dp")

    sp = cmd("greedy", _cmd_greedy, "greedy local search")
    sp.add_argument("--variant", default="districting", choices=["partitioning", "districting", "connected"])
    sp.add_argument("--max-iters", type=int, default=100_000)
    sp.add_argument("--restart", action="store_true", help="try other districts when the worst is stuck")
    sp.add_argument("--smin", type=int)
    sp.add_argument("--smax", type=int)

    cmd("reduce-sat", _cmd_reduce_sat, "DIMACS CNF to gadget instance")
    cmd("reduce-2dcp", _cmd_reduce_2dcp, "2DCP JSON to connected gadget instance")

    sp = cmd("evaluate", _cmd_evaluate, "score an assignment")
    sp.add_argument("--assignment", required=True)
    sp.add_argument("--target", type=int)

    sp = sub.add_parser("sweep", help="synthetic experiment sweep")
    sp.set_defaults(func=_cmd_sweep)
    sp.add_argument("--config", required=True)
    sp.add_argument("--out")
    sp.add_argument("--seed", type=int)
    return p


def run(argv: list[str] | None = None) -> int:
    try:
        args = build_parser().parse_args(argv)
        return args.func(args)
    except (UsageError, FairDistrictingError, OSError, json.JSONDecodeError) as exc:
        print(f"fairdistricting: error: {exc}", file=sys.stderr)
        return 1


def main() -> None:
    sys.exit(run())
