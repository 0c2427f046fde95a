"""Synthetic experiment sweeps over the line model."""

from __future__ import annotations

import csv
import io
import itertools
from pathlib import Path
from typing import Iterable

from .election import MovSemantics
from .greedy import GreedyConfig, Variant, greedy_solve
from .model import district_movs
from .partition import solve_fair_partitioning_milp
from .synthgen import LineModelConfig, generate_line_model, restrict_mobility_to_neighbors

HEADER = [
    "homophily",
    "size_slack",
    "variant",
    "max_mov_before",
    "max_mov_after",
    "total_mov_before",
    "total_mov_after",
    "runs",
]

DEFAULTS = {
    "seed": 0,
    "instances": 50,
    "iterations": 1,
    "n_voters": 100,
    "n_candidates": 5,
    "n_districts": 5,
    "p0": 0.1,
    "homophily": [0.0, 0.5, 1.0],
    "size_slack": [0.2],
    "variants": ["partitioning", "districting", "connected", "exact"],
    "semantics": "set-change",
    "mobility_reach": 2,
    "max_iterations": 100_000,
}


def _run_variant(instance, variant: str, reach: int, max_iterations: int) -> tuple[float, float, float, float]:
    before = district_movs(instance, instance.initial)
    if variant == "exact":
        _, witness = solve_fair_partitioning_milp(instance, ignore_graph=True)
        after = district_movs(instance, witness) if witness is not None else before
        return max(before), max(after), sum(before), sum(after)
    v = Variant.parse(variant)
    if v is Variant.DISTRICTING:
        instance = restrict_mobility_to_neighbors(instance, reach)
    report = greedy_solve(instance, GreedyConfig(v, max_iterations))
    return report.max_mov_before, report.max_mov, report.total_mov_before, report.total_mov


def experiment_sweep(config: dict) -> list[dict]:
    """One row per (homophily, size slack, variant), averaged over instances x iterations.

    Instance ``i`` fixes the line-model positions (seed ``seed + i``);
    iteration ``j`` redraws only the graph edges.
    """
    cfg = {**DEFAULTS, **config}
    rows = []
    sem = MovSemantics.parse(cfg["semantics"])
    for h, slack in itertools.product(cfg["homophily"], cfg["size_slack"]):
        sums = {v: [0.0, 0.0, 0.0, 0.0] for v in cfg["variants"]}
        runs = 0
        for i in range(cfg["instances"]):
            for j in range(cfg["iterations"]):
                base = cfg["seed"] + i
                inst = generate_line_model(
                    LineModelConfig(
                        n_voters=cfg["n_voters"],
                        n_candidates=cfg["n_candidates"],
                        n_districts=cfg["n_districts"],
                        homophily=h,
                        p0=cfg["p0"],
                        seed=base,
                        size_slack=slack,
                        semantics=sem,
                        edge_seed=None if cfg["iterations"] == 1 else base * 1_000 + j,
                    )
                )
                for v in cfg["variants"]:
                    vals = _run_variant(inst, v, cfg["mobility_reach"], cfg["max_iterations"])
                    sums[v] = [s + x for s, x in zip(sums[v], vals)]
                runs += 1
        if runs == 0:
            continue
        for v in cfg["variants"]:
            mb, ma, tb, ta = (s / runs for s in sums[v])
            rows.append(
                {
                    "homophily": h,
                    "size_slack": slack,
                    "variant": v,
                    "max_mov_before": mb,
                    "max_mov_after": ma,
                    "total_mov_before": tb,
                    "total_mov_after": ta,
                    "runs": runs,
                }
            )
    return rows


def write_sweep_csv(rows: Iterable[dict], target: str | Path | io.TextIOBase) -> None:
    own = isinstance(target, (str, Path))
    fh = open(target, "w", newline="", encoding="utf-8") if own else target
    try:
        writer = csv.DictWriter(fh, fieldnames=HEADER)
        writer.writeheader()
        for r in rows:
            writer.writerow(r)
    finally:
        if own:
            fh.close()

