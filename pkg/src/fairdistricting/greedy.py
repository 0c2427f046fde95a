"""Greedy local search that moves single voters to lower the worst district's MoV.

One loop serves three variants: ``PARTITIONING`` ignores mobility sets,
``DISTRICTING`` respects them, ``CONNECTED`` additionally keeps every
district connected in the voter graph. Each step looks at the district with
the largest MoV and considers

* its winner supporters leaving for another district, and
* supporters of its runner-up joining it from elsewhere,

and applies the move giving the lexicographically smallest
``(max MoV, empty districts, total finite MoV, summed top-two gaps)``,
provided that is a strict improvement.
"""

from __future__ import annotations

import enum
import math
import time
from dataclasses import dataclass

from .election import margin_of_victory, top_gap
from .errors import MalformedInputError
from .model import (
    Assignment,
    DistrictingInstance,
    Move,
    SolveReport,
    make_report,
    removable_without_disconnect,
)


class Variant(enum.Enum):
    PARTITIONING = "partitioning"
    DISTRICTING = "districting"
    CONNECTED = "connected"

    @classmethod
    def parse(cls, value: "str | Variant") -> "Variant":
        if isinstance(value, cls):
            return value
        aliases = {"connected-districting": "connected", "connecteddistricting": "connected"}
        key = str(value).lower()
        try:
            return cls(aliases.get(key, key))
        except ValueError:
            raise MalformedInputError(f"unknown greedy variant {value!r}") from None


@dataclass(frozen=True)
class GreedyConfig:
    variant: Variant = Variant.DISTRICTING
    max_iterations: int = 100_000
    # when the worst district has no improving move, try the others (by MoV)
    restart_other_districts: bool = False
    # break (max MoV, total MoV) ties by the summed raw top-two gaps
    gap_tiebreak: bool = True

    def __post_init__(self):
        object.__setattr__(self, "variant", Variant.parse(self.variant))
        if self.max_iterations < 1:
            raise MalformedInputError("max_iterations must be positive")


def _objective(movs: list[float], gaps: int = 0) -> tuple:
    # empty districts (MoV inf) are counted separately so filling one still registers
    finite = [x for x in movs if not math.isinf(x)]
    return (max(movs), len(movs) - len(finite), sum(finite), gaps)


class _State:
    def __init__(self, instance: DistrictingInstance, variant: Variant, gap_tiebreak: bool = True):
        self.inst = instance
        self.variant = variant
        self.gap_tiebreak = gap_tiebreak
        self.district = list(instance.initial.district_of)
        self.tops = instance.tops
        k, m = instance.k, instance.m
        self.tally = [[0] * m for _ in range(k)]
        self.members: list[set[int]] = [set() for _ in range(k)]
        for v, d in enumerate(self.district):
            self.tally[d][self.tops[v]] += 1
            self.members[d].add(v)
        self.mov = [margin_of_victory(t, instance.semantics) for t in self.tally]
        self.gap = [top_gap(t) for t in self.tally]
        self.cap = instance.size_cap
        self._removable: dict[tuple[int, int], bool] = {}

    def objective(self) -> tuple:
        return _objective(self.mov, sum(self.gap) if self.gap_tiebreak else 0)

    def _after(self, d: int, alt: int, delta: int) -> tuple[float, int]:
        t = self.tally[d]
        t[alt] += delta
        out = margin_of_victory(t, self.inst.semantics), top_gap(t)
        t[alt] -= delta
        return out

    def objective_after(self, alt: int, src: int, dst: int) -> tuple:
        movs = list(self.mov)
        movs[src], gap_src = self._after(src, alt, -1)
        movs[dst], gap_dst = self._after(dst, alt, +1)
        gaps = 0
        if self.gap_tiebreak:
            gaps = sum(self.gap) - self.gap[src] - self.gap[dst] + gap_src + gap_dst
        return _objective(movs, gaps)

    def legal(self, v: int, src: int, dst: int) -> bool:
        inst = self.inst
        if src == dst:
            return False
        if self.variant is not Variant.PARTITIONING and dst not in inst.mobility[v]:
            return False
        if len(self.members[src]) - 1 < inst.s_min or len(self.members[dst]) + 1 > self.cap:
            return False
        if self.variant is Variant.CONNECTED:
            graph = inst.graph
            if self.members[dst] and not (graph.adjacency[v] & self.members[dst]):
                return False
            key = (src, v)
            if key not in self._removable:
                self._removable[key] = removable_without_disconnect(graph, self.members[src], v)
            if not self._removable[key]:
                return False
        return True

    def apply(self, v: int, dst: int) -> Move:
        src = self.district[v]
        alt = self.tops[v]
        self.tally[src][alt] -= 1
        self.tally[dst][alt] += 1
        self.members[src].discard(v)
        self.members[dst].add(v)
        self.district[v] = dst
        sem = self.inst.semantics
        self.mov[src] = margin_of_victory(self.tally[src], sem)
        self.mov[dst] = margin_of_victory(self.tally[dst], sem)
        self.gap[src] = top_gap(self.tally[src])
        self.gap[dst] = top_gap(self.tally[dst])
        self._removable.clear()
        return Move(v, src, dst)


def _runner_up(tally: list[int]) -> int:
    order = sorted(range(len(tally)), key=lambda a: (-tally[a], a))
    return order[1]


def _moves_for(state: _State, d: int) -> list[Move]:
    inst = state.inst
    k = inst.k
    tally = state.tally[d]
    out: list[Move] = []
    if state.members[d]:
        best = max(tally)
        for v in sorted(state.members[d]):
            if tally[state.tops[v]] != best:
                continue
            for dst in range(k):
                if dst != d and state.legal(v, d, dst):
                    out.append(Move(v, d, dst))
        wanted = _runner_up(tally)
        inbound = (v for v in range(inst.n) if state.tops[v] == wanted)
    else:
        inbound = iter(range(inst.n))
    for v in inbound:
        src = state.district[v]
        if src != d and state.legal(v, src, d):
            out.append(Move(v, src, d))
    out.sort(key=lambda mv: (mv.voter, mv.target))
    return out


def candidate_moves(
    instance: DistrictingInstance, a: Assignment, variant: Variant | str
) -> list[Move]:
    """Legal moves out of / into the district with the largest MoV."""
    state = _State(_with_initial(instance, a), Variant.parse(variant))
    return _moves_for(state, _worst(state.mov))


def _with_initial(instance: DistrictingInstance, a: Assignment) -> DistrictingInstance:
    if a == instance.initial:
        return instance
    from dataclasses import replace

    return replace(instance, initial=a)


def _worst(movs: list[float]) -> int:
    return max(range(len(movs)), key=lambda i: (movs[i], -i))


def _best_improving(state: _State, moves: list[Move], current: tuple) -> Move | None:
    cache: dict[tuple[int, int, int], tuple] = {}
    best, best_obj = None, current
    for mv in moves:
        key = (state.tops[mv.voter], mv.source, mv.target)
        obj = cache.get(key)
        if obj is None:
            obj = cache[key] = state.objective_after(*key)
        # moves are sorted by (voter, target) so strict < keeps the first on ties
        if obj < best_obj:
            best, best_obj = mv, obj
    return best


def greedy_solve(instance: DistrictingInstance, config: GreedyConfig | None = None) -> SolveReport:
    """Run the greedy loop from ``instance.initial`` and report the result."""
    config = config or GreedyConfig()
    variant = config.variant
    if variant is Variant.CONNECTED and instance.graph is None:
        raise MalformedInputError("connected districting needs a voter graph")
    start = time.perf_counter()
    state = _State(instance, variant, config.gap_tiebreak)
    trajectory: list[Move] = []
    iterations = 0
    while iterations < config.max_iterations:
        current = state.objective()
        worst = _worst(state.mov)
        chosen = _best_improving(state, _moves_for(state, worst), current)
        if chosen is None and config.restart_other_districts:
            order = sorted(range(instance.k), key=lambda i: (-state.mov[i], i))
            for d in order[1:]:
                chosen = _best_improving(state, _moves_for(state, d), current)
                if chosen is not None:
                    break
        if chosen is None:
            break
        trajectory.append(state.apply(chosen.voter, chosen.target))
        iterations += 1
    final = Assignment(tuple(state.district))
    return make_report(
        instance,
        final,
        solver=f"greedy-{variant.value}",
        params={
            "variant": variant.value,
            "max_iterations": config.max_iterations,
            "restart_other_districts": config.restart_other_districts,
            "gap_tiebreak": config.gap_tiebreak,
            "iterations": iterations,
            "semantics": instance.semantics.value,
        },
        wall_time=time.perf_counter() - start,
        moves=trajectory,
    )
