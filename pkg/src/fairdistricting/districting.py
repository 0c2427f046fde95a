"""Exact Fair Districting for a small number of districts.

For every district we guess a winner ``x``, a runner-up ``y`` and the
winner's score ``s``. A guess is realisable iff a flow network with one unit
per voter routes every voter into an allowed district such that ``x`` gets
exactly ``s`` votes, ``y`` at least ``s - gap`` and everybody else at most
``s``. Feasibility of that flow with demands is tested by ``maxflow``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterator

from .election import INF, max_gap_for_target
from .errors import ResourceLimitError, WrongSolverError
from .maxflow import FlowNetwork, max_flow_with_demands
from .model import Assignment, DistrictingInstance, validate

DEFAULT_GUESS_BUDGET = 1_000_000


@dataclass(frozen=True)
class DistrictGuess:
    winners: tuple[int, ...]
    runners_up: tuple[int, ...]
    scores: tuple[int, ...]

    def __post_init__(self):
        for x, y, s in zip(self.winners, self.runners_up, self.scores):
            if x == y or s < 1:
                raise ValueError(f"bad district guess ({x}, {y}, {s})")


@dataclass
class GuessNetwork:
    """Flow network for one guess, with the node layout needed to decode flows.

    Nodes: ``0`` is the source, ``1`` the sink, then one node per voter,
    one per (alternative, district) pair and one per district.
    """

    network: FlowNetwork
    n: int
    m: int
    k: int
    voter_arcs: list[tuple[int, int, int]]  # edge index, voter, district

    SOURCE = 0
    SINK = 1

    def voter_node(self, v: int) -> int:
        return 2 + v

    def alt_node(self, a: int, i: int) -> int:
        return 2 + self.n + a * self.k + i

    def district_node(self, i: int) -> int:
        return 2 + self.n + self.m * self.k + i


def build_guess_network(
    instance: DistrictingInstance,
    guess: DistrictGuess,
    t: int,
    strict_discard: bool = False,
) -> GuessNetwork | None:
    """Network for ``guess`` at target ``t``.

    The runner-up edge gets demand ``max(0, s - gap)`` and capacity ``s``.
    With ``strict_discard`` a guess whose ``s - gap`` is not positive is
    dropped instead (``None`` is returned).
    """
    gap = max_gap_for_target(t, instance.semantics)
    n, m, k = instance.n, instance.m, instance.k
    if strict_discard and any(s - gap <= 0 for s in guess.scores):
        return None
    net = FlowNetwork(2 + n + m * k + k, GuessNetwork.SOURCE, GuessNetwork.SINK)
    gn = GuessNetwork(net, n, m, k, [])
    for v in range(n):
        net.add_edge(gn.SOURCE, gn.voter_node(v), 1)
    for v, voter in enumerate(instance.voters):
        for i in sorted(instance.mobility[v]):
            idx = net.add_edge(gn.voter_node(v), gn.alt_node(voter.top, i), 1)
            gn.voter_arcs.append((idx, v, i))
    for i in range(k):
        x, y, s = guess.winners[i], guess.runners_up[i], guess.scores[i]
        for a in range(m):
            if a == x:
                demand = s
            elif a == y:
                demand = max(0, s - gap)
            else:
                demand = 0
            net.add_edge(gn.alt_node(a, i), gn.district_node(i), s, demand)
    for i in range(k):
        net.add_edge(gn.district_node(i), gn.SINK, instance.size_cap, instance.s_min)
    return gn


def _district_options(instance: DistrictingInstance, gap: int) -> list[list[tuple[int, int, int, int]]]:
    """Per district, pruned (winner, runner-up, score, runner-up demand) options."""
    m, k = instance.m, instance.k
    reach = [[0] * m for _ in range(k)]
    # voters with a single allowed district land there in every solution
    forced = [[0] * m for _ in range(k)]
    for v, voter in enumerate(instance.voters):
        for i in instance.mobility[v]:
            reach[i][voter.top] += 1
        if len(instance.mobility[v]) == 1:
            (i,) = instance.mobility[v]
            forced[i][voter.top] += 1
    cap = instance.size_cap
    need = max(instance.s_min, 1)
    options = []
    for i in range(k):
        opts = []
        floor = max(1, max(forced[i]))
        for x in range(m):
            for s in range(floor, min(reach[i][x], cap) + 1):
                r = max(0, s - gap)
                if s + r > cap:
                    continue
                largest = s + sum(min(s, reach[i][z]) for z in range(m) if z != x)
                if largest < need:
                    continue
                for y in range(m):
                    if y == x or reach[i][y] < r:
                        continue
                    opts.append((x, y, s, r))
                    if r == 0:
                        # all runner-up choices give the same network
                        break
        opts.sort()
        options.append(opts)
    return options


def iter_guesses(
    instance: DistrictingInstance, t: int, budget: int = DEFAULT_GUESS_BUDGET
) -> Iterator[DistrictGuess]:
    """Candidate guesses in district-major lexicographic order, pruned by vote budgets."""
    gap = max_gap_for_target(t, instance.semantics)
    options = _district_options(instance, gap)
    space = math.prod(len(o) for o in options)
    if space > budget:
        raise ResourceLimitError("guess space too large", space, budget)
    avail = list(instance.tallies().tallies)
    n, k = instance.n, instance.k
    cap = instance.size_cap
    chosen: list[tuple[int, int, int, int]] = []

    def rec(i: int, committed: int, room: int) -> Iterator[DistrictGuess]:
        if i == k:
            if room >= n:
                yield DistrictGuess(
                    tuple(c[0] for c in chosen),
                    tuple(c[1] for c in chosen),
                    tuple(c[2] for c in chosen),
                )
            return
        for x, y, s, r in options[i]:
            if avail[x] < s or avail[y] < r or committed + s + r > n:
                continue
            avail[x] -= s
            avail[y] -= r
            chosen.append((x, y, s, r))
            largest = min(cap, s * instance.m)
            yield from rec(i + 1, committed + s + r, room + largest)
            chosen.pop()
            avail[x] += s
            avail[y] += r

    yield from rec(0, 0, 0)


def _decode(gn: GuessNetwork, values: list[int]) -> Assignment:
    district = [-1] * gn.n
    for idx, v, i in gn.voter_arcs:
        if values[idx] == 1:
            district[v] = i
    return Assignment(tuple(district))


def _check(instance: DistrictingInstance, ignore_graph: bool) -> None:
    if instance.graph is not None and not ignore_graph:
        raise WrongSolverError("the flow solver cannot enforce connectivity")


def decide_fair_districting(
    instance: DistrictingInstance,
    t: int,
    budget: int = DEFAULT_GUESS_BUDGET,
    ignore_graph: bool = False,
) -> tuple[bool, Assignment | None]:
    """Is there an assignment with every district's MoV at most ``t``?

    Returns the verdict and, when true, a witness assignment decoded from
    the first feasible guess.
    """
    _check(instance, ignore_graph)
    max_gap_for_target(t, instance.semantics)
    for guess in iter_guesses(instance, t, budget):
        gn = build_guess_network(instance, guess, t)
        flow = max_flow_with_demands(gn.network)
        if flow is None or flow.value != instance.n:
            continue
        witness = _decode(gn, flow.values)
        verdict = validate(instance, witness, t)
        if not verdict.ok:  # pragma: no cover - would mean a construction bug
            raise AssertionError(f"flow witness failed validation: {verdict.violations}")
        return True, witness
    return False, None


def minimize_fair_districting(
    instance: DistrictingInstance,
    budget: int = DEFAULT_GUESS_BUDGET,
    ignore_graph: bool = False,
) -> tuple[float, Assignment | None]:
    """Smallest feasible target by binary search over ``[1, n]``; ``inf`` if none."""
    _check(instance, ignore_graph)
    hi = max(instance.n, 1)
    ok, witness = decide_fair_districting(instance, hi, budget, ignore_graph)
    if not ok:
        return INF, None
    lo = 1
    while lo < hi:
        mid = (lo + hi) // 2
        ok, w = decide_fair_districting(instance, mid, budget, ignore_graph)
        if ok:
            hi, witness = mid, w
        else:
            lo = mid + 1
    return hi, witness
