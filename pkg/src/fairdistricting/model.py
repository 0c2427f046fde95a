"""Districting instances, assignments, validation and solve reports."""

from __future__ import annotations

import json
import math
from collections import deque
from dataclasses import dataclass, field
from typing import Any, Iterable, Sequence

from .election import (
    INF,
    MovSemantics,
    VoteProfile,
    Voter,
    margin_of_victory,
    winners,
)
from .errors import MalformedInputError


@dataclass(frozen=True)
class VoterGraph:
    """Undirected simple graph on voter ids ``0..n-1``."""

    n: int
    edges: frozenset
    adjacency: tuple = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        norm = set()
        for u, v in self.edges:
            u, v = int(u), int(v)
            if u == v:
                raise MalformedInputError(f"self-loop on voter {u}")
            if not (0 <= u < self.n and 0 <= v < self.n):
                raise MalformedInputError(f"edge ({u}, {v}) outside [0, {self.n})")
            norm.add((min(u, v), max(u, v)))
        adj: list[set[int]] = [set() for _ in range(self.n)]
        for u, v in norm:
            adj[u].add(v)
            adj[v].add(u)
        object.__setattr__(self, "edges", frozenset(norm))
        object.__setattr__(self, "adjacency", tuple(frozenset(s) for s in adj))

    @classmethod
    def from_edges(cls, n: int, edges: Iterable[Sequence[int]]) -> "VoterGraph":
        edges = [tuple(e) for e in edges]
        keys = [(min(u, v), max(u, v)) for u, v in edges]
        if len(set(keys)) != len(keys):
            raise MalformedInputError("duplicate edge in voter graph")
        return cls(n, frozenset(keys))

    def neighbors(self, v: int) -> frozenset:
        return self.adjacency[v]


def is_connected_district(graph: VoterGraph, members: Iterable[int]) -> bool:
    """True iff ``members`` induces a connected subgraph; vacuously true when empty."""
    members = set(members)
    if not members:
        return True
    start = next(iter(members))
    seen = {start}
    queue = deque([start])
    while queue:
        u = queue.popleft()
        for w in graph.adjacency[u]:
            if w in members and w not in seen:
                seen.add(w)
                queue.append(w)
    return len(seen) == len(members)


def removable_without_disconnect(graph: VoterGraph, members: Iterable[int], v: int) -> bool:
    rest = set(members)
    rest.discard(v)
    return is_connected_district(graph, rest)


@dataclass(frozen=True)
class Assignment:
    """Total map voter id -> district id."""

    district_of: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "district_of", tuple(int(d) for d in self.district_of))

    def __len__(self) -> int:
        return len(self.district_of)

    def __getitem__(self, v: int) -> int:
        return self.district_of[v]

    def members(self, k: int) -> list[list[int]]:
        out: list[list[int]] = [[] for _ in range(k)]
        for v, d in enumerate(self.district_of):
            out[d].append(v)
        return out

    def sizes(self, k: int) -> list[int]:
        out = [0] * k
        for d in self.district_of:
            out[d] += 1
        return out

    def moved(self, voter: int, to: int) -> "Assignment":
        d = list(self.district_of)
        d[voter] = to
        return Assignment(tuple(d))


@dataclass(frozen=True)
class DistrictingInstance:
    """A Fair Districting instance.

    ``s_max=None`` means no upper size bound. ``target`` is an optional
    recorded decision threshold (reductions carry one).
    """

    m: int
    voters: tuple[Voter, ...]
    k: int
    initial: Assignment
    mobility: tuple[frozenset, ...]
    s_min: int = 0
    s_max: int | None = None
    graph: VoterGraph | None = None
    semantics: MovSemantics = MovSemantics.SET_CHANGE
    target: int | None = None
    alternative_names: tuple[str, ...] | None = None
    district_names: tuple[str, ...] | None = None
    metadata: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        if not isinstance(self.initial, Assignment):
            object.__setattr__(self, "initial", Assignment(tuple(self.initial)))
        object.__setattr__(self, "voters", tuple(self.voters))
        object.__setattr__(
            self, "mobility", tuple(frozenset(int(d) for d in s) for s in self.mobility)
        )
        object.__setattr__(self, "semantics", MovSemantics.parse(self.semantics))
        n = len(self.voters)
        if self.m < 1 or self.k < 1:
            raise MalformedInputError("need m >= 1 alternatives and k >= 1 districts")
        if len(self.initial) != n or len(self.mobility) != n:
            raise MalformedInputError("initial assignment and mobility must cover every voter")
        for i, v in enumerate(self.voters):
            if v.id != i:
                raise MalformedInputError(f"voter ids must be dense; found {v.id} at {i}")
            v.check(self.m)
        for v, (home, allowed) in enumerate(zip(self.initial.district_of, self.mobility)):
            if not 0 <= home < self.k:
                raise MalformedInputError(f"voter {v} initially in unknown district {home}")
            if not allowed or any(not 0 <= d < self.k for d in allowed):
                raise MalformedInputError(f"voter {v} has an empty or out-of-range mobility set")
            if home not in allowed:
                raise MalformedInputError(f"voter {v}'s initial district is not in its mobility set")
        if self.s_min < 0 or (self.s_max is not None and self.s_max < self.s_min):
            raise MalformedInputError(f"bad size bounds [{self.s_min}, {self.s_max}]")
        for d, size in enumerate(self.initial.sizes(self.k)):
            if size < self.s_min or size > self.size_cap:
                raise MalformedInputError(
                    f"initial district {d} has size {size} outside [{self.s_min}, {self.s_max}]"
                )
        if self.graph is not None:
            if self.graph.n != n:
                raise MalformedInputError("voter graph size differs from voter count")
            for d, members in enumerate(self.initial.members(self.k)):
                if not is_connected_district(self.graph, members):
                    raise MalformedInputError(f"initial district {d} is not connected")

    @classmethod
    def from_tops(
        cls,
        tops: Sequence[int],
        initial: Sequence[int],
        k: int,
        m: int,
        mobility: Sequence[Iterable[int]] | None = None,
        **kwargs: Any,
    ) -> "DistrictingInstance":
        """Build an instance from top choices only; ``mobility=None`` means full mobility."""
        voters = tuple(Voter(i, (int(t),)) for i, t in enumerate(tops))
        if mobility is None:
            mobility = [range(k)] * len(voters)
        return cls(
            m=m,
            voters=voters,
            k=k,
            initial=Assignment(tuple(initial)),
            mobility=tuple(frozenset(s) for s in mobility),
            **kwargs,
        )

    @property
    def n(self) -> int:
        return len(self.voters)

    @property
    def tops(self) -> tuple[int, ...]:
        return tuple(v.top for v in self.voters)

    @property
    def size_cap(self) -> int:
        """Effective upper size bound (``n`` when unbounded)."""
        return self.n if self.s_max is None else min(self.s_max, self.n)

    @property
    def has_full_mobility(self) -> bool:
        return all(len(s) == self.k for s in self.mobility)

    def tallies(self) -> VoteProfile:
        counts = [0] * self.m
        for v in self.voters:
            counts[v.top] += 1
        return VoteProfile(tuple(counts))

    def with_full_mobility(self) -> "DistrictingInstance":
        from dataclasses import replace

        return replace(self, mobility=tuple(frozenset(range(self.k)) for _ in self.voters))


def district_profiles(instance: DistrictingInstance, a: Assignment) -> list[VoteProfile]:
    counts = [[0] * instance.m for _ in range(instance.k)]
    for v, d in zip(instance.voters, a.district_of):
        counts[d][v.top] += 1
    return [VoteProfile(tuple(c)) for c in counts]


def district_movs(instance: DistrictingInstance, a: Assignment) -> list[float]:
    return [margin_of_victory(p, instance.semantics) for p in district_profiles(instance, a)]


@dataclass(frozen=True)
class Violation:
    kind: str  # "length" | "mobility" | "size" | "mov" | "connectivity"
    message: str
    voter: int | None = None
    district: int | None = None


@dataclass
class Verdict:
    violations: list[Violation]

    @property
    def ok(self) -> bool:
        return not self.violations

    def __bool__(self) -> bool:
        return self.ok


def validate(
    instance: DistrictingInstance, a: Assignment, target: float | None = None
) -> Verdict:
    """Check an assignment against mobility, size, MoV target and connectivity.

    Every violation is reported; nothing is raised.
    """
    out: list[Violation] = []
    if len(a) != instance.n:
        out.append(Violation("length", f"assignment covers {len(a)} of {instance.n} voters"))
        return Verdict(out)
    for v, d in enumerate(a.district_of):
        if not 0 <= d < instance.k:
            out.append(Violation("mobility", f"voter {v} in unknown district {d}", voter=v, district=d))
        elif d not in instance.mobility[v]:
            out.append(Violation("mobility", f"voter {v} may not join district {d}", voter=v, district=d))
    if out:
        return Verdict(out)
    members = a.members(instance.k)
    for d, mem in enumerate(members):
        if not instance.s_min <= len(mem) <= instance.size_cap:
            out.append(
                Violation(
                    "size",
                    f"district {d} has {len(mem)} voters, outside [{instance.s_min}, {instance.s_max}]",
                    district=d,
                )
            )
    if target is not None:
        for d, mov in enumerate(district_movs(instance, a)):
            if mov > target:
                shown = "inf" if math.isinf(mov) else mov
                out.append(Violation("mov", f"district {d} MoV {shown} > {target}", district=d))
    if instance.graph is not None:
        for d, mem in enumerate(members):
            if not is_connected_district(instance.graph, mem):
                out.append(Violation("connectivity", f"district {d} is disconnected", district=d))
    return Verdict(out)


# ---------------------------------------------------------------------------
# reports


def _enc(x: float) -> int | None:
    return None if math.isinf(x) else int(x)


def _dec(x: int | None) -> float:
    return INF if x is None else int(x)


@dataclass(frozen=True)
class Move:
    voter: int
    source: int
    target: int

    def as_list(self) -> list[int]:
        return [self.voter, self.source, self.target]


@dataclass
class DistrictResult:
    id: int
    winners: list[int]
    tallies: list[int]
    mov: float


@dataclass
class SolveReport:
    """Per-district outcome of an assignment plus solver metadata.

    MoV values of ``inf`` serialize as JSON ``null``.
    """

    districts: list[DistrictResult]
    assignment: Assignment
    moves: list[Move]
    solver: dict
    initial_districts: list[DistrictResult]
    feasible: bool | None = None
    optimum: float | None = None

    @property
    def max_mov(self) -> float:
        return max((d.mov for d in self.districts), default=0)

    @property
    def total_mov(self) -> float:
        return sum(d.mov for d in self.districts)

    @property
    def max_mov_before(self) -> float:
        return max((d.mov for d in self.initial_districts), default=0)

    @property
    def total_mov_before(self) -> float:
        return sum(d.mov for d in self.initial_districts)

    def to_dict(self) -> dict:
        def dist(d: DistrictResult) -> dict:
            return {"id": d.id, "winners": d.winners, "tallies": d.tallies, "mov": _enc(d.mov)}

        out = {
            "districts": [dist(d) for d in self.districts],
            "max_mov": _enc(self.max_mov),
            "total_mov": _enc(self.total_mov),
            "max_mov_before": _enc(self.max_mov_before),
            "max_mov_after": _enc(self.max_mov),
            "total_mov_before": _enc(self.total_mov_before),
            "total_mov_after": _enc(self.total_mov),
            "districts_before": [dist(d) for d in self.initial_districts],
            "moves": [m.as_list() for m in self.moves],
            "assignment": list(self.assignment.district_of),
            "solver": self.solver,
        }
        if self.feasible is not None:
            out["feasible"] = self.feasible
        if self.optimum is not None:
            out["optimum"] = _enc(self.optimum)
        return out

    def to_json(self, **kwargs: Any) -> str:
        return json.dumps(self.to_dict(), **kwargs)

    @classmethod
    def from_dict(cls, data: dict) -> "SolveReport":
        def dist(d: dict) -> DistrictResult:
            return DistrictResult(d["id"], list(d["winners"]), list(d["tallies"]), _dec(d["mov"]))

        return cls(
            districts=[dist(d) for d in data["districts"]],
            assignment=Assignment(tuple(data["assignment"])),
            moves=[Move(*m) for m in data["moves"]],
            solver=data["solver"],
            initial_districts=[dist(d) for d in data.get("districts_before", [])],
            feasible=data.get("feasible"),
            optimum=_dec(data["optimum"]) if "optimum" in data else None,
        )


def _results(instance: DistrictingInstance, a: Assignment) -> list[DistrictResult]:
    out = []
    for d, prof in enumerate(district_profiles(instance, a)):
        out.append(
            DistrictResult(
                id=d,
                winners=sorted(winners(prof)),
                tallies=list(prof.tallies),
                mov=margin_of_victory(prof, instance.semantics),
            )
        )
    return out


def diff_moves(initial: Assignment, final: Assignment) -> list[Move]:
    return [
        Move(v, s, t)
        for v, (s, t) in enumerate(zip(initial.district_of, final.district_of))
        if s != t
    ]


def replay(initial: Assignment, moves: Iterable[Move]) -> Assignment:
    d = list(initial.district_of)
    for mv in moves:
        if d[mv.voter] != mv.source:
            raise MalformedInputError(f"move {mv} does not start where voter {mv.voter} is")
        d[mv.voter] = mv.target
    return Assignment(tuple(d))


def make_report(
    instance: DistrictingInstance,
    assignment: Assignment,
    solver: str,
    params: dict | None = None,
    wall_time: float = 0.0,
    moves: list[Move] | None = None,
    feasible: bool | None = None,
    optimum: float | None = None,
) -> SolveReport:
    if moves is None:
        moves = diff_moves(instance.initial, assignment)
    return SolveReport(
        districts=_results(instance, assignment),
        assignment=assignment,
        moves=moves,
        solver={"name": solver, "params": dict(params or {}), "wall_time": wall_time},
        initial_districts=_results(instance, instance.initial),
        feasible=feasible,
        optimum=optimum,
    )
