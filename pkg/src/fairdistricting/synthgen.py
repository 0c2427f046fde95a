"""Instance generators: spatial line model with homophily, and hardness gadgets."""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .election import MovSemantics, Voter
from .errors import MalformedInputError, ParseError, UnsupportedInstanceError
from .model import Assignment, DistrictingInstance, Move, VoterGraph, is_connected_district


# ---------------------------------------------------------------------------
# line model


@dataclass(frozen=True)
class LineModelConfig:
    n_voters: int = 100
    n_candidates: int = 5
    n_districts: int = 5
    homophily: float = 0.0
    p0: float = 0.1
    seed: int = 0
    # districts may deviate this fraction from n/k in size; None = unbounded
    size_slack: float | None = 0.2
    semantics: MovSemantics = MovSemantics.SET_CHANGE
    # separate stream for the graph edges, so positions can be kept fixed
    edge_seed: int | None = None

    def __post_init__(self):
        if not self.n_voters >= self.n_districts >= 1:
            raise MalformedInputError("need n_voters >= n_districts >= 1")
        if self.n_candidates < 2:
            raise MalformedInputError("need at least two candidates")
        if not 0.0 <= self.homophily <= 1.0:
            raise MalformedInputError("homophily must lie in [0, 1]")
        if not 0.0 < self.p0 <= 1.0:
            raise MalformedInputError("p0 must lie in (0, 1]")
        object.__setattr__(self, "semantics", MovSemantics.parse(self.semantics))


def size_bounds(n: int, k: int, slack: float | None) -> tuple[int, int | None]:
    """``[ceil((1-slack) n/k), floor((1+slack) n/k)]``, widened to admit equal blocks."""
    if slack is None:
        return 0, None
    lo = math.ceil((1 - slack) * n / k - 1e-9)
    hi = math.floor((1 + slack) * n / k + 1e-9)
    return min(lo, n // k), max(hi, -(-n // k))


def edge_probability(p0: float, h: float, dist: np.ndarray | float) -> np.ndarray | float:
    return np.clip(p0 * (1.0 - h * dist), 0.0, 1.0)


def generate_line_model(config: LineModelConfig) -> DistrictingInstance:
    """Voters and candidates on [0, 1]; preferences by distance; ER graph with homophily.

    A path through the voters in position order is always added, and the
    initial districts are contiguous position-order blocks, so every initial
    district is connected.
    """
    rng = np.random.default_rng(config.seed)
    N, C, K = config.n_voters, config.n_candidates, config.n_districts
    voter_pos = rng.uniform(0.0, 1.0, size=N)
    cand_pos = rng.uniform(0.0, 1.0, size=C)
    voters = []
    for v in range(N):
        dist = np.abs(cand_pos - voter_pos[v])
        pref = tuple(int(c) for c in np.lexsort((np.arange(C), dist)))
        voters.append(Voter(v, pref))

    erng = rng if config.edge_seed is None else np.random.default_rng(config.edge_seed)
    iu, ju = np.triu_indices(N, k=1)
    prob = edge_probability(config.p0, config.homophily, np.abs(voter_pos[iu] - voter_pos[ju]))
    keep = erng.uniform(size=prob.shape) < prob
    edges = {(int(u), int(w)) for u, w in zip(iu[keep], ju[keep])}
    order = np.argsort(voter_pos, kind="stable")
    for u, w in zip(order[:-1], order[1:]):
        edges.add((min(int(u), int(w)), max(int(u), int(w))))

    initial = [0] * N
    for d, block in enumerate(np.array_split(order, K)):
        for v in block:
            initial[int(v)] = d
    s_min, s_max = size_bounds(N, K, config.size_slack)
    return DistrictingInstance(
        m=C,
        voters=tuple(voters),
        k=K,
        initial=Assignment(tuple(initial)),
        mobility=tuple(frozenset(range(K)) for _ in range(N)),
        s_min=s_min,
        s_max=s_max,
        graph=VoterGraph(N, frozenset(edges)),
        semantics=config.semantics,
        metadata={
            "generator": "line-model",
            "voter_positions": voter_pos.tolist(),
            "candidate_positions": cand_pos.tolist(),
        },
    )


def restrict_mobility_to_neighbors(instance: DistrictingInstance, reach: int = 1) -> DistrictingInstance:
    """Let each voter move only to districts within ``reach`` block indices of home."""
    from dataclasses import replace

    k = instance.k
    mobility = tuple(
        frozenset(d for d in range(k) if abs(d - home) <= reach)
        for home in instance.initial.district_of
    )
    return replace(instance, mobility=mobility)


# ---------------------------------------------------------------------------
# SAT gadget


@dataclass(frozen=True)
class SatFormula:
    """CNF formula; literals are signed 1-based variable indices (DIMACS style)."""

    n_vars: int
    clauses: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        clauses = tuple(tuple(int(l) for l in c) for c in self.clauses)
        object.__setattr__(self, "clauses", clauses)
        for c in clauses:
            if not c:
                raise MalformedInputError("empty clause")
            for lit in c:
                if lit == 0 or abs(lit) > self.n_vars:
                    raise MalformedInputError(f"literal {lit} out of range")

    def satisfied_by(self, truth: Sequence[bool]) -> bool:
        return all(any(truth[abs(l) - 1] == (l > 0) for l in c) for c in self.clauses)

    def satisfying_assignment(self) -> tuple[bool, ...] | None:
        """Brute force over all truth assignments; fine for the tiny gadget formulas."""
        for bits in itertools.product((False, True), repeat=self.n_vars):
            if self.satisfied_by(bits):
                return bits
        return None

    @classmethod
    def parse_dimacs(cls, text: str) -> "SatFormula":
        n_vars = None
        clauses: list[tuple[int, ...]] = []
        pending: list[int] = []
        for lineno, line in enumerate(text.splitlines(), start=1):
            line = line.strip()
            if not line or line.startswith("c") or line.startswith("%"):
                continue
            if line.startswith("p"):
                parts = line.split()
                if len(parts) != 4 or parts[1] != "cnf":
                    raise ParseError("expected 'p cnf <vars> <clauses>'", lineno)
                n_vars = int(parts[2])
                continue
            try:
                nums = [int(x) for x in line.split()]
            except ValueError:
                raise ParseError("non-integer literal", lineno) from None
            for x in nums:
                if x == 0:
                    if not pending:
                        raise ParseError("empty clause", lineno)
                    clauses.append(tuple(pending))
                    pending = []
                else:
                    pending.append(x)
        if pending:
            clauses.append(tuple(pending))
        if n_vars is None:
            n_vars = max((abs(l) for c in clauses for l in c), default=0)
        return cls(n_vars, tuple(clauses))

    def to_dimacs(self) -> str:
        lines = [f"p cnf {self.n_vars} {len(self.clauses)}"]
        lines += [" ".join(str(l) for l in c) + " 0" for c in self.clauses]
        return "\n".join(lines) + "\n"


A, B, C = 0, 1, 2


def sat_district(kind: str, index: int, n_vars: int) -> int:
    """District id of ``X``/``NX`` (negated)/``Z`` for variable ``index`` or ``Y`` for a clause."""
    if kind == "Y":
        return 3 * n_vars + index
    return 3 * index + {"X": 0, "NX": 1, "Z": 2}[kind]


def _literal_district(lit: int, n_vars: int) -> int:
    return sat_district("X" if lit > 0 else "NX", abs(lit) - 1, n_vars)


def reduce_sat_to_fair_districting(phi: SatFormula) -> DistrictingInstance:
    """Three-alternative gadget instance that is feasible at target 2 iff ``phi`` is satisfiable.

    With ``M`` clauses: literal districts hold ``(M+2, M, M-1)`` votes for
    ``(a, b, c)``, each variable district ``Z`` holds ``(M+2, 0, M+1)``, each
    clause district ``Y`` holds ``(M+3, M, 0)``. One ``c`` voter per ``Z`` may
    move to either literal district of its variable; ``b`` voters of a
    literal district may move to the clause districts containing the literal.
    Everybody else is fixed. MoV is read as the raw score gap.
    """
    n, M = phi.n_vars, len(phi.clauses)
    if n == 0 or M == 0:
        raise MalformedInputError("formula needs at least one variable and one clause")
    k = 3 * n + M
    occurs: dict[int, list[int]] = {}
    for j, clause in enumerate(phi.clauses):
        for lit in clause:
            occurs.setdefault(_literal_district(lit, n), [])
            if sat_district("Y", j, n) not in occurs[_literal_district(lit, n)]:
                occurs[_literal_district(lit, n)].append(sat_district("Y", j, n))
    tops: list[int] = []
    initial: list[int] = []
    mobility: list[frozenset] = []

    def add(top: int, home: int, allowed: Iterable[int] = ()) -> None:
        tops.append(top)
        initial.append(home)
        mobility.append(frozenset({home, *allowed}))

    for i in range(n):
        for kind in ("X", "NX"):
            d = sat_district(kind, i, n)
            for _ in range(M + 2):
                add(A, d)
            for _ in range(M):
                add(B, d, occurs.get(d, ()))
            for _ in range(M - 1):
                add(C, d)
        z = sat_district("Z", i, n)
        for _ in range(M + 2):
            add(A, z)
        add(C, z, (sat_district("X", i, n), sat_district("NX", i, n)))
        for _ in range(M):
            add(C, z)
    for j in range(M):
        y = sat_district("Y", j, n)
        for _ in range(M + 3):
            add(A, y)
        for _ in range(M):
            add(B, y)

    names = [""] * k
    for i in range(n):
        names[sat_district("X", i, n)] = f"X{i + 1}"
        names[sat_district("NX", i, n)] = f"~X{i + 1}"
        names[sat_district("Z", i, n)] = f"Z{i + 1}"
    for j in range(M):
        names[sat_district("Y", j, n)] = f"Y{j + 1}"
    return DistrictingInstance.from_tops(
        tops,
        initial,
        k=k,
        m=3,
        mobility=mobility,
        s_min=0,
        s_max=None,
        semantics=MovSemantics.SCORE_GAP,
        target=2,
        alternative_names=("a", "b", "c"),
        district_names=tuple(names),
        metadata={"generator": "sat-gadget", "formula": phi.to_dimacs()},
    )


def sat_witness_moves(
    instance: DistrictingInstance, phi: SatFormula, truth: Sequence[bool]
) -> list[Move]:
    """Moves turning a satisfying assignment into a feasible districting at target 2.

    Each variable's movable ``c`` voter joins the literal district made true;
    each clause then receives one ``b`` voter from a true literal's district.
    """
    if not phi.satisfied_by(truth):
        raise MalformedInputError("truth assignment does not satisfy the formula")
    n = phi.n_vars
    by_home: dict[int, list[int]] = {}
    for v, voter in enumerate(instance.voters):
        by_home.setdefault(instance.initial[v], []).append(v)
    moves: list[Move] = []
    for i in range(n):
        z = sat_district("Z", i, n)
        mover = next(v for v in by_home[z] if len(instance.mobility[v]) == 3)
        dest = sat_district("X" if truth[i] else "NX", i, n)
        moves.append(Move(mover, z, dest))
    spare = {
        d: [v for v in vs if instance.voters[v].top == B]
        for d, vs in by_home.items()
    }
    for j, clause in enumerate(phi.clauses):
        lit = next(l for l in clause if truth[abs(l) - 1] == (l > 0))
        src = _literal_district(lit, n)
        moves.append(Move(spare[src].pop(0), src, sat_district("Y", j, n)))
    return moves


# ---------------------------------------------------------------------------
# 2-disjoint connected partitioning gadget


@dataclass(frozen=True)
class TwoDcpInstance:
    """Connected graph on ``0..n-1`` with disjoint nonempty terminal sets."""

    n: int
    edges: tuple[tuple[int, int], ...]
    z1: frozenset
    z2: frozenset
    graph: VoterGraph = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "z1", frozenset(self.z1))
        object.__setattr__(self, "z2", frozenset(self.z2))
        object.__setattr__(self, "edges", tuple(tuple(e) for e in self.edges))
        g = VoterGraph.from_edges(self.n, self.edges)
        object.__setattr__(self, "graph", g)
        if not self.z1 or not self.z2 or self.z1 & self.z2:
            raise MalformedInputError("terminal sets must be nonempty and disjoint")
        if any(not 0 <= z < self.n for z in self.z1 | self.z2):
            raise MalformedInputError("terminal outside the vertex range")
        if not is_connected_district(g, range(self.n)):
            raise MalformedInputError("2DCP graph must be connected")

    @classmethod
    def from_dict(cls, data: dict) -> "TwoDcpInstance":
        return cls(int(data["n"]), tuple(tuple(e) for e in data["edges"]), data["z1"], data["z2"])

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "edges": [list(e) for e in self.edges],
            "z1": sorted(self.z1),
            "z2": sorted(self.z2),
        }


def reduce_2dcp_to_fair_connected_districting(inst: TwoDcpInstance) -> DistrictingInstance:
    """Two-alternative, two-district connected instance feasible at target 1 iff ``inst`` is a yes-instance.

    Voter ids: ``v_u`` is ``u``; then one ``w_u`` per non-terminal-2 vertex
    (pendant to ``v_u``); then the path ``d_1..d_{|Z2|+1}`` hanging off the
    smallest vertex of ``Z2``. ``v`` voters prefer ``x``, the rest ``y``.
    """
    for z in sorted(inst.z2):
        if len(inst.graph.adjacency[z]) != 2:
            raise UnsupportedInstanceError(
                f"vertex {z} of the second terminal set has degree "
                f"{len(inst.graph.adjacency[z])}, expected 2"
            )
    X, Y = 0, 1
    n = inst.n
    prefs: list[tuple[int, int]] = [(X, Y)] * n
    edges = set(inst.graph.edges)
    w_of = {}
    for u in range(n):
        if u not in inst.z2:
            w_of[u] = len(prefs)
            prefs.append((Y, X))
            edges.add((u, w_of[u]))
    path = []
    for _ in range(len(inst.z2) + 1):
        path.append(len(prefs))
        prefs.append((Y, X))
    for a, b in zip(path, path[1:]):
        edges.add((a, b))
    anchor = min(inst.z2)
    edges.add((anchor, path[0]))
    total = len(prefs)
    initial = [0] * total
    mobility = [frozenset({0, 1})] * total
    for d in path:
        initial[d] = 1
        mobility[d] = frozenset({1})
    for z in inst.z1:
        mobility[z] = frozenset({0})
    voters = tuple(Voter(i, p) for i, p in enumerate(prefs))
    return DistrictingInstance(
        m=2,
        voters=voters,
        k=2,
        initial=Assignment(tuple(initial)),
        mobility=tuple(mobility),
        s_min=0,
        s_max=None,
        graph=VoterGraph(total, frozenset(edges)),
        semantics=MovSemantics.SCORE_GAP,
        target=1,
        alternative_names=("x", "y"),
        district_names=("H1", "H2"),
        metadata={"generator": "2dcp-gadget", "source": inst.to_dict()},
    )
