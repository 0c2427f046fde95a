"""Integral maximum flow with per-edge lower bounds (demands).

Lower bounds are removed with the usual super-source/super-sink shift plus
an uncapacitated ``sink -> source`` return arc; a feasible flow is found by
one max-flow on that auxiliary network, then augmented to a maximum one on
the residual of the original edges. Both max-flows use Dinic's algorithm,
so running time is polynomial and results are integral.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from typing import Iterable, TextIO

from .errors import MalformedInputError, ParseError


@dataclass(frozen=True)
class Edge:
    tail: int
    head: int
    capacity: int
    demand: int = 0


@dataclass
class FlowNetwork:
    n: int
    source: int
    sink: int
    edges: list[Edge] = field(default_factory=list)

    def __post_init__(self):
        if self.source == self.sink:
            raise MalformedInputError("source and sink must differ")
        for node in (self.source, self.sink):
            if not 0 <= node < self.n:
                raise MalformedInputError(f"node {node} outside [0, {self.n})")
        edges, self.edges = self.edges, []
        for e in edges:
            self.add_edge(e.tail, e.head, e.capacity, e.demand)

    def add_edge(self, tail: int, head: int, capacity: int, demand: int = 0) -> int:
        """Append an edge and return its index."""
        if not (0 <= tail < self.n and 0 <= head < self.n):
            raise MalformedInputError(f"edge ({tail}, {head}) outside [0, {self.n})")
        if demand < 0 or capacity < 0:
            raise MalformedInputError("capacity and demand must be nonnegative")
        if demand > capacity:
            raise MalformedInputError(
                f"edge ({tail}, {head}): demand {demand} exceeds capacity {capacity}"
            )
        self.edges.append(Edge(int(tail), int(head), int(capacity), int(demand)))
        return len(self.edges) - 1

    # line format: header "n source sink", then "tail head capacity demand" per edge
    def dump(self, fh: TextIO) -> None:
        fh.write(f"{self.n} {self.source} {self.sink}\n")
        for e in self.edges:
            fh.write(f"{e.tail} {e.head} {e.capacity} {e.demand}\n")

    def dumps(self) -> str:
        import io

        buf = io.StringIO()
        self.dump(buf)
        return buf.getvalue()

    @classmethod
    def loads(cls, text: str) -> "FlowNetwork":
        lines = [
            (i, ln.split("#", 1)[0].split())
            for i, ln in enumerate(text.splitlines(), start=1)
        ]
        lines = [(i, parts) for i, parts in lines if parts]
        if not lines:
            raise ParseError("empty network file")
        i, head = lines[0]
        if len(head) != 3:
            raise ParseError("header must be 'n source sink'", i)
        net = cls(int(head[0]), int(head[1]), int(head[2]))
        for i, parts in lines[1:]:
            if len(parts) not in (3, 4):
                raise ParseError("edge line must be 'tail head capacity [demand]'", i)
            vals = [int(p) for p in parts] + [0] * (4 - len(parts))
            try:
                net.add_edge(*vals)
            except MalformedInputError as exc:
                raise ParseError(str(exc), i) from None
        return net


@dataclass
class Flow:
    values: list[int]
    value: int


class _Dinic:
    """Residual graph stored as parallel arrays; arc ``i ^ 1`` is the reverse of ``i``."""

    def __init__(self, n: int):
        self.n = n
        self.head: list[int] = []
        self.cap: list[int] = []
        self.adj: list[list[int]] = [[] for _ in range(n)]

    def add(self, u: int, v: int, cap: int) -> int:
        idx = len(self.head)
        self.head.append(v)
        self.cap.append(cap)
        self.adj[u].append(idx)
        self.head.append(u)
        self.cap.append(0)
        self.adj[v].append(idx + 1)
        return idx

    def flow_on(self, arc: int) -> int:
        return self.cap[arc ^ 1]

    def _levels(self, s: int, t: int) -> list[int] | None:
        level = [-1] * self.n
        level[s] = 0
        q = deque([s])
        head, cap, adj = self.head, self.cap, self.adj
        while q:
            u = q.popleft()
            for a in adj[u]:
                if cap[a] > 0 and level[head[a]] < 0:
                    level[head[a]] = level[u] + 1
                    q.append(head[a])
        return level if level[t] >= 0 else None

    def max_flow(self, s: int, t: int, limit: int | None = None) -> int:
        total = 0
        head, cap, adj = self.head, self.cap, self.adj
        while limit is None or total < limit:
            level = self._levels(s, t)
            if level is None:
                break
            it = [0] * self.n
            while True:
                # iterative DFS for one blocking path
                want = None if limit is None else limit - total
                path: list[int] = []
                u = s
                while u != t:
                    arcs = adj[u]
                    while it[u] < len(arcs):
                        a = arcs[it[u]]
                        if cap[a] > 0 and level[head[a]] == level[u] + 1:
                            break
                        it[u] += 1
                    if it[u] == len(arcs):
                        if u == s:
                            break
                        level[u] = -1  # dead end
                        a = path.pop()
                        u = head[a ^ 1]
                        it[u] += 1
                        continue
                    a = arcs[it[u]]
                    path.append(a)
                    u = head[a]
                if u != t:
                    break
                push = min(cap[a] for a in path)
                if want is not None:
                    push = min(push, want)
                for a in path:
                    cap[a] -= push
                    cap[a ^ 1] += push
                total += push
                if limit is not None and total >= limit:
                    break
        return total


def _phase_one(net: FlowNetwork) -> tuple[_Dinic, list[int], int] | None:
    n = net.n
    S, T = n, n + 1
    g = _Dinic(n + 2)
    excess = [0] * n
    arcs = []
    for e in net.edges:
        arcs.append(g.add(e.tail, e.head, e.capacity - e.demand))
        excess[e.head] += e.demand
        excess[e.tail] -= e.demand
    big = sum(e.capacity for e in net.edges) + 1
    back = g.add(net.sink, net.source, big)
    need = 0
    for v, x in enumerate(excess):
        if x > 0:
            g.add(S, v, x)
            need += x
        elif x < 0:
            g.add(v, T, -x)
    if g.max_flow(S, T) != need:
        return None
    return g, arcs, g.flow_on(back)


def feasible_circulation(net: FlowNetwork) -> Flow | None:
    """Some flow meeting every demand and capacity, or ``None`` if none exists."""
    res = _phase_one(net)
    if res is None:
        return None
    g, arcs, value = res
    values = [e.demand + g.flow_on(a) for e, a in zip(net.edges, arcs)]
    return Flow(values, value)


def max_flow_with_demands(net: FlowNetwork) -> Flow | None:
    """Maximum-value feasible source->sink flow, or ``None`` when infeasible."""
    start = feasible_circulation(net)
    if start is None:
        return None
    g = _Dinic(net.n)
    arcs = []
    for e, f in zip(net.edges, start.values):
        a = g.add(e.tail, e.head, e.capacity - e.demand)
        # preload the feasible flow (shifted by the demand) into the residual
        g.cap[a] -= f - e.demand
        g.cap[a ^ 1] += f - e.demand
        arcs.append(a)
    extra = g.max_flow(net.source, net.sink)
    values = [e.demand + g.flow_on(a) for e, a in zip(net.edges, arcs)]
    return Flow(values, start.value + extra)


def max_flow(net: FlowNetwork) -> int:
    """Plain max-flow value, demands ignored."""
    g = _Dinic(net.n)
    for e in net.edges:
        g.add(e.tail, e.head, e.capacity)
    return g.max_flow(net.source, net.sink)


def flow_violations(net: FlowNetwork, flow: Flow) -> list[str]:
    """Bound and conservation problems of ``flow`` (empty when valid)."""
    problems = []
    balance = [0] * net.n
    for i, (e, f) in enumerate(zip(net.edges, flow.values)):
        if not e.demand <= f <= e.capacity:
            problems.append(f"edge {i} carries {f} outside [{e.demand}, {e.capacity}]")
        balance[e.tail] -= f
        balance[e.head] += f
    for v, b in enumerate(balance):
        if v not in (net.source, net.sink) and b != 0:
            problems.append(f"node {v} imbalance {b}")
    if -balance[net.source] != flow.value:
        problems.append(f"value {flow.value} != net source outflow {-balance[net.source]}")
    return problems


def edges_from(items: Iterable[tuple[int, int, int, int]]) -> list[Edge]:
    return [Edge(*it) for it in items]
