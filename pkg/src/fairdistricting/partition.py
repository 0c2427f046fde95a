"""Exact Fair Partitioning (every voter may join any district).

Voters are anonymous apart from their top choice, so a district is fully
described by its count vector. ``solve_fair_partitioning`` runs the dynamic
program over count vectors: the best value for splitting vector ``v`` into
``l`` districts is the minimum, over size-feasible sub-vectors ``w <= v``, of
``max(mov(w), best(v - w, l - 1))``.
"""

from __future__ import annotations

import itertools
import math
from functools import lru_cache
from typing import Sequence

import numpy as np

from .election import INF, MovSemantics, margin_of_victory
from .errors import ResourceLimitError, WrongSolverError
from .model import Assignment, DistrictingInstance

DEFAULT_BUDGET = 2_000_000


def _table_size(tallies: Sequence[int], k: int) -> int:
    return k * math.prod(c + 1 for c in tallies)


def _check(instance: DistrictingInstance, ignore_graph: bool) -> None:
    if not instance.has_full_mobility:
        raise WrongSolverError(
            "the partitioning solver needs full mobility; use the districting solver"
        )
    if instance.graph is not None and not ignore_graph:
        raise WrongSolverError("the partitioning solver cannot enforce connectivity")


def optimal_split(
    tallies: Sequence[int],
    k: int,
    s_min: int,
    s_max: int,
    sem: MovSemantics,
    budget: int = DEFAULT_BUDGET,
) -> tuple[float, list[tuple[int, ...]] | None]:
    """Optimal max-MoV over splits of ``tallies`` into ``k`` count vectors.

    Returns ``(value, parts)`` where ``parts[i]`` is the count vector placed
    in district ``i``; ``parts`` is ``None`` when the value is infinite.
    """
    tallies = tuple(int(c) for c in tallies)
    need = _table_size(tallies, k)
    if need > budget:
        raise ResourceLimitError("DP table too large", need, budget)

    @lru_cache(maxsize=None)
    def mov(w: tuple[int, ...]) -> float:
        return margin_of_victory(w, sem)

    def sized(w: tuple[int, ...]) -> bool:
        return s_min <= sum(w) <= s_max

    @lru_cache(maxsize=None)
    def best(v: tuple[int, ...], l: int) -> tuple[float, tuple[int, ...] | None]:
        if l == 1:
            return (mov(v) if sized(v) else INF), v
        size = sum(v)
        # the other l-1 districts must still fit in [s_min, s_max] each
        lo = max(s_min, size - (l - 1) * s_max)
        hi = min(s_max, size - (l - 1) * s_min)
        value, choice = INF, None
        if lo > hi:
            return value, choice
        for w in itertools.product(*(range(c + 1) for c in v)):
            if not lo <= sum(w) <= hi:
                continue
            here = mov(w)
            if here >= value:
                continue
            rest = best(tuple(a - b for a, b in zip(v, w)), l - 1)[0]
            cand = max(here, rest)
            if cand < value:
                value, choice = cand, w
        return value, choice

    value, _ = best(tallies, k)
    if math.isinf(value):
        return INF, None
    parts: list[tuple[int, ...]] = [()] * k
    v = tallies
    # slots are filled from the last district down to the first
    for l in range(k, 1, -1):
        w = best(v, l)[1]
        parts[l - 1] = w
        v = tuple(a - b for a, b in zip(v, w))
    parts[0] = v
    return value, parts


def assign_counts(
    instance: DistrictingInstance, parts: Sequence[Sequence[int]]
) -> Assignment:
    """Turn per-district count vectors into voters, keeping voters home where possible."""
    quota = [list(p) for p in parts]
    district = [-1] * instance.n
    for v, voter in enumerate(instance.voters):
        home = instance.initial[v]
        if quota[home][voter.top] > 0:
            quota[home][voter.top] -= 1
            district[v] = home
    for v, voter in enumerate(instance.voters):
        if district[v] >= 0:
            continue
        for d in range(instance.k):
            if quota[d][voter.top] > 0:
                quota[d][voter.top] -= 1
                district[v] = d
                break
    return Assignment(tuple(district))


def solve_fair_partitioning(
    instance: DistrictingInstance,
    budget: int = DEFAULT_BUDGET,
    ignore_graph: bool = False,
) -> tuple[float, Assignment | None]:
    """Minimum achievable max-MoV under full mobility and size bounds.

    Returns ``(lambda_star, witness)``; ``lambda_star`` is ``inf`` and the
    witness ``None`` when no size-feasible partition exists.
    """
    _check(instance, ignore_graph)
    value, parts = optimal_split(
        instance.tallies().tallies,
        instance.k,
        instance.s_min,
        instance.size_cap,
        instance.semantics,
        budget,
    )
    if parts is None:
        return INF, None
    return value, assign_counts(instance, parts)


def decide_fair_partitioning(
    instance: DistrictingInstance, t: float, budget: int = DEFAULT_BUDGET
) -> bool:
    value, _ = solve_fair_partitioning(instance, budget)
    return value <= t


def solve_fair_partitioning_milp(
    instance: DistrictingInstance,
    ignore_graph: bool = False,
    time_limit: float | None = None,
) -> tuple[float, Assignment | None]:
    """Same optimum as :func:`solve_fair_partitioning`, via a mixed-integer program.

    Meant for instances whose count-vector table is far too large for the
    DP (the synthetic sweeps). Variables: counts ``x[a, i]``, a 0/1 choice of
    two "leading" alternatives per district, and the objective ``T``. Each
    chosen alternative must sit within the allowed gap of every alternative
    in its district, which forces the top two tallies within the gap.
    """
    from scipy.optimize import Bounds, LinearConstraint, milp

    _check(instance, ignore_graph)
    m, k, n = instance.m, instance.k, instance.n
    tallies = instance.tallies().tallies
    lo, hi = max(instance.s_min, 1), instance.size_cap
    if k * lo > n or k * hi < n or m < 2:
        return INF, None
    factor = 2 if instance.semantics is MovSemantics.SET_CHANGE else 1
    nx = m * k
    nv = 2 * nx + 1
    X = lambda a, i: a * k + i  # noqa: E731
    Z = lambda a, i: nx + a * k + i  # noqa: E731
    T = 2 * nx
    big = n + factor * n
    rows, lbs, ubs = [], [], []

    def row(coefs: dict[int, float], lb: float, ub: float) -> None:
        r = np.zeros(nv)
        for j, c in coefs.items():
            r[j] += c
        rows.append(r)
        lbs.append(lb)
        ubs.append(ub)

    for a in range(m):
        row({X(a, i): 1 for i in range(k)}, tallies[a], tallies[a])
    for i in range(k):
        row({X(a, i): 1 for a in range(m)}, lo, hi)
        row({Z(a, i): 1 for a in range(m)}, 2, 2)
        for p in range(m):
            for z in range(m):
                if z == p:
                    continue
                # x[z,i] - x[p,i] - factor*T + big*sel[p,i] <= big
                row({X(z, i): 1, X(p, i): -1, T: -factor, Z(p, i): big}, -np.inf, big)
    c = np.zeros(nv)
    c[T] = 1
    lb = np.zeros(nv)
    ub = np.concatenate([np.repeat(tallies, k).astype(float), np.ones(nx), [n]])
    lb[T] = 1
    res = milp(
        c,
        constraints=LinearConstraint(np.array(rows), lbs, ubs),
        integrality=np.ones(nv),
        bounds=Bounds(lb, ub),
        options={} if time_limit is None else {"time_limit": time_limit},
    )
    if res.x is None:
        return INF, None
    x = np.rint(res.x[:nx]).astype(int).reshape(m, k)
    parts = [tuple(int(x[a, i]) for a in range(m)) for i in range(k)]
    value = max(margin_of_victory(p, instance.semantics) for p in parts)
    return value, assign_counts(instance, parts)
