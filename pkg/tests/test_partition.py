import math
import random

import pytest
from hypothesis import given, settings, strategies as st

from fairdistricting import (
    DistrictingInstance,
    MovSemantics,
    ResourceLimitError,
    WrongSolverError,
    decide_fair_partitioning,
    solve_fair_partitioning,
    solve_fair_partitioning_milp,
    validate,
)
from fairdistricting.model import district_movs
from fairdistricting.partition import optimal_split

from oracles import partition_optimum


def inst_from_tallies(tallies, k, s_min=0, s_max=None, sem="set-change", initial=None):
    tops = [a for a, c in enumerate(tallies) for _ in range(c)]
    if initial is None:
        initial = balanced_initial(len(tops), k, s_min, s_max)
    return DistrictingInstance.from_tops(
        tops, initial, k=k, m=len(tallies), s_min=s_min, s_max=s_max, semantics=sem
    )


def balanced_initial(n, k, s_min, s_max):
    cap = n if s_max is None else s_max
    sizes = [s_min] * k
    left = n - s_min * k
    for d in range(k):
        take = min(cap - sizes[d], left)
        sizes[d] += take
        left -= take
    if left or any(s > cap for s in sizes) or left < 0:
        return None
    return [d for d in range(k) for _ in range(sizes[d])]


def test_examples():
    inst = inst_from_tallies((2, 2), 2, 1, 3)
    value, witness = solve_fair_partitioning(inst)
    assert value == 1
    assert validate(inst, witness, 1).ok
    assert decide_fair_partitioning(inst, 1)
    assert not decide_fair_partitioning(inst, 0)

    inst = inst_from_tallies((4, 0), 2, 1, 3, sem="score-gap")
    value, witness = solve_fair_partitioning(inst)
    assert value == 2
    assert sorted(district_movs(inst, witness)) == [2, 2]


def test_arithmetic_infeasibility():
    assert optimal_split((4, 0), 2, 3, 3, MovSemantics.SET_CHANGE) == (math.inf, None)


def test_rejects_restricted_mobility_and_graphs():
    inst = DistrictingInstance.from_tops([0, 1], [0, 1], k=2, m=2, mobility=[{0}, {0, 1}])
    with pytest.raises(WrongSolverError):
        solve_fair_partitioning(inst)


def test_budget_guard():
    inst = inst_from_tallies((30, 30, 30), 3)
    with pytest.raises(ResourceLimitError) as err:
        solve_fair_partitioning(inst, budget=1000)
    assert err.value.required > err.value.budget == 1000


def test_base_case_single_district():
    for tallies in [(3, 1), (0, 0), (2, 2, 1)]:
        for sem in MovSemantics:
            for lo, hi in [(0, 10), (5, 5), (0, 3)]:
                expected = math.inf
                if lo <= sum(tallies) <= hi:
                    from fairdistricting import margin_of_victory

                    expected = margin_of_victory(tallies, sem)
                assert optimal_split(tallies, 1, lo, hi, sem)[0] == expected


def test_random_instances_match_oracle():
    rng = random.Random(42)
    for i in range(200):
        m = rng.randint(2, 3)
        k = rng.randint(1, 3)
        n = rng.randint(0, 10)
        tops = [rng.randrange(m) for _ in range(n)]
        tallies = tuple(tops.count(a) for a in range(m))
        sem = ("set-change", "score-gap")[i % 2]
        initial = [rng.randrange(k) for _ in range(n)]
        sizes = [initial.count(d) for d in range(k)]
        s_min = rng.randint(0, min(sizes))
        s_max = rng.randint(max(sizes), max(n, 1))
        inst = DistrictingInstance.from_tops(tops, initial, k=k, m=m, s_min=s_min, s_max=s_max, semantics=sem)
        value, witness = solve_fair_partitioning(inst)
        assert value == partition_optimum(tallies, k, s_min, s_max, sem)
        if witness is not None:
            assert max(district_movs(inst, witness)) == value
            assert validate(inst, witness, value if value < math.inf else None).ok


@settings(max_examples=40, deadline=None)
@given(st.lists(st.integers(0, 2), min_size=1, max_size=9), st.randoms(use_true_random=False))
def test_value_depends_only_on_tallies(tops, rnd):
    shuffled = list(tops)
    rnd.shuffle(shuffled)
    k = 2
    init = [v % k for v in range(len(tops))]
    a = DistrictingInstance.from_tops(tops, init, k=k, m=3)
    b = DistrictingInstance.from_tops(shuffled, init, k=k, m=3)
    assert solve_fair_partitioning(a)[0] == solve_fair_partitioning(b)[0]


def test_witness_is_deterministic_and_keeps_voters_home():
    inst = inst_from_tallies((3, 3), 2, 1, 5, initial=[0, 0, 0, 1, 1, 1])
    first = solve_fair_partitioning(inst)
    assert first == solve_fair_partitioning(inst)
    # only as many voters move as the count vectors require
    moved = sum(1 for a, b in zip(inst.initial.district_of, first[1].district_of) if a != b)
    assert moved <= 2


def test_milp_matches_dp():
    rng = random.Random(5)
    for i in range(25):
        m = rng.randint(2, 4)
        k = rng.randint(2, 3)
        n = rng.randint(k, 14)
        tops = [rng.randrange(m) for _ in range(n)]
        initial = [d % k for d in range(n)]
        sizes = [initial.count(d) for d in range(k)]
        s_min = rng.randint(1, min(sizes))
        s_max = rng.randint(max(sizes), n)
        sem = ("set-change", "score-gap")[i % 2]
        inst = DistrictingInstance.from_tops(tops, initial, k=k, m=m, s_min=s_min, s_max=s_max, semantics=sem)
        dp, _ = solve_fair_partitioning(inst)
        milp, witness = solve_fair_partitioning_milp(inst)
        assert milp == dp, (i, tops, k, s_min, s_max, sem)
        assert max(district_movs(inst, witness)) == milp
