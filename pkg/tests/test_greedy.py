import math

import pytest

from fairdistricting import (
    DistrictingInstance,
    GreedyConfig,
    MalformedInputError,
    Move,
    Variant,
    VoterGraph,
    candidate_moves,
    greedy_solve,
    validate,
)
from fairdistricting.model import district_movs, replay
from fairdistricting.synthgen import LineModelConfig, generate_line_model, restrict_mobility_to_neighbors

from instances import random_small_instance
from oracles import districting_optimum


def check_trajectory(inst, report, variant):
    """Replay every move: each step legal and (max, total) never worse."""
    judge = inst
    if variant is not Variant.CONNECTED:
        from dataclasses import replace

        judge = replace(inst, graph=None)
    if variant is Variant.PARTITIONING:
        judge = judge.with_full_mobility()
    a = inst.initial
    movs = district_movs(inst, a)
    prev = (max(movs), sum(movs))
    for mv in report.moves:
        a = replay(a, [mv])
        assert validate(judge, a).ok, mv
        movs = district_movs(inst, a)
        cur = (max(movs), sum(movs))
        assert cur <= prev
        prev = cur
    assert a == report.assignment


def test_candidate_moves_rule_readout():
    a, b = 0, 1
    inst = DistrictingInstance.from_tops([a, a, a, b, b], [0, 0, 0, 1, 1], k=2, m=2)
    moves = candidate_moves(inst, inst.initial, "districting")
    out = [m for m in moves if m.source == 0]
    inbound = [m for m in moves if m.target == 0]
    assert sorted(m.voter for m in out) == [0, 1, 2]
    assert sorted(m.voter for m in inbound) == [3, 4]


def test_candidate_moves_connected_excludes_cut_vertices():
    g = VoterGraph.from_edges(5, [(0, 1), (1, 2), (2, 3), (3, 4)])
    inst = DistrictingInstance.from_tops([0, 0, 0, 0, 1], [0, 0, 0, 0, 1], k=2, m=2, graph=g)
    moves = candidate_moves(inst, inst.initial, "connected")
    assert set(moves) == {Move(3, 0, 1), Move(4, 1, 0)}


def test_frozen_mobility_has_no_candidates():
    inst = DistrictingInstance.from_tops([0, 0, 1], [0, 0, 1], k=2, m=2, mobility=[{0}, {0}, {1}])
    assert candidate_moves(inst, inst.initial, "districting") == []
    report = greedy_solve(inst)
    assert report.moves == [] and report.assignment == inst.initial


def test_already_at_floor():
    inst = DistrictingInstance.from_tops([0, 1, 0, 1], [0, 0, 1, 1], k=2, m=2)
    report = greedy_solve(inst)
    assert report.moves == [] and report.max_mov == report.max_mov_before == 1


def test_two_district_example_reaches_brute_force_optimum():
    inst = DistrictingInstance.from_tops(
        [0, 0, 0, 1, 1, 1], [0, 0, 0, 1, 1, 1], k=2, m=2, s_min=1, s_max=5, semantics="score-gap"
    )
    report = greedy_solve(inst, GreedyConfig("partitioning"))
    assert report.max_mov_before == 3
    best = districting_optimum(inst.tops, 2, 2, inst.mobility, 1, 5, "score-gap")
    assert report.max_mov == best == 1
    check_trajectory(inst, report, Variant.PARTITIONING)


def test_connected_requires_graph():
    inst = DistrictingInstance.from_tops([0, 1], [0, 1], k=2, m=2)
    with pytest.raises(MalformedInputError):
        greedy_solve(inst, GreedyConfig("connected"))
    with pytest.raises(MalformedInputError):
        GreedyConfig("sideways")
    with pytest.raises(MalformedInputError):
        GreedyConfig(max_iterations=0)


@pytest.mark.parametrize("variant", list(Variant))
def test_line_model_runs_are_valid_monotone_deterministic(variant):
    for seed in range(6):
        inst = generate_line_model(LineModelConfig(seed=seed, homophily=0.5))
        if variant is Variant.DISTRICTING:
            inst = restrict_mobility_to_neighbors(inst, 2)
        first = greedy_solve(inst, GreedyConfig(variant))
        again = greedy_solve(inst, GreedyConfig(variant))
        assert first.moves == again.moves
        assert first.max_mov <= first.max_mov_before
        check_trajectory(inst, first, variant)


def test_iteration_cap_respected():
    inst = generate_line_model(LineModelConfig(seed=1))
    report = greedy_solve(inst, GreedyConfig("partitioning", max_iterations=3))
    assert len(report.moves) == 3 and report.solver["params"]["iterations"] == 3


def test_restart_flag_never_hurts_objective_validity():
    inst = restrict_mobility_to_neighbors(generate_line_model(LineModelConfig(seed=4)), 1)
    report = greedy_solve(inst, GreedyConfig("districting", restart_other_districts=True))
    check_trajectory(inst, report, Variant.DISTRICTING)


def test_greedy_never_beats_exact_optimum():
    for seed in range(80):
        inst = random_small_instance(seed)
        best = districting_optimum(
            inst.tops, inst.m, inst.k, inst.mobility, inst.s_min, inst.s_max, inst.semantics.value
        )
        report = greedy_solve(inst, GreedyConfig("districting"))
        assert report.max_mov >= best
        check_trajectory(inst, report, Variant.DISTRICTING)
        full = inst.with_full_mobility()
        best_full = districting_optimum(
            full.tops, full.m, full.k, full.mobility, full.s_min, full.s_max, full.semantics.value
        )
        assert greedy_solve(inst, GreedyConfig("partitioning")).max_mov >= best_full


def test_gap_tiebreak_off_still_valid():
    inst = generate_line_model(LineModelConfig(seed=2))
    report = greedy_solve(inst, GreedyConfig("partitioning", gap_tiebreak=False))
    assert report.solver["params"]["gap_tiebreak"] is False
    assert not math.isinf(report.max_mov)
