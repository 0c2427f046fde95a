"""
Hardness gadgets as test instances
==================================

The SAT gadget turns a CNF formula into a districting instance that can
reach MoV 2 everywhere exactly when the formula is satisfiable. The 2DCP
gadget does the same for splitting a graph into two connected parts
around two terminal sets, at MoV 1 with connectivity enforced.
"""

from fairdistricting import validate
from fairdistricting.model import district_movs, replay
from fairdistricting.synthgen import (
    SatFormula,
    TwoDcpInstance,
    reduce_2dcp_to_fair_connected_districting,
    reduce_sat_to_fair_districting,
    sat_witness_moves,
)

phi = SatFormula(2, ((1, 2), (-1, 2)))
inst = reduce_sat_to_fair_districting(phi)
print(f"formula {phi.clauses}: {inst.n} voters in districts {inst.district_names}")
print("initial MoVs:", district_movs(inst, inst.initial))

truth = phi.satisfying_assignment()
moves = sat_witness_moves(inst, phi, truth)
final = replay(inst.initial, moves)
print(f"truth {truth} -> {len(moves)} moves -> MoVs {district_movs(inst, final)}")
print("valid at target 2:", validate(inst, final, 2).ok)

square = TwoDcpInstance(4, ((0, 1), (1, 2), (2, 3), (3, 0)), {0}, {2})
gadget = reduce_2dcp_to_fair_connected_districting(square)
print(f"\n4-cycle gadget: {gadget.n} voters, {len(gadget.graph.edges)} edges, target {gadget.target}")
