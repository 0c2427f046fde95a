"""
Exact solvers on a toy town
===========================

Twelve voters, three districts. First every voter may go anywhere (the
count-vector dynamic program applies), then mobility is restricted and
the guess-and-flow solver takes over.
"""

from fairdistricting import (
    DistrictingInstance,
    decide_fair_districting,
    minimize_fair_districting,
    solve_fair_partitioning,
)
from fairdistricting.model import district_profiles

A, B, C = 0, 1, 2
tops = [A, A, A, A, B, A, B, B, B, C, C, A]
home = [0, 0, 0, 0, 1, 1, 1, 1, 2, 2, 2, 2]

town = DistrictingInstance.from_tops(tops, home, k=3, m=3, s_min=3, s_max=5)
print("initial tallies:", [p.tallies for p in district_profiles(town, town.initial)])

value, witness = solve_fair_partitioning(town)
print("full mobility optimum:", value)
print("  tallies:", [p.tallies for p in district_profiles(town, witness)])

# now the voters of district 0 may only swap with district 1, and the rest
# may only stay home or move one district over
mobility = [{0, 1} if h == 0 else {h, h - 1} for h in home]
restricted = DistrictingInstance.from_tops(tops, home, k=3, m=3, mobility=mobility, s_min=3, s_max=5)
value, witness = minimize_fair_districting(restricted)
print("restricted optimum:", value)
print("  tallies:", [p.tallies for p in district_profiles(restricted, witness)])

for t in (1, 2):
    ok, _ = decide_fair_districting(restricted, t)
    print(f"  every district MoV <= {t}? {ok}")
