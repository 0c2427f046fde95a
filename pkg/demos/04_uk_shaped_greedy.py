"""
Ten constituencies around Edinburgh
===================================

``data/uk_like_votes.csv`` holds about 5,000 synthetic ballots shaped
like ten Scottish constituencies (four parties). Voters may only move to
the nearest other constituency by centre distance.
"""

from pathlib import Path

from fairdistricting import GreedyConfig, greedy_solve
from fairdistricting.ingest import expand_to_instance, load_aggregate_csv, load_locations_csv

data_dir = Path(__file__).resolve().parent.parent / "data"
data = load_aggregate_csv(data_dir / "uk_like_votes.csv")
locations = load_locations_csv(data_dir / "uk_like_locations.csv")
inst = expand_to_instance(data, locations, closest_q=2)
print(f"{inst.n} voters, {inst.k} districts, parties: {', '.join(inst.alternative_names)}")

for restart in (False, True):
    rep = greedy_solve(inst, GreedyConfig("districting", restart_other_districts=restart))
    print(
        f"restart={restart!s:5}: max MoV {rep.max_mov_before} -> {rep.max_mov}, "
        f"total {rep.total_mov_before} -> {rep.total_mov}, {len(rep.moves)} moves"
    )

# before/after shares in two constituencies (last run)
for name in ("East Lothian", "Edinburgh East"):
    d = inst.district_names.index(name)
    before, after = rep.initial_districts[d].tallies, rep.districts[d].tallies
    print(name)
    for party, b, a in zip(inst.alternative_names, before, after):
        print(f"  {party:>18}: {b:4d} -> {a:4d}")
