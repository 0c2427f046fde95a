"""
Margins of victory
==================

A district's margin of victory (MoV) measures how safe its winner is.
Two readings are supported: ``set-change`` counts ballots that must be
rewritten to change the winner set, ``score-gap`` is the raw distance
between the top two tallies. Both floor at 1, and an empty district
counts as infinitely safe.
"""

from fairdistricting import MovSemantics, VoteProfile, margin_of_victory, winners

# tallies for alternatives (a, b, c)
profiles = [(5, 3, 2), (4, 4, 0), (9, 1, 0), (0, 0, 0)]

print(f"{'tallies':>12} {'winners':>10} {'set-change':>11} {'score-gap':>10}")
for t in profiles:
    prof = VoteProfile(t)
    sc = margin_of_victory(prof, MovSemantics.SET_CHANGE)
    sg = margin_of_victory(prof, MovSemantics.SCORE_GAP)
    print(f"{str(t):>12} {str(sorted(winners(prof))):>10} {sc:>11} {sg:>10}")

# Rewriting one 'a' ballot to 'b' in (5, 3, 2) gives (4, 4, 2): a tie, so
# the winner set changed after a single ballot. The score gap was 2.
