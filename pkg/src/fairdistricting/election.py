"""Plurality elections and their margin of victory."""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Iterable, Sequence

from .errors import InfeasibleTargetError, MalformedInputError, UnsupportedInstanceError

INF = math.inf


class MovSemantics(enum.Enum):
    """How a top-two tally gap ``d`` is turned into a margin of victory.

    ``SET_CHANGE`` counts ballots that must be rewritten to alter the winner
    set, ``max(1, ceil(d / 2))``. ``SCORE_GAP`` uses the raw gap, ``max(1, d)``.
    """

    SET_CHANGE = "set-change"
    SCORE_GAP = "score-gap"

    @classmethod
    def parse(cls, value: "str | MovSemantics") -> "MovSemantics":
        if isinstance(value, cls):
            return value
        try:
            return cls(str(value).lower().replace("_", "-"))
        except ValueError:
            raise MalformedInputError(f"unknown MoV semantics {value!r}") from None


@dataclass(frozen=True)
class Voter:
    """A voter with a preference order; a 1-tuple is top-choice-only shorthand."""

    id: int
    preference: tuple[int, ...]

    def __post_init__(self):
        if len(self.preference) == 0:
            raise MalformedInputError(f"voter {self.id} has an empty preference")

    @property
    def top(self) -> int:
        return self.preference[0]

    def check(self, m: int) -> None:
        pref = self.preference
        if not 0 <= pref[0] < m:
            raise MalformedInputError(
                f"voter {self.id}: top choice {pref[0]} outside [0, {m})"
            )
        if len(pref) > 1 and sorted(pref) != list(range(m)):
            raise MalformedInputError(
                f"voter {self.id}: preference is not a permutation of [0, {m})"
            )


@dataclass(frozen=True)
class VoteProfile:
    """Plurality tallies over ``m`` alternatives."""

    tallies: tuple[int, ...]

    def __post_init__(self):
        if any(c < 0 for c in self.tallies):
            raise MalformedInputError("tallies must be nonnegative")

    @classmethod
    def from_counts(cls, counts: Iterable[int]) -> "VoteProfile":
        return cls(tuple(int(c) for c in counts))

    @property
    def m(self) -> int:
        return len(self.tallies)

    @property
    def total(self) -> int:
        return sum(self.tallies)

    def __getitem__(self, a: int) -> int:
        return self.tallies[a]


def plurality_scores(voters: Iterable[Voter | int], m: int) -> VoteProfile:
    """Count first places. Accepts Voter objects or bare top-choice ids."""
    counts = [0] * m
    for v in voters:
        top = v.top if isinstance(v, Voter) else int(v)
        if not 0 <= top < m:
            raise MalformedInputError(f"top choice {top} outside [0, {m})")
        counts[top] += 1
    return VoteProfile(tuple(counts))


def winners(profile: VoteProfile) -> frozenset[int]:
    if profile.total == 0:
        return frozenset()
    best = max(profile.tallies)
    return frozenset(a for a, c in enumerate(profile.tallies) if c == best)


def top_gap(tallies: Sequence[int]) -> int:
    """Highest tally minus second-highest tally (zeros included)."""
    first = second = 0
    for c in tallies:
        if c > first:
            first, second = c, first
        elif c > second:
            second = c
    return first - second


def mov_from_gap(d: int, sem: MovSemantics) -> int:
    if sem is MovSemantics.SET_CHANGE:
        return max(1, (d + 1) // 2)
    return max(1, d)


def margin_of_victory(
    profile: VoteProfile | Sequence[int], sem: MovSemantics = MovSemantics.SET_CHANGE
) -> float:
    """Margin of victory of a plurality election; ``inf`` for an empty one.

    The result is an ``int`` for nonempty profiles and ``math.inf`` otherwise.
    """
    tallies = profile.tallies if isinstance(profile, VoteProfile) else tuple(profile)
    if sum(tallies) == 0:
        return INF
    if len(tallies) < 2:
        raise UnsupportedInstanceError(
            "margin of victory needs at least two alternatives"
        )
    return mov_from_gap(top_gap(tallies), sem)


def max_gap_for_target(t: int, sem: MovSemantics) -> int:
    """Largest top-two gap whose margin of victory is still at most ``t``."""
    if t < 1:
        raise InfeasibleTargetError(
            f"target {t} is unreachable: every nonempty district has MoV >= 1"
        )
    return 2 * t if sem is MovSemantics.SET_CHANGE else t
