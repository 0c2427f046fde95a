"""Fair districting: splitting plurality voters into districts with small margins of victory."""

from .districting import (
    DistrictGuess,
    GuessNetwork,
    build_guess_network,
    decide_fair_districting,
    minimize_fair_districting,
)
from .election import (
    INF,
    MovSemantics,
    VoteProfile,
    Voter,
    margin_of_victory,
    max_gap_for_target,
    plurality_scores,
    winners,
)
from .errors import (
    FairDistrictingError,
    InfeasibleTargetError,
    MalformedInputError,
    ParseError,
    ResourceLimitError,
    UnsupportedInstanceError,
    WrongSolverError,
)
from .greedy import GreedyConfig, Variant, candidate_moves, greedy_solve
from .maxflow import Edge, Flow, FlowNetwork, feasible_circulation, max_flow_with_demands
from .model import (
    Assignment,
    DistrictingInstance,
    Move,
    SolveReport,
    Verdict,
    VoterGraph,
    district_profiles,
    is_connected_district,
    removable_without_disconnect,
    validate,
)
from .partition import (
    decide_fair_partitioning,
    solve_fair_partitioning,
    solve_fair_partitioning_milp,
)

__version__ = "0.1.0"
