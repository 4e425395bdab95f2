"""Exact solvers for binary networked public goods games.

Pure-strategy Nash equilibria and maximum utilitarian/egalitarian welfare,
computed exactly (rational arithmetic) by brute force, by dynamic programming
over forests of critical cliques, or by dynamic programming over nice tree
decompositions.
"""

from .game import (
    Game,
    Graph,
    Profile,
    SubgameView,
    deviation_gain,
    esw,
    induce_subgame,
    is_psne,
    is_stable,
    payoff,
    payoff_levels,
    usw,
)
from .report import SolveReport, SolveStatus

__all__ = [
    "Game",
    "Graph",
    "Profile",
    "SubgameView",
    "SolveReport",
    "SolveStatus",
    "deviation_gain",
    "esw",
    "induce_subgame",
    "is_psne",
    "is_stable",
    "payoff",
    "payoff_levels",
    "usw",
]
