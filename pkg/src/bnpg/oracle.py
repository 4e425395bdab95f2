"""Reference brute-force solvers.

Deliberately obvious exhaustive enumeration over all 2^n profiles (bitmask
order, bit i = player i), used as the ground truth the polynomial solvers are
validated against.  No pruning.
"""

from __future__ import annotations

import time
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from typing import Iterable

from .game import Game, Graph, Profile

_TIME_CHECK_STRIDE = 4096


class LimitExceeded(RuntimeError):
    """Raised when an instance is too large (or too slow) for enumeration."""


@dataclass(frozen=True)
class OracleLimits:
    max_players: int = 20
    time_budget: float | None = None  # seconds, checked coarsely


def _guard(game_or_graph, limits: OracleLimits) -> int:
    n = (
        game_or_graph.player_count
        if isinstance(game_or_graph, (Game, Graph))
        else int(game_or_graph)
    )
    if n > limits.max_players:
        raise LimitExceeded(
            f"{n} players exceeds the enumeration limit of {limits.max_players}"
        )
    return n


def _closed_masks(graph: Graph) -> list[int]:
    masks = []
    for v in range(graph.player_count):
        m = 1 << v
        for w in graph.neighbors(v):
            m |= 1 << w
        masks.append(m)
    return masks


def _deadline(limits: OracleLimits) -> float | None:
    return None if limits.time_budget is None else time.monotonic() + limits.time_budget


def _check_deadline(mask: int, deadline: float | None) -> None:
    if deadline is not None and mask % _TIME_CHECK_STRIDE == 0:
        if time.monotonic() > deadline:
            raise LimitExceeded("oracle time budget exhausted")


def enum_psne(game: Game, limits: OracleLimits = OracleLimits()) -> list[Profile]:
    """All pure Nash equilibria, in ascending bitmask order."""
    n = _guard(game, limits)
    closed = _closed_masks(game.graph)
    # Stability depends only on (invests, closed investor count): tabulate it.
    ok_invest: list[list[bool]] = []
    ok_abstain: list[list[bool]] = []
    for v in range(n):
        g, c = game.externality[v], game.cost[v]
        top = len(g) - 1
        ok_invest.append([False] + [g[k] - c >= g[k - 1] for k in range(1, top + 1)])
        ok_abstain.append([g[k] >= g[k + 1] - c for k in range(top)] + [True])
    deadline = _deadline(limits)
    found = []
    for mask in range(1 << n):
        _check_deadline(mask, deadline)
        for v in range(n):
            count = (mask & closed[v]).bit_count()
            if (mask >> v) & 1:
                if not ok_invest[v][count]:
                    break
            elif not ok_abstain[v][count]:
                break
        else:
            found.append(_to_profile(mask, n))
    return found


def _to_profile(mask: int, n: int) -> Profile:
    return Profile(frozenset(v for v in range(n) if (mask >> v) & 1))


def first_psne(
    game: Game, limits: OracleLimits = OracleLimits()
) -> Profile | None:
    """The smallest-bitmask pure Nash equilibrium, or None if there is none."""
    n = _guard(game, limits)
    closed = _closed_masks(game.graph)
    ok_invest: list[list[bool]] = []
    ok_abstain: list[list[bool]] = []
    for v in range(n):
        g, c = game.externality[v], game.cost[v]
        top = len(g) - 1
        ok_invest.append([False] + [g[k] - c >= g[k - 1] for k in range(1, top + 1)])
        ok_abstain.append([g[k] >= g[k + 1] - c for k in range(top)] + [True])
    deadline = _deadline(limits)
    for mask in range(1 << n):
        _check_deadline(mask, deadline)
        for v in range(n):
            count = (mask & closed[v]).bit_count()
            if (mask >> v) & 1:
                if not ok_invest[v][count]:
                    break
            elif not ok_abstain[v][count]:
                break
        else:
            return _to_profile(mask, n)
    return None


def max_usw(
    game: Game, limits: OracleLimits = OracleLimits()
) -> tuple[Profile, Fraction]:
    """A profile maximizing utilitarian welfare (smallest bitmask on ties)."""
    n = _guard(game, limits)
    closed = _closed_masks(game.graph)
    deadline = _deadline(limits)
    best_mask, best = 0, None
    for mask in range(1 << n):
        _check_deadline(mask, deadline)
        total = Fraction(0)
        for v in range(n):
            total += game.externality[v][(mask & closed[v]).bit_count()]
            if (mask >> v) & 1:
                total -= game.cost[v]
        if best is None or total > best:
            best_mask, best = mask, total
    assert best is not None
    return _to_profile(best_mask, n), best


def max_esw(
    game: Game, limits: OracleLimits = OracleLimits()
) -> tuple[Profile, Fraction]:
    """A profile maximizing the minimum payoff (smallest bitmask on ties)."""
    n = _guard(game, limits)
    if n == 0:
        raise ValueError("egalitarian welfare is undefined for a zero-player game")
    closed = _closed_masks(game.graph)
    deadline = _deadline(limits)
    best_mask, best = 0, None
    for mask in range(1 << n):
        _check_deadline(mask, deadline)
        low = None
        for v in range(n):
            p = game.externality[v][(mask & closed[v]).bit_count()]
            if (mask >> v) & 1:
                p -= game.cost[v]
            if low is None or p < low:
                low = p
        if best is None or low > best:
            best_mask, best = mask, low
    assert best is not None
    return _to_profile(best_mask, n), best


def find_3regular_induced(
    graph: Graph, limits: OracleLimits = OracleLimits()
) -> frozenset[int] | None:
    """Smallest-bitmask nonempty vertex set inducing a 3-regular subgraph."""
    n = _guard(graph, limits)
    masks = _closed_masks(graph)
    deadline = _deadline(limits)
    for mask in range(1, 1 << n):
        _check_deadline(mask, deadline)
        for v in range(n):
            if (mask >> v) & 1 and (mask & masks[v]).bit_count() != 4:
                break  # v itself is in the intersection, so 3 neighbors = 4
        else:
            return frozenset(v for v in range(n) if (mask >> v) & 1)
    return None


def find_clique(graph: Graph, k: int) -> frozenset[int] | None:
    """First k-clique in lexicographic vertex order, or None."""
    if k < 0:
        raise ValueError("clique size must be >= 0")
    if k == 0:
        return frozenset()
    for combo in combinations(range(graph.player_count), k):
        if all(graph.has_edge(u, v) for u, v in combinations(combo, 2)):
            return frozenset(combo)
    return None


def find_rb_dominating(
    graph: Graph,
    blue: Iterable[int],
    red: Iterable[int],
    k: int,
) -> frozenset[int] | None:
    """Smallest set of <= k blue vertices dominating every red vertex."""
    if k < 0:
        raise ValueError("budget must be >= 0")
    blues = sorted(set(blue))
    reds = sorted(set(red))
    for size in range(min(k, len(blues)) + 1):
        for combo in combinations(blues, size):
            chosen = set(combo)
            if all(graph.neighbors(r) & chosen for r in reds):
                return frozenset(combo)
    return None
