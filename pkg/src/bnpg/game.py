"""Core model: binary networked public goods games with exact rational payoffs.

Players sit on an undirected graph and either invest (paying their cost) or
abstain.  A player's payoff is an externality function of the number of
investors in its *closed* neighborhood, minus the cost if it invests itself.
All quantities are `fractions.Fraction`; nothing ever passes through floats.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable

Rational = Fraction | int | str


def as_fraction(value: Rational) -> Fraction:
    """Coerce ints, exact decimal strings ("1.5") or ratio strings ("3/4")."""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, (int, str)):
        return Fraction(value)
    raise TypeError(f"not an exact rational: {value!r}")


@dataclass(frozen=True)
class Graph:
    """Immutable undirected graph on players 0..player_count-1.

    Edges are canonical (u < v) pairs; self-loops and duplicates are rejected.
    """

    player_count: int
    edges: frozenset[tuple[int, int]]
    _adj: tuple[frozenset[int], ...] = field(repr=False, compare=False, default=())

    def __post_init__(self) -> None:
        if self.player_count < 0:
            raise ValueError("player_count must be >= 0")
        adj: list[set[int]] = [set() for _ in range(self.player_count)]
        for u, v in self.edges:
            if not (0 <= u < self.player_count and 0 <= v < self.player_count):
                raise ValueError(f"edge ({u}, {v}) out of range")
            if u == v:
                raise ValueError(f"self-loop at {u}")
            if u > v:
                raise ValueError(f"edge ({u}, {v}) not in canonical (u < v) order")
            adj[u].add(v)
            adj[v].add(u)
        object.__setattr__(self, "_adj", tuple(frozenset(a) for a in adj))

    @classmethod
    def from_edges(cls, player_count: int, edges: Iterable[tuple[int, int]]) -> Graph:
        canon = set()
        for u, v in edges:
            if u == v:
                raise ValueError(f"self-loop at {u}")
            edge = (u, v) if u < v else (v, u)
            if edge in canon:
                raise ValueError(f"duplicate edge {edge}")
            canon.add(edge)
        return cls(player_count, frozenset(canon))

    def neighbors(self, v: int) -> frozenset[int]:
        return self._adj[v]

    def closed_neighbors(self, v: int) -> frozenset[int]:
        return self._adj[v] | {v}

    def degree(self, v: int) -> int:
        return len(self._adj[v])

    def closed_degree(self, v: int) -> int:
        return len(self._adj[v]) + 1

    def has_edge(self, u: int, v: int) -> bool:
        return v in self._adj[u]

    def components(self) -> tuple[tuple[int, ...], ...]:
        """Connected components as sorted vertex tuples, ordered by minimum."""
        seen = [False] * self.player_count
        out: list[tuple[int, ...]] = []
        for start in range(self.player_count):
            if seen[start]:
                continue
            seen[start] = True
            stack, comp = [start], [start]
            while stack:
                u = stack.pop()
                for w in self._adj[u]:
                    if not seen[w]:
                        seen[w] = True
                        comp.append(w)
                        stack.append(w)
            out.append(tuple(sorted(comp)))
        return tuple(out)


@dataclass(frozen=True)
class Game:
    """A BNPG instance: graph + per-player externality table + cost.

    `externality[v]` has exactly degree(v)+2 entries, indexed by the number of
    investors in v's closed neighborhood (0 .. degree+1).  Entries and costs
    are nonnegative rationals.
    """

    graph: Graph
    externality: tuple[tuple[Fraction, ...], ...]
    cost: tuple[Fraction, ...]

    def __post_init__(self) -> None:
        n = self.graph.player_count
        if len(self.externality) != n or len(self.cost) != n:
            raise ValueError("externality/cost length must equal player count")
        for v in range(n):
            table = self.externality[v]
            expected = self.graph.degree(v) + 2
            if len(table) != expected:
                raise ValueError(
                    f"player {v}: externality table has {len(table)} entries, "
                    f"needs degree+2 = {expected}"
                )
            if any(x < 0 for x in table):
                raise ValueError(f"player {v}: negative externality value")
            if self.cost[v] < 0:
                raise ValueError(f"player {v}: negative cost")

    @classmethod
    def build(
        cls,
        graph: Graph,
        externality: Iterable[Iterable[Rational]],
        cost: Iterable[Rational],
    ) -> Game:
        """Construct with coercion of ints / exact strings to Fraction."""
        tables = tuple(tuple(as_fraction(x) for x in t) for t in externality)
        costs = tuple(as_fraction(c) for c in cost)
        return cls(graph, tables, costs)

    @property
    def player_count(self) -> int:
        return self.graph.player_count


@dataclass(frozen=True)
class Profile:
    """A pure strategy profile: the set of investing players."""

    investing: frozenset[int]

    @classmethod
    def of(cls, *players: int) -> Profile:
        return cls(frozenset(players))

    def __contains__(self, v: int) -> bool:
        return v in self.investing

    def __len__(self) -> int:
        return len(self.investing)

    def __iter__(self):
        return iter(sorted(self.investing))

    def flip(self, v: int) -> Profile:
        """The profile with player v's action toggled."""
        if v in self.investing:
            return Profile(self.investing - {v})
        return Profile(self.investing | {v})

    def closed_count(self, graph: Graph, v: int) -> int:
        """Number of investors in v's closed neighborhood."""
        return len(graph.closed_neighbors(v) & self.investing)

    def open_count(self, graph: Graph, v: int) -> int:
        """Number of investing (open) neighbors of v."""
        return len(graph.neighbors(v) & self.investing)

    def validate_for(self, game: Game) -> None:
        for v in self.investing:
            if not (0 <= v < game.player_count):
                raise IndexError(f"profile mentions player {v}, out of range")


def payoff(game: Game, profile: Profile, v: int) -> Fraction:
    """Player v's utility: externality of its closed investor count, minus
    its cost when investing."""
    if not (0 <= v < game.player_count):
        raise IndexError(f"player {v} out of range")
    count = profile.closed_count(game.graph, v)
    value = game.externality[v][count]
    if v in profile:
        value -= game.cost[v]
    return value


def deviation_gain(game: Game, profile: Profile, v: int) -> Fraction:
    """Utility change for v if it unilaterally flips its action."""
    return payoff(game, profile.flip(v), v) - payoff(game, profile, v)


def is_stable(game: Game, v: int, invests: bool, count: int) -> bool:
    """Deviation check given v's full closed-neighborhood investor count.

    For an investing v the count includes v itself.  Equivalent to
    deviation_gain(...) <= 0 whenever the count matches an actual profile;
    indifference (gain 0) keeps the player stable.
    """
    g = game.externality[v]
    c = game.cost[v]
    if invests:
        return g[count] - c >= g[count - 1]
    return g[count] >= g[count + 1] - c


def is_psne(game: Game, profile: Profile) -> bool:
    """True iff no player has a strictly profitable unilateral deviation."""
    profile.validate_for(game)
    for v in range(game.player_count):
        count = profile.closed_count(game.graph, v)
        if not is_stable(game, v, v in profile, count):
            return False
    return True


def usw(game: Game, profile: Profile) -> Fraction:
    """Utilitarian social welfare: sum of all payoffs (0 for no players)."""
    profile.validate_for(game)
    return sum((payoff(game, profile, v) for v in range(game.player_count)), Fraction(0))


def esw(game: Game, profile: Profile) -> Fraction:
    """Egalitarian social welfare: minimum payoff.  Undefined for 0 players."""
    if game.player_count == 0:
        raise ValueError("egalitarian welfare is undefined for a zero-player game")
    profile.validate_for(game)
    return min(payoff(game, profile, v) for v in range(game.player_count))


def payoff_levels(game: Game) -> list[Fraction]:
    """Every payoff value any player can realize, sorted and deduplicated.

    A player's payoff is always g_v(k) or g_v(k) - c(v) for some count k, so
    the optimum of any min/threshold objective lies in this finite list.
    """
    values: set[Fraction] = set()
    for v in range(game.player_count):
        cost = game.cost[v]
        for value in game.externality[v]:
            values.add(value)
            values.add(value - cost)
    return sorted(values)


@dataclass(frozen=True)
class SubgameView:
    """An induced subgame plus the index bookkeeping to map profiles back.

    View player i corresponds to parent player kept[i].  Externality tables
    are truncated to the induced degree+2 entries; costs carry over.
    """

    parent: Game
    kept: tuple[int, ...]
    game: Game

    def to_parent(self, profile: Profile) -> Profile:
        return Profile(frozenset(self.kept[i] for i in profile.investing))

    def to_view(self, parent_profile: Profile) -> Profile:
        back = {p: i for i, p in enumerate(self.kept)}
        return Profile(
            frozenset(back[p] for p in parent_profile.investing if p in back)
        )


def induce_subgame(game: Game, players: Iterable[int]) -> SubgameView:
    """Restrict the game to a player subset (reindexed in sorted order)."""
    kept = tuple(sorted(set(players)))
    for p in kept:
        if not (0 <= p < game.player_count):
            raise IndexError(f"player {p} out of range")
    back = {p: i for i, p in enumerate(kept)}
    edges = frozenset(
        (back[u], back[v])
        for u, v in game.graph.edges
        if u in back and v in back
    )
    sub_graph = Graph(len(kept), edges)
    tables = tuple(
        game.externality[p][: sub_graph.degree(i) + 2] for i, p in enumerate(kept)
    )
    costs = tuple(game.cost[p] for p in kept)
    return SubgameView(game, kept, Game(sub_graph, tables, costs))
