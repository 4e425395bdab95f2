"""Textual instance format, profile format, and seeded instance generators.

Instance format (one directive per line, "#" lines are comments)::

    bnpg 1
    n <player-count>
    e <u> <v>
    c <v> <cost>
    g <v> <k> <value>

Every player needs a cost line and a complete externality table
(k = 0 .. degree+1).  Values are exact rationals: integers, decimal strings
("1.5"), or ratios ("3/4"); they never pass through floats.  Serialization is
canonical (sorted directives, integers printed bare, other rationals as p/q),
so parse(serialize(game)) == game exactly.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction

from .game import Game, Graph, Profile


class ParseError(ValueError):
    """Input rejected; the message names the offending 1-based line when the
    problem is tied to one (line=None for whole-file problems)."""

    def __init__(self, line: int | None, message: str):
        super().__init__(f"line {line}: {message}" if line is not None else message)
        self.line = line


def _rational(token: str, line: int, what: str) -> Fraction:
    try:
        value = Fraction(token)
    except (ValueError, ZeroDivisionError):
        raise ParseError(line, f"{what} is not an exact rational: {token!r}") from None
    if value < 0:
        raise ParseError(line, f"{what} must be nonnegative, got {token}")
    return value


def _int(token: str, line: int, what: str) -> int:
    try:
        return int(token)
    except ValueError:
        raise ParseError(line, f"{what} is not an integer: {token!r}") from None


def _significant_lines(text: str):
    for idx, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if line and not line.startswith("#"):
            yield idx, line.split()


def parse_instance(text: str) -> Game:
    """Parse the canonical instance format into a Game."""
    lines = _significant_lines(text)
    try:
        idx, head = next(lines)
    except StopIteration:
        raise ParseError(1, "empty input, expected 'bnpg 1' header") from None
    if head != ["bnpg", "1"]:
        raise ParseError(idx, f"unsupported header {' '.join(head)!r}, expected 'bnpg 1'")

    n: int | None = None
    last_idx = idx
    edges: set[tuple[int, int]] = set()
    costs: dict[int, Fraction] = {}
    gtab: dict[tuple[int, int], Fraction] = {}
    g_lines: dict[tuple[int, int], int] = {}

    def need_player(v: int, idx: int) -> None:
        assert n is not None
        if not (0 <= v < n):
            raise ParseError(idx, f"player {v} out of range [0, {n})")

    for idx, parts in lines:
        last_idx = idx
        kind, args = parts[0], parts[1:]
        if kind == "n":
            if n is not None:
                raise ParseError(idx, "duplicate player-count line")
            if len(args) != 1:
                raise ParseError(idx, "expected: n <count>")
            n = _int(args[0], idx, "player count")
            if n < 0:
                raise ParseError(idx, "player count must be >= 0")
            continue
        if n is None:
            raise ParseError(idx, f"'{kind}' line before the player count")
        if kind == "e":
            if len(args) != 2:
                raise ParseError(idx, "expected: e <u> <v>")
            u, v = (_int(a, idx, "endpoint") for a in args)
            need_player(u, idx)
            need_player(v, idx)
            if u == v:
                raise ParseError(idx, f"self-loop at {u}")
            key = (u, v) if u < v else (v, u)
            if key in edges:
                raise ParseError(idx, f"duplicate edge ({key[0]}, {key[1]})")
            edges.add(key)
        elif kind == "c":
            if len(args) != 2:
                raise ParseError(idx, "expected: c <v> <cost>")
            v = _int(args[0], idx, "player")
            need_player(v, idx)
            if v in costs:
                raise ParseError(idx, f"duplicate cost for player {v}")
            costs[v] = _rational(args[1], idx, "cost")
        elif kind == "g":
            if len(args) != 3:
                raise ParseError(idx, "expected: g <v> <k> <value>")
            v = _int(args[0], idx, "player")
            k = _int(args[1], idx, "externality index")
            need_player(v, idx)
            if k < 0:
                raise ParseError(idx, "externality index must be >= 0")
            if (v, k) in gtab:
                raise ParseError(idx, f"duplicate externality entry g({v}, {k})")
            gtab[(v, k)] = _rational(args[2], idx, "externality value")
            g_lines[(v, k)] = idx
        else:
            raise ParseError(idx, f"unknown directive {kind!r}")

    if n is None:
        raise ParseError(last_idx, "missing player count line")

    graph = Graph(n, frozenset(edges))
    tables = []
    for v in range(n):
        width = graph.degree(v) + 2
        for k in gtab:
            if k[0] == v and k[1] >= width:
                raise ParseError(
                    g_lines[k],
                    f"externality index {k[1]} out of range for player {v} "
                    f"(degree {graph.degree(v)}, max index {width - 1})",
                )
        row = []
        for k in range(width):
            if (v, k) not in gtab:
                raise ParseError(
                    None,
                    f"incomplete externality table for player {v}: missing g({v}, {k})",
                )
            row.append(gtab[(v, k)])
        tables.append(tuple(row))
        if v not in costs:
            raise ParseError(None, f"missing cost for player {v}")
    return Game(graph, tuple(tables), tuple(costs[v] for v in range(n)))


def format_rational(value: Fraction) -> str:
    return str(value.numerator) if value.denominator == 1 else f"{value.numerator}/{value.denominator}"


def serialize_instance(game: Game) -> str:
    """Canonical text for a game; exact round-trip through parse_instance."""
    out = ["bnpg 1", f"n {game.player_count}"]
    out += [f"e {u} {v}" for u, v in sorted(game.graph.edges)]
    out += [f"c {v} {format_rational(game.cost[v])}" for v in range(game.player_count)]
    for v in range(game.player_count):
        out += [
            f"g {v} {k} {format_rational(x)}"
            for k, x in enumerate(game.externality[v])
        ]
    return "\n".join(out) + "\n"


def parse_profile(text: str) -> Profile:
    """Parse "profile: -" (empty) or "profile: 0 2" into a Profile."""
    lines = [(i, ln) for i, ln in enumerate(text.splitlines(), 1) if ln.strip()]
    if len(lines) != 1:
        raise ParseError(1, "expected exactly one profile line")
    idx, line = lines[0]
    parts = line.split()
    if not parts or parts[0] != "profile:":
        raise ParseError(idx, "profile line must start with 'profile:'")
    body = parts[1:]
    if body == ["-"]:
        return Profile.of()
    if not body:
        raise ParseError(idx, "empty profile is written 'profile: -'")
    players = []
    for token in body:
        p = _int(token, idx, "player index")
        if p < 0:
            raise ParseError(idx, f"player index must be >= 0, got {p}")
        players.append(p)
    if len(set(players)) != len(players):
        raise ParseError(idx, "duplicate player in profile")
    return Profile.of(*players)


def serialize_profile(profile: Profile) -> str:
    if not profile.investing:
        return "profile: -"
    return "profile: " + " ".join(str(v) for v in sorted(profile.investing))


def parse_graph(text: str) -> tuple[Graph, frozenset[int]]:
    """Parse a bare graph ("n"/"e" lines, optional "red <v...>" marks).

    Returns (graph, red vertices); the red set is used by CLI reductions that
    need a bipartition and is empty otherwise.
    """
    n: int | None = None
    edges: list[tuple[int, int]] = []
    red: set[int] = set()
    for idx, parts in _significant_lines(text):
        kind, args = parts[0], parts[1:]
        if kind == "n":
            if n is not None:
                raise ParseError(idx, "duplicate vertex-count line")
            n = _int(args[0] if args else "", idx, "vertex count")
            if n < 0:
                raise ParseError(idx, "vertex count must be >= 0")
            continue
        if n is None:
            raise ParseError(idx, f"'{kind}' line before the vertex count")
        if kind == "e":
            if len(args) != 2:
                raise ParseError(idx, "expected: e <u> <v>")
            u, v = (_int(a, idx, "endpoint") for a in args)
            for w in (u, v):
                if not (0 <= w < n):
                    raise ParseError(idx, f"vertex {w} out of range [0, {n})")
            if u == v:
                raise ParseError(idx, f"self-loop at {u}")
            edges.append((u, v))
        elif kind == "red":
            for a in args:
                v = _int(a, idx, "vertex")
                if not (0 <= v < n):
                    raise ParseError(idx, f"vertex {v} out of range [0, {n})")
                red.add(v)
        else:
            raise ParseError(idx, f"unknown directive {kind!r}")
    if n is None:
        raise ParseError(1, "missing vertex count line")
    try:
        graph = Graph.from_edges(n, edges)
    except ValueError as exc:
        raise ParseError(None, str(exc)) from None
    return graph, frozenset(red)


def serialize_graph(graph: Graph, red: frozenset[int] = frozenset()) -> str:
    out = [f"n {graph.player_count}"]
    out += [f"e {u} {v}" for u, v in sorted(graph.edges)]
    if red:
        out.append("red " + " ".join(str(v) for v in sorted(red)))
    return "\n".join(out) + "\n"


# ---------------------------------------------------------------------------
# Seeded generators
# ---------------------------------------------------------------------------

FAMILIES = (
    "path",
    "cycle",
    "clique",
    "tree",
    "caterpillar",
    "twin_tree",
    "gnp",
    "bounded_tw",
)
G_MODES = ("monotone", "arbitrary", "homogeneous")
COST_MODES = ("zero", "unit", "random")


@dataclass(frozen=True)
class GameSpec:
    """Deterministic recipe for a random instance (same spec, same game)."""

    family: str
    n: int = 0
    seed: int = 0
    p: float = 0.3  # gnp edge probability
    width: int = 2  # bounded_tw target width
    multiplicities: tuple[int, ...] | None = None  # twin_tree block sizes
    g_mode: str = "monotone"
    cost_mode: str = "random"

    def __post_init__(self) -> None:
        if self.family not in FAMILIES:
            raise ValueError(f"unknown family {self.family!r}, pick from {FAMILIES}")
        if self.g_mode not in G_MODES:
            raise ValueError(f"unknown g_mode {self.g_mode!r}")
        if self.cost_mode not in COST_MODES:
            raise ValueError(f"unknown cost_mode {self.cost_mode!r}")
        if self.family == "twin_tree":
            if not self.multiplicities or any(m < 1 for m in self.multiplicities):
                raise ValueError("twin_tree needs multiplicities, each >= 1")
        elif self.n < 0:
            raise ValueError("n must be >= 0")


def _random_tree_parents(t: int, rng: random.Random) -> list[int]:
    # Random recursive tree: node i >= 1 attaches to a uniform earlier node.
    return [rng.randrange(i) for i in range(1, t)]


def _spec_graph(spec: GameSpec, rng: random.Random) -> Graph:
    n = spec.n
    if spec.family == "path":
        return Graph.from_edges(n, [(i, i + 1) for i in range(n - 1)])
    if spec.family == "cycle":
        edges = [(i, i + 1) for i in range(n - 1)]
        if n >= 3:
            edges.append((0, n - 1))
        return Graph.from_edges(n, edges)
    if spec.family == "clique":
        return Graph.from_edges(n, [(i, j) for i in range(n) for j in range(i + 1, n)])
    if spec.family == "tree":
        parents = _random_tree_parents(n, rng)
        return Graph.from_edges(n, [(p, i + 1) for i, p in enumerate(parents)])
    if spec.family == "caterpillar":
        spine = max(1, (n + 1) // 2)
        edges = [(i, i + 1) for i in range(spine - 1)]
        edges += [(rng.randrange(spine), leg) for leg in range(spine, n)]
        return Graph.from_edges(n, edges)
    if spec.family == "gnp":
        edges = [
            (i, j)
            for i in range(n)
            for j in range(i + 1, n)
            if rng.random() < spec.p
        ]
        return Graph.from_edges(n, edges)
    if spec.family == "bounded_tw":
        w = max(1, spec.width)
        base = min(n, w + 1)
        edges = [(i, j) for i in range(base) for j in range(i + 1, base)]
        bags = [tuple(range(base))]
        for v in range(base, n):
            bag = list(bags[rng.randrange(len(bags))])
            anchor = rng.sample(bag, min(w, len(bag)))
            edges += [(a, v) for a in anchor]
            bags.append(tuple(sorted(anchor + [v])))
        return Graph.from_edges(n, edges)
    if spec.family == "twin_tree":
        return _twin_tree_graph(spec.multiplicities or (), rng)
    raise AssertionError(spec.family)


def _twin_tree_graph(multiplicities: tuple[int, ...], rng: random.Random) -> Graph:
    t = len(multiplicities)
    starts = [0]
    for m in multiplicities:
        starts.append(starts[-1] + m)
    n = starts[-1]
    blocks = [range(starts[i], starts[i + 1]) for i in range(t)]
    edges: list[tuple[int, int]] = []
    for block in blocks:
        edges += [(u, v) for u in block for v in block if u < v]
    for child, parent in enumerate(_random_tree_parents(t, rng), start=1):
        edges += [(u, v) for u in blocks[parent] for v in blocks[child]]
    graph = Graph.from_edges(n, edges)
    # Adjacent twin blocks collapse (a 2-node tree becomes one clique); the
    # realized critical-clique count is asserted so corpus code can rely on it.
    from .critical_clique import build_cc_graph

    expected = 1 if t <= 2 else t
    realized = len(build_cc_graph(graph).cliques)
    if realized != expected:
        raise AssertionError(
            f"twin-expanded tree realized {realized} critical cliques, expected {expected}"
        )
    return graph


def _monotone_table(width: int, rng: random.Random) -> tuple[Fraction, ...]:
    row, value = [], Fraction(0)
    for _ in range(width):
        value += Fraction(rng.randint(0, 3), rng.choice((1, 1, 2, 4)))
        row.append(value)
    return tuple(row)


def _arbitrary_table(width: int, rng: random.Random) -> tuple[Fraction, ...]:
    return tuple(
        Fraction(rng.randint(0, 8), rng.choice((1, 1, 2, 4))) for _ in range(width)
    )


def _cost(mode: str, rng: random.Random) -> Fraction:
    if mode == "zero":
        return Fraction(0)
    if mode == "unit":
        return Fraction(1)
    return Fraction(rng.randint(0, 6), rng.choice((1, 2, 3)))


def gen_random_game(spec: GameSpec) -> Game:
    """Generate the instance a GameSpec describes (fully seed-deterministic)."""
    rng = random.Random(spec.seed)
    graph = _spec_graph(spec, rng)
    n = graph.player_count
    if spec.g_mode == "homogeneous":
        max_width = max((graph.degree(v) + 2 for v in range(n)), default=2)
        master = (
            _monotone_table(max_width, rng)
            if rng.random() < 0.5
            else _arbitrary_table(max_width, rng)
        )
        shared_cost = _cost(spec.cost_mode, rng)
        tables = tuple(master[: graph.degree(v) + 2] for v in range(n))
        costs = tuple(shared_cost for _ in range(n))
        return Game(graph, tables, costs)
    tables = []
    for v in range(n):
        width = graph.degree(v) + 2
        if spec.g_mode == "monotone":
            tables.append(_monotone_table(width, rng))
        else:
            tables.append(_arbitrary_table(width, rng))
    costs = tuple(_cost(spec.cost_mode, rng) for _ in range(n))
    return Game(graph, tuple(tables), costs)
