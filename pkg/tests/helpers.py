"""Shared graph/game builders for the test suite."""

from __future__ import annotations

import random
from fractions import Fraction

from bnpg.game import Game, Graph


def path_graph(n: int) -> Graph:
    return Graph.from_edges(n, [(i, i + 1) for i in range(n - 1)])


def cycle_graph(n: int) -> Graph:
    return Graph.from_edges(n, [(i, (i + 1) % n) for i in range(n)])


def complete_graph(n: int) -> Graph:
    return Graph.from_edges(n, [(i, j) for i in range(n) for j in range(i + 1, n)])


def star_graph(leaves: int) -> Graph:
    return Graph.from_edges(leaves + 1, [(0, i) for i in range(1, leaves + 1)])


def petersen() -> Graph:
    outer = [(i, (i + 1) % 5) for i in range(5)]
    inner = [(5 + i, 5 + (i + 2) % 5) for i in range(5)]
    spokes = [(i, i + 5) for i in range(5)]
    return Graph.from_edges(10, outer + inner + spokes)


def random_tree(n: int, rng: random.Random) -> Graph:
    return Graph.from_edges(n, [(rng.randrange(v), v) for v in range(1, n)])


def gnp_graph(n: int, p: float, rng: random.Random) -> Graph:
    edges = [
        (i, j) for i in range(n) for j in range(i + 1, n) if rng.random() < p
    ]
    return Graph.from_edges(n, edges)


def twin_cluster_graph(n: int, rng: random.Random) -> Graph:
    """Tree of blocks (1-3 mutually adjacent twins); adjacent blocks fully joined."""
    blocks: list[list[int]] = []
    total = 0
    while total < n:
        size = min(rng.randrange(1, 4), n - total)
        blocks.append(list(range(total, total + size)))
        total += size
    edges = set()
    for block in blocks:
        for i, u in enumerate(block):
            for v in block[i + 1 :]:
                edges.add((u, v))
    for idx in range(1, len(blocks)):
        other = blocks[rng.randrange(idx)]
        for u in other:
            for v in blocks[idx]:
                edges.add((min(u, v), max(u, v)))
    return Graph.from_edges(n, sorted(edges))


def random_game(graph: Graph, rng: random.Random, monotone: bool = False) -> Game:
    """Small rational tables; roughly 30% of steps are non-monotone unless asked."""
    ext, cost = [], []
    for v in range(graph.player_count):
        table = [Fraction(rng.randrange(0, 5), rng.choice((1, 2)))]
        for _ in range(graph.degree(v) + 1):
            if monotone or rng.random() < 0.7:
                table.append(table[-1] + Fraction(rng.randrange(0, 3)))
            else:
                table.append(Fraction(rng.randrange(0, 6), 2))
        ext.append(tuple(table))
        cost.append(Fraction(rng.randrange(0, 4), rng.choice((1, 2))))
    return Game.build(graph, ext, cost)


def best_shot_game(graph: Graph, cost: Fraction = Fraction(1, 2)) -> Game:
    """Classic threshold game: any investor in the closed neighborhood is enough."""
    ext = [
        (Fraction(0),) + (Fraction(1),) * (graph.degree(v) + 1)
        for v in range(graph.player_count)
    ]
    return Game.build(graph, ext, [cost] * graph.player_count)


def connected_atlas(max_n: int):
    """All connected graphs with 1..max_n vertices (max_n <= 7), as Graphs."""
    import networkx as nx

    out = []
    for g in nx.graph_atlas_g():
        n = g.number_of_nodes()
        if n < 1 or n > max_n:
            continue
        if not nx.is_connected(g):
            continue
        relabel = {node: i for i, node in enumerate(sorted(g.nodes()))}
        out.append(
            Graph.from_edges(n, [(relabel[u], relabel[v]) for u, v in g.edges()])
        )
    return out
