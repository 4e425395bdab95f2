"""Critical cliques: maximal sets of mutual closed-neighborhood twins.

Two players are closed twins when N[u] = N[v]; the equivalence classes are
cliques, and contracting each class yields the critical clique graph.  When
that graph is a forest the dynamic programs in `ccforest` apply.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field

from .game import Graph


@dataclass(frozen=True)
class CriticalCliqueGraph:
    """The source graph plus its partition into critical cliques.

    Cliques are indexed by their minimum member; `edges` holds the contracted
    adjacency (every member of one endpoint clique is adjacent to every member
    of the other — a twin-class property, asserted in tests, not recomputed).
    """

    graph: Graph
    cliques: tuple[tuple[int, ...], ...]
    clique_of: tuple[int, ...]
    edges: frozenset[tuple[int, int]]

    def clique_graph(self) -> Graph:
        """The contracted graph over clique indices."""
        return Graph(len(self.cliques), self.edges)


def build_cc_graph(graph: Graph) -> CriticalCliqueGraph:
    """Partition players by closed neighborhood and contract.

    Classes are found by grouping on the frozen closed-neighbor set itself
    (full equality, no hash-collision risk), so the partition is exact.
    """
    classes: dict[frozenset[int], list[int]] = {}
    for v in range(graph.player_count):
        classes.setdefault(graph.closed_neighbors(v), []).append(v)
    cliques = tuple(sorted((tuple(sorted(c)) for c in classes.values())))
    clique_of = [0] * graph.player_count
    for idx, members in enumerate(cliques):
        for v in members:
            clique_of[v] = idx
    cc_edges = set()
    for idx, members in enumerate(cliques):
        rep = members[0]
        for w in graph.neighbors(rep):
            j = clique_of[w]
            if j != idx:
                cc_edges.add((idx, j) if idx < j else (j, idx))
    return CriticalCliqueGraph(graph, cliques, tuple(clique_of), frozenset(cc_edges))


def is_forest(cc: CriticalCliqueGraph) -> bool:
    """True iff the contracted graph is acyclic (per component)."""
    cg = cc.clique_graph()
    return len(cg.edges) == cg.player_count - len(cg.components())


@dataclass(frozen=True)
class RootedForest:
    """A rooting of the critical clique forest.

    One root per component (the lowest clique index); children are in
    ascending index order; `postorder` lists every clique with children
    before parents, components in root order.
    """

    roots: tuple[int, ...]
    parent: tuple[int | None, ...]
    children: tuple[tuple[int, ...], ...]
    postorder: tuple[int, ...] = field(default=())

    def __post_init__(self) -> None:
        if not self.postorder:
            order: list[int] = []
            for root in self.roots:
                stack: list[tuple[int, bool]] = [(root, False)]
                while stack:
                    node, expanded = stack.pop()
                    if expanded:
                        order.append(node)
                        continue
                    stack.append((node, True))
                    for child in reversed(self.children[node]):
                        stack.append((child, False))
            object.__setattr__(self, "postorder", tuple(order))


def rooted_forest(cc: CriticalCliqueGraph) -> RootedForest:
    """Root each tree of the clique forest at its lowest clique index."""
    if not is_forest(cc):
        raise ValueError("critical clique graph is not a forest")
    cg = cc.clique_graph()
    t = cg.player_count
    parent: list[int | None] = [None] * t
    children: list[list[int]] = [[] for _ in range(t)]
    roots: list[int] = []
    seen = [False] * t
    for start in range(t):
        if seen[start]:
            continue
        roots.append(start)
        seen[start] = True
        queue = deque([start])
        while queue:
            node = queue.popleft()
            for nb in sorted(cg.neighbors(node)):
                if not seen[nb]:
                    seen[nb] = True
                    parent[nb] = node
                    children[node].append(nb)
                    queue.append(nb)
    return RootedForest(
        tuple(roots),
        tuple(parent),
        tuple(tuple(c) for c in children),
    )
