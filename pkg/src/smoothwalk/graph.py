"""Undirected graphs: construction, validation, generators, edge-list I/O.

Degree convention: a self-loop contributes exactly 1 to its node's degree,
so augmenting with loops turns D into D + I and keeps row sums of the
loop-augmented walk matrix equal to 1.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import (
    AlreadyAugmented,
    DuplicateEdge,
    IndexOutOfRange,
    MissingParameter,
    ParseError,
)

__all__ = [
    "Graph",
    "build_graph",
    "add_self_loops",
    "is_connected",
    "is_bipartite",
    "generate",
    "load_edge_list",
]


@dataclass(frozen=True)
class Graph:
    """Simple undirected graph, optionally with a loop at every node.

    ``edges`` holds canonical pairs (u <= v); a loop is stored as (u, u)
    and counts once toward both the edge count and the degree of u.
    """

    n: int
    edges: frozenset[tuple[int, int]]
    has_self_loops: bool
    degrees: tuple[int, ...] = field(compare=False)

    @property
    def num_edges(self) -> int:
        return len(self.edges)

    def neighbors(self, u: int) -> list[int]:
        out = []
        for a, b in self.edges:
            if a == u:
                out.append(b)
            elif b == u:
                out.append(a)
        return sorted(out)

    def adjacency(self) -> np.ndarray:
        a = np.zeros((self.n, self.n))
        for u, v in self.edges:
            a[u, v] = 1.0
            a[v, u] = 1.0
        return a

    def degree_vector(self) -> np.ndarray:
        return np.array(self.degrees, dtype=float)

    def adjacency_lists(self) -> list[list[int]]:
        out: list[list[int]] = [[] for _ in range(self.n)]
        for a, b in self.edges:
            out[a].append(b)
            if a != b:
                out[b].append(a)
        for lst in out:
            lst.sort()
        return out


def _canonical(u: int, v: int) -> tuple[int, int]:
    return (u, v) if u <= v else (v, u)


def build_graph(n: int, edges) -> Graph:
    """Build a graph from a pair list, canonicalizing edge order.

    Isolated nodes are allowed here; operations with connectivity or degree
    preconditions reject them later with a specific error.
    """
    if n < 1:
        raise MissingParameter("node count must be positive")
    seen: set[tuple[int, int]] = set()
    for u, v in edges:
        if not (0 <= u < n and 0 <= v < n):
            raise IndexOutOfRange(f"edge ({u}, {v}) outside [0, {n})")
        e = _canonical(u, v)
        if e in seen:
            raise DuplicateEdge(f"edge {e} appears more than once")
        seen.add(e)
    degrees = [0] * n
    for u, v in seen:
        degrees[u] += 1
        if u != v:
            degrees[v] += 1
    loops = {u for u, v in seen if u == v}
    return Graph(
        n=n,
        edges=frozenset(seen),
        has_self_loops=(len(loops) == n),
        degrees=tuple(degrees),
    )


def add_self_loops(g: Graph) -> Graph:
    """Add a loop at every node; each degree rises by exactly 1."""
    if any(u == v for u, v in g.edges):
        raise AlreadyAugmented("graph already carries self-loops")
    edges = set(g.edges) | {(u, u) for u in range(g.n)}
    degrees = tuple(d + 1 for d in g.degrees)
    return Graph(n=g.n, edges=frozenset(edges), has_self_loops=True, degrees=degrees)


def is_connected(g: Graph) -> bool:
    adj = g.adjacency_lists()
    seen = [False] * g.n
    stack = [0]
    seen[0] = True
    while stack:
        u = stack.pop()
        for v in adj[u]:
            if not seen[v]:
                seen[v] = True
                stack.append(v)
    return all(seen)


def is_bipartite(g: Graph) -> bool:
    """2-colorability; any self-loop makes the graph non-bipartite."""
    if any(u == v for u, v in g.edges):
        return False
    adj = g.adjacency_lists()
    color = [-1] * g.n
    for start in range(g.n):
        if color[start] != -1:
            continue
        color[start] = 0
        stack = [start]
        while stack:
            u = stack.pop()
            for v in adj[u]:
                if color[v] == -1:
                    color[v] = 1 - color[u]
                    stack.append(v)
                elif color[v] == color[u]:
                    return False
    return True


def generate(kind: str, n: int, p: float | None = None, seed: int | None = None) -> Graph:
    """Deterministic graph fixtures: cycle, path, complete, erdos_renyi."""
    if n < 1:
        raise MissingParameter("n must be >= 1")
    if kind == "complete":
        edges = [(u, v) for u in range(n) for v in range(u + 1, n)]
    elif kind == "path":
        edges = [(i, i + 1) for i in range(n - 1)]
    elif kind == "cycle":
        if n < 3:
            raise MissingParameter("cycle requires n >= 3")
        edges = [(i, (i + 1) % n) for i in range(n)]
    elif kind == "erdos_renyi":
        if p is None:
            raise MissingParameter("erdos_renyi requires p")
        if not 0.0 <= p <= 1.0:
            raise MissingParameter("p must lie in [0, 1]")
        rng = np.random.default_rng(0 if seed is None else seed)
        edges = [
            (u, v)
            for u in range(n)
            for v in range(u + 1, n)
            if rng.random() < p
        ]
    else:
        raise MissingParameter(f"unknown generator kind {kind!r}")
    return build_graph(n, edges)


def load_edge_list(text: str) -> Graph:
    """Parse "u v" lines; '#' comments; optional leading "n <count>" header."""
    declared_n: int | None = None
    pairs: list[tuple[int, int]] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split()
        if parts[0] == "n" and declared_n is None and not pairs:
            if len(parts) != 2:
                raise ParseError(lineno, "expected 'n <count>'")
            try:
                declared_n = int(parts[1])
            except ValueError:
                raise ParseError(lineno, f"bad node count {parts[1]!r}") from None
            if declared_n < 1:
                raise ParseError(lineno, "node count must be positive")
            continue
        if len(parts) != 2:
            raise ParseError(lineno, f"expected 'u v', got {line!r}")
        try:
            u, v = int(parts[0]), int(parts[1])
        except ValueError:
            raise ParseError(lineno, f"non-integer endpoint in {line!r}") from None
        if u < 0 or v < 0:
            raise ParseError(lineno, "negative node index")
        pairs.append((u, v))
    if declared_n is None:
        if not pairs:
            raise ParseError(1, "empty edge list and no node count")
        declared_n = max(max(u, v) for u, v in pairs) + 1
    return build_graph(declared_n, pairs)
