"""Finite multigraphs, twice-marked graphs and divisors.

Vertices are dense integer ids ``0..n-1``.  Parallel edges are stored once
with a multiplicity; loop edges are rejected.  Graphs are immutable after
construction and hash by their normalized edge list, so they can key caches.
"""

from __future__ import annotations

import itertools
from collections import deque
from dataclasses import dataclass
from typing import Iterable, Mapping


class GraphError(ValueError):
    """Invalid graph, marking or divisor."""


class Divisor(tuple):
    """Dense integer chip configuration, one coefficient per vertex.

    Arithmetic is componentwise; ``D + E`` is the divisor sum, not tuple
    concatenation.
    """

    __slots__ = ()

    def __new__(cls, coeffs: Iterable[int] = ()):
        return super().__new__(cls, (int(c) for c in coeffs))

    @classmethod
    def zero(cls, n: int) -> "Divisor":
        return cls((0,) * n)

    @classmethod
    def point(cls, n: int, u: int, count: int = 1) -> "Divisor":
        coeffs = [0] * n
        coeffs[u] = count
        return cls(coeffs)

    @classmethod
    def from_mapping(cls, n: int, coeffs: Mapping[int, int]) -> "Divisor":
        dense = [0] * n
        for u, c in coeffs.items():
            u = int(u)
            if not 0 <= u < n:
                raise GraphError(f"divisor vertex {u} out of range for {n} vertices")
            dense[u] += int(c)
        return cls(dense)

    @property
    def degree(self) -> int:
        return sum(self)

    def is_effective(self) -> bool:
        return all(c >= 0 for c in self)

    def support(self) -> dict[int, int]:
        return {u: c for u, c in enumerate(self) if c}

    def twist(self, v: int, a: int, w: int, b: int) -> "Divisor":
        """Return ``self + a*v - b*w``."""
        coeffs = list(self)
        coeffs[v] += a
        coeffs[w] -= b
        return Divisor(coeffs)

    def __add__(self, other):  # type: ignore[override]
        if len(other) != len(self):
            raise GraphError("divisors live on graphs of different size")
        return Divisor(x + y for x, y in zip(self, other))

    def __sub__(self, other):
        if len(other) != len(self):
            raise GraphError("divisors live on graphs of different size")
        return Divisor(x - y for x, y in zip(self, other))

    def __neg__(self):
        return Divisor(-x for x in self)

    def __mul__(self, k):  # type: ignore[override]
        return Divisor(k * x for x in self)

    __rmul__ = __mul__

    def __repr__(self) -> str:
        return f"Divisor({list(self)})"


class Graph:
    """Connected loopless multigraph on vertices ``0..n-1``.

    ``edges`` may list a pair several times or carry explicit multiplicities
    as ``(u, v, mult)`` triples; both are merged.
    """

    __slots__ = ("n", "edges", "adjacency", "valence", "_hash", "_dist")

    def __init__(self, n: int, edges: Iterable[tuple[int, ...]]):
        if n < 1:
            raise GraphError("a graph needs at least one vertex")
        mult: dict[tuple[int, int], int] = {}
        for e in edges:
            if len(e) == 2:
                u, v, m = e[0], e[1], 1
            elif len(e) == 3:
                u, v, m = e
            else:
                raise GraphError(f"bad edge {e!r}")
            u, v, m = int(u), int(v), int(m)
            if u == v:
                raise GraphError(f"loop edge at vertex {u}")
            if not (0 <= u < n and 0 <= v < n):
                raise GraphError(f"edge {(u, v)} out of range for {n} vertices")
            if m < 1:
                raise GraphError(f"edge multiplicity must be positive, got {m}")
            key = (min(u, v), max(u, v))
            mult[key] = mult.get(key, 0) + m
        self.n = n
        self.edges: tuple[tuple[int, int, int], ...] = tuple(
            (u, v, m) for (u, v), m in sorted(mult.items())
        )
        adj: list[dict[int, int]] = [{} for _ in range(n)]
        for u, v, m in self.edges:
            adj[u][v] = m
            adj[v][u] = m
        self.adjacency: tuple[tuple[tuple[int, int], ...], ...] = tuple(
            tuple(sorted(a.items())) for a in adj
        )
        self.valence: tuple[int, ...] = tuple(sum(a.values()) for a in adj)
        self._hash = hash((n, self.edges))
        self._dist: dict[int, tuple[int, ...]] = {}
        if len(self.distances(0)) != n or min(self.distances(0)) < 0:
            raise GraphError("graph is not connected")

    @property
    def edge_count(self) -> int:
        return sum(m for _, _, m in self.edges)

    @property
    def genus(self) -> int:
        return self.edge_count - self.n + 1

    def multiplicity(self, u: int, v: int) -> int:
        for x, m in self.adjacency[u]:
            if x == v:
                return m
        return 0

    def distances(self, source: int) -> tuple[int, ...]:
        """BFS distances from ``source``; -1 marks unreachable vertices."""
        cached = self._dist.get(source)
        if cached is not None:
            return cached
        dist = [-1] * self.n
        dist[source] = 0
        queue = deque([source])
        while queue:
            u = queue.popleft()
            for x, _ in self.adjacency[u]:
                if dist[x] < 0:
                    dist[x] = dist[u] + 1
                    queue.append(x)
        result = tuple(dist)
        self._dist[source] = result
        return result

    def zero_divisor(self) -> Divisor:
        return Divisor.zero(self.n)

    def point(self, u: int, count: int = 1) -> Divisor:
        return Divisor.point(self.n, u, count)

    def divisor(self, coeffs: Mapping[int, int] | Iterable[int]) -> Divisor:
        if isinstance(coeffs, Mapping):
            return Divisor.from_mapping(self.n, coeffs)
        d = Divisor(coeffs)
        if len(d) != self.n:
            raise GraphError(f"divisor has {len(d)} entries, graph has {self.n} vertices")
        return d

    def __eq__(self, other) -> bool:
        return isinstance(other, Graph) and self.n == other.n and self.edges == other.edges

    def __hash__(self) -> int:
        return self._hash

    def __repr__(self) -> str:
        return f"Graph(n={self.n}, edges={list(self.edges)})"

    def __getstate__(self):
        return (self.n, self.edges)

    def __setstate__(self, state):
        n, edges = state
        fresh = Graph(n, edges)
        for name in Graph.__slots__:
            object.__setattr__(self, name, getattr(fresh, name))


@dataclass(frozen=True)
class MarkedGraph:
    """A graph with two distinct marked vertices ``v`` and ``w``."""

    graph: Graph
    v: int
    w: int

    def __post_init__(self):
        n = self.graph.n
        if not (0 <= self.v < n and 0 <= self.w < n):
            raise GraphError(f"marks ({self.v}, {self.w}) out of range for {n} vertices")
        if self.v == self.w:
            raise GraphError("marked points must be distinct")

    @property
    def genus(self) -> int:
        return self.graph.genus

    @property
    def n(self) -> int:
        return self.graph.n


# --- constructors -----------------------------------------------------------


def path_graph(n: int) -> Graph:
    return Graph(n, [(i, i + 1) for i in range(n - 1)])


def cycle_graph(n: int) -> Graph:
    """Cycle on ``n >= 2`` vertices; ``n == 2`` gives a double edge."""
    if n < 2:
        raise GraphError("a cycle needs at least two vertices")
    if n == 2:
        return Graph(2, [(0, 1, 2)])
    return Graph(n, [(i, (i + 1) % n) for i in range(n)])


def marked_cycle(l1: int, l2: int) -> MarkedGraph:
    """Cycle with arcs of lengths ``l1`` and ``l2`` between the marks.

    ``v`` is vertex 0 and ``w`` is vertex ``l1``; vertices are numbered along
    the ``l1`` arc first, so vertex ``l1 + j`` sits ``j`` steps past ``w``.
    """
    if l1 < 1 or l2 < 1:
        raise GraphError("arc lengths must be positive")
    return MarkedGraph(cycle_graph(l1 + l2), 0, l1)


# --- invariants -------------------------------------------------------------


def canonical_divisor(g: Graph) -> Divisor:
    return Divisor(val - 2 for val in g.valence)


def laplacian(g: Graph) -> list[list[int]]:
    lap = [[0] * g.n for _ in range(g.n)]
    for u, v, m in g.edges:
        lap[u][v] -= m
        lap[v][u] -= m
        lap[u][u] += m
        lap[v][v] += m
    return lap


def _bareiss_det(matrix: list[list[int]]) -> int:
    a = [row[:] for row in matrix]
    n = len(a)
    if n == 0:
        return 1
    sign, prev = 1, 1
    for k in range(n - 1):
        if a[k][k] == 0:
            for i in range(k + 1, n):
                if a[i][k] != 0:
                    a[k], a[i] = a[i], a[k]
                    sign = -sign
                    break
            else:
                return 0
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) // prev
        prev = a[k][k]
    return sign * a[n - 1][n - 1]


def spanning_tree_count(g: Graph) -> int:
    """Kirchhoff: any cofactor of the Laplacian (exact integer arithmetic)."""
    lap = laplacian(g)
    minor = [row[1:] for row in lap[1:]]
    return _bareiss_det(minor)


def subdivide(g: Graph, edge: tuple[int, int], parts: int) -> Graph:
    """Replace one copy of ``edge`` by a path of ``parts`` unit edges.

    Fresh vertices get ids ``n, n+1, ...`` in order from ``edge[0]``.
    """
    u, v = edge
    if parts < 1:
        raise GraphError("parts must be positive")
    if g.multiplicity(u, v) == 0:
        raise GraphError(f"unknown edge {edge}")
    if parts == 1:
        return g
    edges = [list(e) for e in g.edges]
    key = (min(u, v), max(u, v))
    for e in edges:
        if (e[0], e[1]) == key:
            e[2] -= 1
    kept = [tuple(e) for e in edges if e[2] > 0]
    chain = [u] + list(range(g.n, g.n + parts - 1)) + [v]
    kept += [(chain[i], chain[i + 1]) for i in range(parts)]
    return Graph(g.n + parts - 1, kept)


def spanning_trees_bruteforce(g: Graph) -> int:
    """Count spanning trees by trying every (n-1)-subset of edge copies."""
    copies = [(u, v) for u, v, m in g.edges for _ in range(m)]
    count = 0
    for subset in itertools.combinations(range(len(copies)), g.n - 1):
        parent = list(range(g.n))

        def find(x):
            while parent[x] != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            return x

        ok = True
        for i in subset:
            a, b = find(copies[i][0]), find(copies[i][1])
            if a == b:
                ok = False
                break
            parent[a] = b
        count += ok
    return count
