"""Vertex gluing, the gluing rank formula, chains of loops, genus-1 formulas."""

from __future__ import annotations

import functools
import math
from dataclasses import dataclass
from typing import Any, Sequence

from . import zperm
from .chipfire import is_equivalent, rank, torsion_order
from .graph import Divisor, Graph, GraphError, MarkedGraph, marked_cycle
from .transmission import transmission_permutation, transmission_table
from .zperm import Periodic, ZPerm, demazure, simple_reflection, tropical_star


@dataclass(frozen=True)
class GluedGraph:
    """``(G1, v1, w1)`` and ``(G2, v2, w2)`` glued along ``w1 = v2``.

    ``left[x]`` / ``right[x]`` give the image of each constituent vertex.
    """

    result: MarkedGraph
    first: MarkedGraph
    second: MarkedGraph
    left: tuple[int, ...]
    right: tuple[int, ...]

    @property
    def seam(self) -> int:
        return self.left[self.first.w]

    def embed(self, d1: Divisor, d2: Divisor) -> Divisor:
        coeffs = [0] * self.result.n
        for x, c in enumerate(d1):
            coeffs[self.left[x]] += c
        for x, c in enumerate(d2):
            coeffs[self.right[x]] += c
        return Divisor(coeffs)

    def split(self, d: Divisor) -> tuple[Divisor, Divisor]:
        """Split a divisor on the gluing; seam chips go to the first side."""
        back2 = {y: x for x, y in enumerate(self.right)}
        d1 = [d[y] for y in self.left]
        d2 = [0] * self.second.n
        for y, c in enumerate(d):
            x = back2.get(y)
            if x is not None and y != self.seam:
                d2[x] = c
        return Divisor(d1), Divisor(d2)


def vertex_glue(m1: MarkedGraph, m2: MarkedGraph) -> GluedGraph:
    n1 = m1.n
    left = tuple(range(n1))
    right = []
    fresh = n1
    for x in range(m2.n):
        if x == m2.v:
            right.append(m1.w)
        else:
            right.append(fresh)
            fresh += 1
    edges = list(m1.graph.edges) + [(right[u], right[v], m) for u, v, m in m2.graph.edges]
    g = Graph(n1 + m2.n - 1, edges)
    return GluedGraph(MarkedGraph(g, m1.v, right[m2.w]), m1, m2, left, tuple(right))


def glue_rank_terms(gg: GluedGraph, d1: Divisor, d2: Divisor) -> dict[int, int]:
    """``l -> r1(D1 - (l+1) w1) + r2(D2 + l v2) + 1`` on a window holding the min.

    Below ``-deg D2 - 1`` the second rank is stuck at -1 while the first can
    only grow as ``l`` decreases; above ``deg D1`` the first is stuck at -1
    while the second only grows.  The window is padded by each genus.
    """
    m1, m2 = gg.first, gg.second
    lo = -d2.degree - m2.genus - 1
    hi = d1.degree + m1.genus + 1
    return {
        l: rank(m1.graph, d1.twist(m1.v, 0, m1.w, l + 1))
        + rank(m2.graph, d2.twist(m2.v, l, m2.w, 0))
        + 1
        for l in range(lo, hi + 1)
    }


def glue_rank(gg: GluedGraph, d1: Divisor, d2: Divisor) -> int:
    return min(glue_rank_terms(gg, d1, d2).values())


@dataclass
class ChainingReport:
    tables_agree: bool
    b_range: tuple[int, int]
    tau: ZPerm | None = None
    tau_first: ZPerm | None = None
    tau_second: ZPerm | None = None
    demazure_agrees: bool | None = None

    def to_json(self) -> dict[str, Any]:
        from .serialize import perm_to_json

        out: dict[str, Any] = {"tables_agree": self.tables_agree, "b_range": list(self.b_range)}
        for name in ("tau", "tau_first", "tau_second"):
            p = getattr(self, name)
            if p is not None:
                out[name] = perm_to_json(p)
        if self.demazure_agrees is not None:
            out["demazure_agrees"] = self.demazure_agrees
        return out


def verify_chaining(
    gg: GluedGraph, d1: Divisor, d2: Divisor, b_range: tuple[int, int] | None = None
) -> ChainingReport:
    """Compare the glued transmission table with the min-plus product."""
    d = gg.embed(d1, d2)
    left = transmission_table(gg.result, d, b_range)
    t1 = transmission_table(gg.first, d1)
    t2 = transmission_table(gg.second, d2)
    right = tropical_star(t1.s, t2.s, left.s.b_range)
    report = ChainingReport(left.s.agrees_with(right), left.s.b_range)
    reps = [transmission_permutation(m, x) for m, x in ((gg.result, d), (gg.first, d1), (gg.second, d2))]
    if all(r.submodular for r in reps):
        report.tau, report.tau_first, report.tau_second = (r.tau for r in reps)
        report.demazure_agrees = demazure(report.tau_first, report.tau_second) == report.tau
    return report


# --- chains of loops ------------------------------------------------------------


@dataclass(frozen=True)
class ChainSpec:
    """Loops ``(l1, l2)`` glued in a row; optional chip offsets ``xi``."""

    loops: tuple[tuple[int, int], ...]
    xi: tuple[int, ...] | None = None

    def __post_init__(self):
        if not self.loops:
            raise GraphError("a chain needs at least one loop")
        for l1, l2 in self.loops:
            if l1 < 1 or l2 < 1:
                raise GraphError(f"bad loop arcs ({l1}, {l2})")
            if (l1 + l2) // math.gcd(l1, l2) < 2:
                raise GraphError(f"loop ({l1}, {l2}) has torsion order 1")
        if self.xi is not None:
            if len(self.xi) != len(self.loops):
                raise GraphError("need one xi per loop")
            for x, (l1, l2) in zip(self.xi, self.loops):
                if not 0 <= x < l1 + l2:
                    raise GraphError(f"xi = {x} out of range for loop ({l1}, {l2})")

    @classmethod
    def uniform(cls, k: int, genus: int, xi: Sequence[int] | None = None) -> "ChainSpec":
        """Chain of ``genus`` loops with arcs of lengths 1 and k - 1."""
        return cls(((1, k - 1),) * genus, tuple(xi) if xi is not None else None)

    @property
    def torsions(self) -> tuple[int, ...]:
        return tuple((l1 + l2) // math.gcd(l1, l2) for l1, l2 in self.loops)

    @property
    def genus(self) -> int:
        return len(self.loops)

    def with_xi(self, xi: Sequence[int]) -> "ChainSpec":
        return ChainSpec(self.loops, tuple(xi))


@functools.lru_cache(maxsize=None)
def _chain_layout(loops: tuple[tuple[int, int], ...]) -> tuple[MarkedGraph, tuple[tuple[int, ...], ...]]:
    pieces = [marked_cycle(l1, l2) for l1, l2 in loops]
    current = pieces[0]
    maps = [tuple(range(current.n))]
    for piece in pieces[1:]:
        gg = vertex_glue(current, piece)
        maps = [tuple(gg.left[x] for x in m) for m in maps] + [gg.right]
        current = gg.result
    return current, tuple(maps)


def build_chain(spec: ChainSpec) -> MarkedGraph:
    return _chain_layout(spec.loops)[0]


def loop_vertex_maps(spec: ChainSpec) -> tuple[tuple[int, ...], ...]:
    return _chain_layout(spec.loops)[1]


def break_divisor(spec: ChainSpec) -> Divisor:
    """One chip per loop, ``xi_i`` steps past ``w_i`` along the long arc."""
    if spec.xi is None:
        raise GraphError("chain spec has no xi")
    mg, maps = _chain_layout(spec.loops)
    coeffs = [0] * mg.n
    for (l1, l2), x, m in zip(spec.loops, spec.xi, maps):
        coeffs[m[(l1 + x) % (l1 + l2)]] += 1
    return Divisor(coeffs)


def loop_chip_tau(l1: int, l2: int, xi: int) -> ZPerm:
    """Transmission permutation of the single break chip on one loop.

    The chip is equivalent to ``w + j (w - v)`` exactly when
    ``j * l1 = xi (mod l1 + l2)``; then tau is the simple reflection at j,
    otherwise the identity.
    """
    n = l1 + l2
    k = n // math.gcd(l1, l2)
    for j in range(k):
        if (j * l1 - xi) % n == 0:
            return simple_reflection(k, j)
    return zperm.embed(zperm.identity(), k)


def chain_break_product(spec: ChainSpec) -> ZPerm:
    """Fold the per-loop permutations of the break divisor with ``demazure``."""
    if spec.xi is None:
        raise GraphError("chain spec has no xi")
    taus = [loop_chip_tau(l1, l2, x) for (l1, l2), x in zip(spec.loops, spec.xi)]
    return zperm.demazure_fold(taus)


def genus1_tau(mg: MarkedGraph, d: Divisor) -> Periodic:
    """Closed-form transmission permutation on a genus-1 twice-marked graph."""
    if mg.genus != 1:
        raise GraphError(f"genus1_tau needs genus 1, got {mg.genus}")
    k = torsion_order(mg)
    if k == 1:
        raise GraphError("marked points are linearly equivalent")
    g = mg.graph
    deg = d.degree
    for m in range(k):
        target = g.point(mg.w, m) + g.point(mg.v, deg - m)
        if is_equivalent(g, d, target):
            return zperm.embed(zperm.compose(zperm.shift(deg - 1), simple_reflection(k, m - 1)), k)
    return zperm.embed(zperm.shift(deg - 1), k)
