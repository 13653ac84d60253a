"""Shared brute-force oracles, kept deliberately independent of the code
paths they check."""
from __future__ import annotations

import itertools

from afgraph.model import INFINITE, BratteliDiagram, MultGraph


def enumerate_paths_into(g: MultGraph, target: str) -> list[tuple]:
    """Every finite path ending at target, as an explicit tuple of
    (src, dst, copy) edges; parallel edges are distinct copies.  The empty
    tuple is the trivial path."""
    paths: list[tuple] = [()]
    for src, mult in g.in_edges(target):
        assert mult is not INFINITE, "path enumeration needs finite in-multiplicities"
        for sub in enumerate_paths_into(g, src):
            for copy in range(mult):
                paths.append(sub + ((src, target, copy),))
    return paths


def enumerate_level_paths(dd: BratteliDiagram, n1: int, lab1: str, n2: int, lab2: str) -> list[tuple]:
    """Explicit edge-copy paths from (n1, lab1) to (n2, lab2) in a
    materialized diagram."""
    state: list[tuple[tuple, str]] = [((), lab1)]
    for n in range(n1, n2):
        m = dd.matrix(n)
        nxt = []
        for pref, cur in state:
            for (src, dst), mult in sorted(m.entries.items()):
                if src == cur:
                    for copy in range(mult):
                        nxt.append((pref + ((src, dst, copy),), dst))
        state = nxt
    return [pref for pref, cur in state if cur == lab2]


def amplified_dag_shapes(max_vertices: int = 4) -> list[MultGraph]:
    """Fixed enumeration of every acyclic amplified graph shape on up to
    max_vertices ordered vertices (edges only forward along the order)."""
    shapes = []
    for n in range(1, max_vertices + 1):
        verts = tuple("abcd"[:n])
        pairs = [(verts[i], verts[j]) for i in range(n) for j in range(i + 1, n)]
        for bits in range(2 ** len(pairs)):
            edges = {pairs[i]: INFINITE for i in range(len(pairs)) if bits >> i & 1}
            shapes.append(MultGraph(verts, edges))
    return shapes


def monoid_box_members(g: MultGraph, bound: int, apex_cap: int, sub_cap: int):
    """Exhaustive generator-multiset membership over the box |x|_inf <= bound.

    A sum of generator instances is determined, coordinate by coordinate, by
    how many instances sit at each apex (capped at apex_cap per vertex) and
    how the subtractions distribute over instances at in-neighbors (capped at
    sub_cap per instance and coordinate).  Each apex-count vector therefore
    contributes a box of reachable vectors; the union over all apex-count
    vectors, restricted to the bound, is the membership table.

    The caps are generous for this regime: any member of the box is a sum
    needing at most max(x_v, 0) + 1 apexes per vertex and per-coordinate
    subtractions of at most 2 * bound + 1.
    """
    import numpy as np

    verts = list(g.vertices)
    n = len(verts)
    idx = {v: i for i, v in enumerate(verts)}
    preds = [sorted(idx[u] for u in g.predecessors(v)) for v in verts]
    table = np.zeros((2 * bound + 1,) * n, dtype=bool)
    for k in itertools.product(range(apex_cap + 1), repeat=n):
        slices = []
        feasible = True
        for i in range(n):
            supply = sum(k[j] for j in preds[i])
            lo = max(k[i] - sub_cap * supply, -bound)
            hi = min(k[i], bound)
            if lo > hi:
                feasible = False
                break
            slices.append(slice(lo + bound, hi + bound + 1))
        if feasible:
            table[tuple(slices)] = True
    return verts, table


def box_vectors(verts, bound: int):
    for combo in itertools.product(range(-bound, bound + 1), repeat=len(verts)):
        yield dict(zip(verts, combo))
