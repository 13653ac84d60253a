"""Hereditary/saturated vertex sets, unitality witnessing, and recognition of
diagrams that split as an ideal part plus a constant-degree quotient chain.

A vertex set is hereditary when edges leaving it stay inside it, and
saturated when any regular vertex whose successors all lie inside must itself
lie inside.  For a diagram, the ideal part H of a separated split is exactly
such a set, level by level.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Mapping

from .errors import DepthError, PreconditionError
from .model import BratteliDiagram, MultGraph, materialize


def is_hereditary_set(g: MultGraph, s: frozenset) -> bool:
    return all(dst in s for (src, dst) in g.edges if src in s)


def is_saturated_set(g: MultGraph, s: frozenset) -> bool:
    for v in g.vertices:
        if v in s or g.is_sink(v) or g.is_infinite_emitter(v):
            continue
        if all(w in s for w in g.successors(v)):
            return False
    return True


def saturated_hereditary_closure(g, seed, depth: int | None = None) -> frozenset:
    """Smallest saturated hereditary superset of seed.

    Fixed-point iteration of the two closure rules.  Infinite emitters are
    never forced in by saturation.  A staged graph (anything exposing
    to_graph) needs an explicit depth bound.
    """
    if hasattr(g, "to_graph"):
        if depth is None:
            raise PreconditionError("staged graph needs a depth bound for closure")
        g = g.to_graph(depth)
    closed = set(seed)
    unknown = set(seed) - set(g.vertices)
    if unknown:
        raise PreconditionError(f"seed contains unknown vertices: {sorted(unknown)}")
    changed = True
    while changed:
        changed = False
        for (src, dst) in g.edges:
            if src in closed and dst not in closed:
                closed.add(dst)
                changed = True
        for v in g.vertices:
            if v in closed or g.is_sink(v) or g.is_infinite_emitter(v):
                continue
            if all(w in closed for w in g.successors(v)):
                closed.add(v)
                changed = True
    return frozenset(closed)


def enumerate_saturated_hereditary(g: MultGraph, cap: int = 14) -> list[frozenset]:
    """Every saturated hereditary subset of a finite graph, smallest first.

    Always contains the empty set and the full vertex set.  Exhaustive over
    all subsets, so refuses graphs beyond the cap.
    """
    if len(g.vertices) > cap:
        raise PreconditionError(f"graph too large to enumerate ({len(g.vertices)} > cap {cap})")
    out = []
    for r in range(len(g.vertices) + 1):
        for combo in itertools.combinations(g.vertices, r):
            s = frozenset(combo)
            if is_hereditary_set(g, s) and is_saturated_set(g, s):
                out.append(s)
    return sorted(out, key=lambda s: (len(s), tuple(sorted(s))))


def row_set(d: BratteliDiagram, rows, depth: int) -> dict[int, frozenset]:
    """Per-level membership sets selecting the given labels wherever they
    occur through `depth` levels."""
    rows = frozenset(rows)
    dd = materialize(d, depth)
    return {lvl.index: frozenset(lab for lab in lvl.labels if lab in rows) for lvl in dd.levels}


def diagram_set_is_hereditary(d: BratteliDiagram, s: Mapping[int, frozenset], depth: int) -> bool:
    dd = materialize(d, depth)
    for m in dd.matrices:
        src_set = s.get(m.from_level, frozenset())
        dst_set = s.get(m.from_level + 1, frozenset())
        for (src, dst) in m.entries:
            if src in src_set and dst not in dst_set:
                return False
    return True


def diagram_set_is_saturated(d: BratteliDiagram, s: Mapping[int, frozenset], depth: int) -> bool:
    """Saturation within the window: a vertex whose (known) successors all lie
    in the set must lie in the set.  Final-level vertices are skipped, since
    their edges are not visible at this depth."""
    dd = materialize(d, depth)
    for m in dd.matrices:
        n = m.from_level
        dst_set = s.get(n + 1, frozenset())
        for lab in dd.level(n).labels:
            if lab in s.get(n, frozenset()):
                continue
            succs = {dst for (src, dst) in m.entries if src == lab}
            if succs and succs <= dst_set:
                return False
    return True


@dataclass(frozen=True)
class UnitalityResult:
    """Outcome of the bounded unitality check.

    witnessed is True when every vertex within the window reaches some vertex
    whose degree equals its full level-1 path sum.  False never asserts
    nonunitality, only the absence of a witness at this depth.
    """

    witnessed: bool
    depth: int
    witnesses: Mapping[tuple[int, str], tuple[int, str]]
    unwitnessed: tuple[tuple[int, str], ...]

    @property
    def status(self) -> str:
        return "UnitalWitnessed" if self.witnessed else "NoWitnessAtDepth"


def is_unital(d: BratteliDiagram, depth: int) -> UnitalityResult:
    """Bounded-depth unitality witness search.

    full(v) sums d(source) over all paths from level 1 into v; a vertex with
    full(v) = d(v) witnesses itself, and the witness propagates to everything
    that reaches it.
    """
    dd = materialize(d, depth)
    full: dict[tuple[int, str], int] = {}
    for lab, deg in dd.level(1).vertices:
        full[(1, lab)] = deg
    for n in range(2, depth + 1):
        m = dd.matrix(n - 1)
        for lab in dd.level(n).labels:
            full[(n, lab)] = sum(
                mult * full[(n - 1, src)] for (src, dst), mult in m.entries.items() if dst == lab
            )

    witnesses: dict[tuple[int, str], tuple[int, str]] = {}
    for n in range(depth, 0, -1):
        lvl = dd.level(n)
        fwd = dd.matrix(n).entries if n < depth else {}
        for lab in lvl.labels:
            v = (n, lab)
            if full[v] == lvl.degree(lab):
                witnesses[v] = v
                continue
            for nxt in dd.level(n + 1).labels if n < depth else ():
                if (lab, nxt) in fwd and (n + 1, nxt) in witnesses:
                    witnesses[v] = witnesses[(n + 1, nxt)]
                    break

    unwitnessed = tuple(v for v in sorted(full) if v not in witnesses)
    return UnitalityResult(not unwitnessed, depth, witnesses, unwitnessed)


def detect_mk_tail(
    d: BratteliDiagram, s: Mapping[int, frozenset], depth: int
) -> tuple[int, int] | None:
    """First level m from which every level through `depth` has exactly one
    vertex outside s, of constant degree k.  Returns (m, k) or None.

    One aberrant level resets the candidate, so the window [m, depth] is
    uniform by construction.
    """
    dd = materialize(d, depth)
    m_cand: int | None = None
    k_cand: int | None = None
    for lvl in dd.levels:
        outside = [lab for lab in lvl.labels if lab not in s.get(lvl.index, frozenset())]
        if len(outside) == 1:
            deg = lvl.degree(outside[0])
            if m_cand is None:
                m_cand, k_cand = lvl.index, deg
            elif deg != k_cand:
                m_cand, k_cand = lvl.index, deg
        else:
            m_cand = k_cand = None
    if m_cand is None:
        return None
    return m_cand, k_cand


@dataclass(frozen=True)
class SeparatedStructure:
    """A recognized split of each level into an ideal part H_n and one chain
    vertex y_n of constant degree k.

    y_labels covers the inspected window; tail_y_label, when set, extends the
    chain through a repeating tail so staged constructions can run to any
    depth.
    """

    k: int
    y_labels: tuple[str, ...]
    tail_y_label: str | None = None

    @property
    def depth(self) -> int:
        return len(self.y_labels)

    def y_label(self, n: int) -> str:
        if 1 <= n <= len(self.y_labels):
            return self.y_labels[n - 1]
        if self.tail_y_label is not None:
            return self.tail_y_label
        raise DepthError(f"separated structure only covers {len(self.y_labels)} levels, asked for {n}")

    def h_labels(self, d: BratteliDiagram, n: int) -> tuple[str, ...]:
        y = self.y_label(n)
        return tuple(lab for lab in d.level(n).labels if lab != y)

    def h_sets(self, d: BratteliDiagram, depth: int) -> dict[int, frozenset]:
        dd = materialize(d, depth)
        return {n: frozenset(self.h_labels(dd, n)) for n in range(1, depth + 1)}

    def to_dict(self) -> dict:
        return {"k": self.k, "y_labels": list(self.y_labels), "tail_y_label": self.tail_y_label}


def recognize_separated(d: BratteliDiagram, depth: int) -> tuple[SeparatedStructure, bool] | None:
    """Find the split of d into an ideal part plus a degree-k chain, through
    `depth` levels, and report whether it is proper there.

    The chain must satisfy, between consecutive levels: exactly one edge
    y_n -> y_{n+1}, no edges from the rest of the level into y_{n+1}, at
    least one edge from y_n into the rest, and constant degree k.  Proper
    additionally requires a strictly positive defect at every non-chain
    vertex.  The search tries every level-1 vertex as the chain start and
    backtracks over continuations; the first full chain (in level order)
    wins.
    """
    if depth < 2:
        raise PreconditionError("separated recognition needs depth >= 2")
    dd = materialize(d, depth)

    def extend(chain: list[str]) -> list[str] | None:
        n = len(chain)
        if n == depth:
            return chain
        m = dd.matrix(n)
        lvl_next = dd.level(n + 1)
        y = chain[-1]
        others = [lab for lab in dd.level(n).labels if lab != y]
        # At the window boundary several continuations can qualify; prefer
        # keeping the chain's label so templated tails recognize stably.
        ordered = sorted(lvl_next.labels, key=lambda w: (w != y, lvl_next.labels.index(w)))
        for w in ordered:
            if m.mult(y, w) != 1:
                continue
            if any(m.mult(h, w) > 0 for h in others):
                continue
            if lvl_next.degree(w) != dd.level(1).degree(chain[0]):
                continue
            if not any(m.mult(y, x) > 0 for x in lvl_next.labels if x != w):
                continue  # the chain vertex must also feed the ideal part
            got = extend(chain + [w])
            if got is not None:
                return got
        return None

    for y1 in dd.level(1).labels:
        chain = extend([y1])
        if chain is None:
            continue
        k = dd.level(1).degree(y1)
        tail_y = None
        if d.tail is not None and depth >= d.tail.start_level:
            labels = {chain[n - 1] for n in range(d.tail.start_level, depth + 1)}
            if len(labels) == 1:
                tail_y = labels.pop()
        ss = SeparatedStructure(k, tuple(chain), tail_y)
        proper = _is_proper(dd, ss, depth)
        return ss, proper
    return None


def _is_proper(dd: BratteliDiagram, ss: SeparatedStructure, depth: int) -> bool:
    for n in range(2, depth + 1):
        m = dd.matrix(n - 1)
        prev = dd.level(n - 1)
        for lab in ss.h_labels(dd, n):
            inc = sum(mult * prev.degree(src) for (src, dst), mult in m.entries.items() if dst == lab)
            if dd.level(n).degree(lab) <= inc:
                return False
    return True
