"""Exact data model for leveled multiplicity diagrams and multigraphs.

A diagram is a leveled, sink-free multigraph together with a degree function
satisfying, at every non-initial vertex v,

    d(v) >= sum over incoming edges e of d(source(e)).

Infinite diagrams are presented finitely as a prefix of explicit levels plus
an optional repeating tail template whose degrees are generated by the
recurrence  d_next(v) = sum_w M[w, v] * d_prev(w) + defect(v).

All values are immutable after construction; every operation here is pure.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator, Mapping

from .errors import DepthError, PreconditionError


class _InfiniteMult:
    """Token for a countably infinite edge multiplicity.

    A distinct sentinel, never an integer: arithmetic on it is a bug, and the
    code only ever tests it for presence.
    """

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self) -> str:
        return "inf"


INFINITE = _InfiniteMult()


@dataclass(frozen=True)
class Level:
    """One level of a diagram: an ordered list of (label, degree) pairs."""

    index: int
    vertices: tuple[tuple[str, int], ...]

    def __post_init__(self):
        if self.index < 1:
            raise ValueError(f"level index must be >= 1, got {self.index}")
        seen = set()
        for label, degree in self.vertices:
            if label in seen:
                raise ValueError(f"duplicate label {label!r} at level {self.index}")
            seen.add(label)
            if degree < 1:
                raise ValueError(f"degree of {label!r} at level {self.index} must be >= 1, got {degree}")

    @property
    def labels(self) -> tuple[str, ...]:
        return tuple(label for label, _ in self.vertices)

    def degree(self, label: str) -> int:
        for lab, deg in self.vertices:
            if lab == label:
                return deg
        raise KeyError(f"no vertex {label!r} at level {self.index}")

    def has(self, label: str) -> bool:
        return any(lab == label for lab, _ in self.vertices)


@dataclass(frozen=True)
class MultMatrix:
    """Edge multiplicities between two consecutive levels.

    entries maps (source label, target label) to a positive count; pairs with
    zero multiplicity are simply absent.
    """

    from_level: int
    entries: Mapping[tuple[str, str], int]

    def __post_init__(self):
        for (src, dst), mult in self.entries.items():
            if not isinstance(mult, int) or mult < 1:
                raise ValueError(f"multiplicity {src!r}->{dst!r} must be a positive integer, got {mult!r}")

    def mult(self, src: str, dst: str) -> int:
        return self.entries.get((src, dst), 0)

    def sources(self) -> set[str]:
        return {src for src, _ in self.entries}

    def targets(self) -> set[str]:
        return {dst for _, dst in self.entries}


@dataclass(frozen=True)
class TailStep:
    """One step of a tail template: ordered target labels plus the entry map
    from the previous slot's labels into them."""

    targets: tuple[str, ...]
    entries: Mapping[tuple[str, str], int]

    def __post_init__(self):
        if len(set(self.targets)) != len(self.targets):
            raise ValueError("duplicate labels in tail step targets")
        target_set = set(self.targets)
        for (src, dst), mult in self.entries.items():
            if not isinstance(mult, int) or mult < 1:
                raise ValueError(f"tail multiplicity {src!r}->{dst!r} must be a positive integer, got {mult!r}")
            if dst not in target_set:
                raise ValueError(f"tail entry targets unknown label {dst!r}")


@dataclass(frozen=True)
class TailTemplate:
    """Finite presentation of an eventually periodic infinite tail.

    Level start_level + i is generated with the step at index i mod period.
    A step's sources must be the targets of the preceding step (wrapping
    around), and the last explicit prefix level must carry exactly the labels
    of the final step's targets.  Defects are keyed by label and apply at
    every generated level where the label occurs.
    """

    start_level: int
    period: int
    steps: tuple[TailStep, ...]
    defects: Mapping[str, int]

    def __post_init__(self):
        if self.period < 1 or len(self.steps) != self.period:
            raise ValueError(f"tail must supply exactly one step per period, got {len(self.steps)} for period {self.period}")
        if self.start_level < 2:
            raise ValueError("tail start_level must be >= 2")
        for label, defect in self.defects.items():
            if defect < 0:
                raise ValueError(f"defect of {label!r} must be >= 0, got {defect}")

    def step_for(self, level: int) -> TailStep:
        """Template step generating the given level (level >= start_level)."""
        return self.steps[(level - self.start_level) % self.period]


@dataclass(frozen=True)
class BratteliDiagram:
    """A leveled diagram: explicit prefix levels, the matrices between them,
    and an optional repeating tail."""

    levels: tuple[Level, ...]
    matrices: tuple[MultMatrix, ...]
    tail: TailTemplate | None = None

    def __post_init__(self):
        if not self.levels:
            raise ValueError("diagram needs at least one level")
        if len(self.matrices) != len(self.levels) - 1:
            raise ValueError(f"{len(self.levels)} levels need {len(self.levels) - 1} matrices, got {len(self.matrices)}")

    @property
    def prefix_depth(self) -> int:
        return len(self.levels)

    @property
    def is_finite(self) -> bool:
        return self.tail is None

    def level(self, n: int) -> Level:
        """Explicit level n (1-based).  Tail levels require materialize()."""
        if not 1 <= n <= len(self.levels):
            raise DepthError(f"level {n} not materialized (prefix has {len(self.levels)})")
        return self.levels[n - 1]

    def matrix(self, n: int) -> MultMatrix:
        """The matrix from level n to level n + 1."""
        if not 1 <= n <= len(self.matrices):
            raise DepthError(f"matrix {n}->{n + 1} not materialized")
        return self.matrices[n - 1]

    def degree(self, n: int, label: str) -> int:
        return self.level(n).degree(label)

    def vertices(self) -> Iterator[tuple[int, str]]:
        """All (level, label) pairs of the explicit prefix."""
        for lvl in self.levels:
            for label, _ in lvl.vertices:
                yield lvl.index, label


@dataclass(frozen=True)
class Violation:
    """One broken axiom, with coordinates."""

    code: str
    level: int | None
    vertex: str | None
    message: str

    def __str__(self) -> str:
        where = []
        if self.level is not None:
            where.append(f"level {self.level}")
        if self.vertex is not None:
            where.append(f"vertex {self.vertex!r}")
        loc = " at " + ", ".join(where) if where else ""
        return f"[{self.code}]{loc}: {self.message}"


@dataclass(frozen=True)
class ValidationReport:
    violations: tuple[Violation, ...]

    @property
    def ok(self) -> bool:
        return not self.violations

    def summary(self) -> str:
        if self.ok:
            return "valid"
        return "; ".join(str(v) for v in self.violations)


def incoming_sum(d: BratteliDiagram, n: int, label: str) -> int:
    """Sum of d(source) over the edges into (n, label); 0 at level 1."""
    if n == 1:
        return 0
    m = d.matrix(n - 1)
    prev = d.level(n - 1)
    return sum(mult * prev.degree(src) for (src, dst), mult in m.entries.items() if dst == label)


def defect(d: BratteliDiagram, level: int, vertex: str) -> int:
    """d(v) minus the incoming degree sum at (level, vertex).

    Nonnegative on valid diagrams; equals the degree itself at level 1.
    """
    dd = materialize(d, level) if level > d.prefix_depth else d
    deg = dd.level(level).degree(vertex)
    return deg - incoming_sum(dd, level, vertex)


def validate_diagram(d: BratteliDiagram) -> ValidationReport:
    """Report every broken structural axiom, with coordinates.

    Checks: matrix label integrity, the no-sink axiom (the final level of a
    finite diagram is exempt), the degree inequality at every vertex, and the
    consistency of the tail template.  An empty report means valid.
    """
    out: list[Violation] = []

    for i, m in enumerate(d.matrices):
        n = i + 1
        if m.from_level != n:
            out.append(Violation("matrix-level", n, None, f"matrix {i} claims from_level {m.from_level}, expected {n}"))
        src_labels = set(d.levels[i].labels)
        dst_labels = set(d.levels[i + 1].labels)
        for (src, dst) in sorted(m.entries):
            if src not in src_labels:
                out.append(Violation("dangling-label", n, src, f"matrix {n}->{n + 1} uses unknown source {src!r}"))
            if dst not in dst_labels:
                out.append(Violation("dangling-label", n + 1, dst, f"matrix {n}->{n + 1} uses unknown target {dst!r}"))

    last_checked = d.prefix_depth - 1 if d.tail is None else d.prefix_depth
    for n in range(1, last_checked + 1):
        lvl = d.levels[n - 1]
        if n < d.prefix_depth:
            outgoing = d.matrices[n - 1].sources()
        else:
            outgoing = {src for src, _ in d.tail.steps[0].entries} if d.tail else set()
        for label in lvl.labels:
            if label not in outgoing:
                out.append(Violation("sink", n, label, f"vertex {label!r} at level {n} has no outgoing edge"))

    for n in range(2, d.prefix_depth + 1):
        lvl = d.levels[n - 1]
        prev = d.levels[n - 2]
        m = d.matrices[n - 2]
        for label in lvl.labels:
            deg = lvl.degree(label)
            # Entries with dangling sources are reported above; skip them here.
            inc = sum(
                mult * prev.degree(src)
                for (src, dst), mult in m.entries.items()
                if dst == label and prev.has(src)
            )
            if deg < inc:
                out.append(Violation("degree", n, label, f"degree {deg} < incoming sum {inc}"))

    if d.tail is not None:
        out.extend(_validate_tail(d))

    return ValidationReport(tuple(out))


def _validate_tail(d: BratteliDiagram) -> list[Violation]:
    t = d.tail
    out: list[Violation] = []
    if t.start_level != d.prefix_depth + 1:
        out.append(Violation("tail", None, None, f"tail start_level {t.start_level} != prefix depth + 1 ({d.prefix_depth + 1})"))
        return out

    # Step j draws its sources from the targets of step j - 1 (wrapping), and
    # the last prefix level stands in for the final slot.
    slot_labels = [set(step.targets) for step in t.steps]
    prev_labels = set(d.levels[-1].labels)
    if prev_labels != slot_labels[-1]:
        out.append(Violation("tail", d.prefix_depth, None, f"last prefix level labels {sorted(prev_labels)} != tail slot labels {sorted(slot_labels[-1])}"))
    for j, step in enumerate(t.steps):
        sources = {src for src, _ in step.entries}
        allowed = slot_labels[j - 1]
        for src in sorted(sources - allowed):
            out.append(Violation("tail", None, src, f"tail step {j} uses unknown source {src!r}"))
        nxt = t.steps[(j + 1) % t.period]
        nxt_sources = {src for src, _ in nxt.entries}
        for label in step.targets:
            if label not in nxt_sources:
                out.append(Violation("sink", None, label, f"tail vertex {label!r} (slot {j}) has no outgoing edge"))

    if not out:
        # Probe two full periods so every slot's generated degree is exercised.
        try:
            probe = materialize(d, d.prefix_depth + 2 * t.period)
        except ValueError as exc:
            out.append(Violation("tail", None, None, f"tail generates an invalid level: {exc}"))
    return out


def materialize(d: BratteliDiagram, depth: int) -> BratteliDiagram:
    """The first `depth` levels of d, with tail levels expanded.

    Truncates a longer prefix; idempotent on finite diagrams of length
    >= depth.  The result is always finite (carries no tail).
    """
    if depth < 1:
        raise PreconditionError(f"depth must be >= 1, got {depth}")
    if depth <= d.prefix_depth:
        return BratteliDiagram(d.levels[:depth], d.matrices[: depth - 1], tail=None)
    if d.tail is None:
        raise DepthError(f"insufficient levels: diagram has {d.prefix_depth}, requested {depth}")

    t = d.tail
    levels = list(d.levels)
    matrices = list(d.matrices)
    while len(levels) < depth:
        n = len(levels) + 1
        step = t.step_for(n)
        prev = levels[-1]
        degs: dict[str, int] = {label: t.defects.get(label, 0) for label in step.targets}
        for (src, dst), mult in step.entries.items():
            degs[dst] += mult * prev.degree(src)
        levels.append(Level(n, tuple((label, degs[label]) for label in step.targets)))
        matrices.append(MultMatrix(n - 1, dict(step.entries)))
    return BratteliDiagram(tuple(levels), tuple(matrices), tail=None)


@dataclass(frozen=True)
class MultGraph:
    """A directed graph with edge multiplicities in the positive integers or
    the infinite token.

    `levels` optionally places vertices on integer levels (used for staged
    graphs and for level-ranked rendering).  `infinite_emitters` marks
    vertices whose full edge set is only partially materialized here; sources
    of infinitely-multiple edges count as infinite emitters automatically.
    """

    vertices: tuple[str, ...]
    edges: Mapping[tuple[str, str], "int | _InfiniteMult"]
    levels: Mapping[str, int] | None = None
    infinite_emitters: frozenset[str] = frozenset()

    def __post_init__(self):
        if len(set(self.vertices)) != len(self.vertices):
            raise ValueError("duplicate vertex labels")
        vset = set(self.vertices)
        for (src, dst), mult in self.edges.items():
            if src not in vset or dst not in vset:
                raise ValueError(f"edge {src!r}->{dst!r} references an unknown vertex")
            if mult is not INFINITE and (not isinstance(mult, int) or mult < 1):
                raise ValueError(f"multiplicity of {src!r}->{dst!r} must be a positive integer or infinite, got {mult!r}")

    def out_edges(self, v: str) -> list[tuple[str, "int | _InfiniteMult"]]:
        return sorted((dst, m) for (src, dst), m in self.edges.items() if src == v)

    def in_edges(self, v: str) -> list[tuple[str, "int | _InfiniteMult"]]:
        return sorted((src, m) for (src, dst), m in self.edges.items() if dst == v)

    def successors(self, v: str) -> list[str]:
        return sorted({dst for (src, dst) in self.edges if src == v})

    def predecessors(self, v: str) -> list[str]:
        return sorted({src for (src, dst) in self.edges if dst == v})

    def is_sink(self, v: str) -> bool:
        return not any(src == v for (src, _dst) in self.edges)

    def is_infinite_emitter(self, v: str) -> bool:
        if v in self.infinite_emitters:
            return True
        return any(src == v and m is INFINITE for (src, _dst), m in self.edges.items())

    def sources(self) -> list[str]:
        receiving = {dst for (_src, dst) in self.edges}
        return [v for v in self.vertices if v not in receiving]

    def has_infinite_mult(self) -> bool:
        return any(m is INFINITE for m in self.edges.values())


def is_acyclic(g: MultGraph) -> bool:
    """True when g has no directed cycle."""
    color: dict[str, int] = {}

    def visit(v: str) -> bool:
        color[v] = 1
        for w in g.successors(v):
            c = color.get(w, 0)
            if c == 1:
                return False
            if c == 0 and not visit(w):
                return False
        color[v] = 2
        return True

    return all(visit(v) for v in g.vertices if color.get(v, 0) == 0)


def is_amplified(g: MultGraph) -> bool:
    """True when every present edge has infinite multiplicity."""
    return all(m is INFINITE for m in g.edges.values())


def reachable_from(g: MultGraph, v: str) -> set[str]:
    """Vertices reachable from v by a path of length >= 0."""
    seen = {v}
    stack = [v]
    while stack:
        u = stack.pop()
        for w in g.successors(u):
            if w not in seen:
                seen.add(w)
                stack.append(w)
    return seen


def vertex_name(label: str, level: int) -> str:
    """Canonical flat name for the diagram vertex (level, label)."""
    return f"{label}@{level}"


def diagram_to_graph(d: BratteliDiagram, depth: int) -> MultGraph:
    """The materialized diagram as a plain leveled multigraph.

    Vertices are named label@level; degrees are dropped (use the diagram for
    those).
    """
    dd = materialize(d, depth)
    names: list[str] = []
    levels: dict[str, int] = {}
    for lvl in dd.levels:
        for label, _ in lvl.vertices:
            name = vertex_name(label, lvl.index)
            names.append(name)
            levels[name] = lvl.index
    edges: dict[tuple[str, str], int] = {}
    for m in dd.matrices:
        for (src, dst), mult in m.entries.items():
            edges[(vertex_name(src, m.from_level), vertex_name(dst, m.from_level + 1))] = mult
    return MultGraph(tuple(names), edges, levels=levels)
