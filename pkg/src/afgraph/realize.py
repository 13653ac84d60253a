"""The two diagram-to-graph constructions and their combinatorial verifiers.

Separated mode consumes a proper separated diagram: the ideal part keeps its
internal edges, a finite chain z_1 ... z_k replaces the quotient row (z_k an
infinite emitter feeding each ideal vertex v with the multiplicity m(v) it
used to receive from the chain), and delta(v) = defect(v) - 1 fresh sources
feed each v.

Strict mode consumes a diagram with degree >= 2 and strictly positive defect
everywhere: the diagram's own graph plus delta(v) fresh sources per vertex.

In both cases the degree of every diagram vertex equals the number of finite
paths ending at it in the constructed graph, which is what the verifier
certifies, together with the agreement of all level-to-level multiplicities.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping

from .errors import DepthError, PreconditionError
from .ideals import SeparatedStructure
from .model import BratteliDiagram, Level, MultGraph, MultMatrix, incoming_sum, materialize


def h_name(label: str, level: int) -> str:
    return f"{label}@{level}"


def x_name(i: int, label: str, level: int) -> str:
    return f"x{i}^{label}@{level}"


def z_name(i: int) -> str:
    return f"z{i}"


@dataclass(frozen=True)
class MaterializedRealization:
    """A finite window of a realized graph, with per-vertex role annotations
    tying it back to the source diagram."""

    mode: str
    k: int
    depth: int
    graph: MultGraph
    roles: Mapping[str, dict]
    chain_slots: Mapping[int, tuple[str, int]] | None

    def h_by_level(self) -> dict[int, list[tuple[str, str]]]:
        """Level -> [(vertex name, diagram label)], in graph vertex order."""
        out: dict[int, list[tuple[str, str]]] = {n: [] for n in range(1, self.depth + 1)}
        for name in self.graph.vertices:
            role = self.roles[name]
            if role["kind"] == "h":
                out[role["level"]].append((name, role["label"]))
        return out

    def delta_of(self, name: str) -> int:
        return sum(
            mult for src, mult in self.graph.in_edges(name) if self.roles[src]["kind"] == "x"
        )

    def m_of(self, name: str) -> int:
        if self.k == 0:
            return 0
        zk = z_name(self.k)
        return self.graph.edges.get((zk, name), 0)

    def pathcounts(self) -> dict[str, int]:
        """Number of finite paths ending at each ideal-part vertex, by the
        level recursion  pc(v) = 1 + delta(v) + k*m(v) + sum mult(w,v)*pc(w)
        over ideal predecessors w."""
        pc: dict[str, int] = {}
        by_level = self.h_by_level()
        for n in range(1, self.depth + 1):
            for name, _label in by_level[n]:
                total = 1 + self.delta_of(name) + self.k * self.m_of(name)
                for src, mult in self.graph.in_edges(name):
                    if self.roles[src]["kind"] == "h":
                        total += mult * pc[src]
                pc[name] = total
        return pc


@dataclass(frozen=True)
class RealizedGraph:
    """A staged realized graph: materializes lazily to any depth the source
    diagram supports."""

    mode: str
    k: int
    diagram: BratteliDiagram
    ss: SeparatedStructure | None

    def delta(self, n: int, label: str) -> int:
        dd = materialize(self.diagram, n)
        return dd.level(n).degree(label) - incoming_sum(dd, n, label) - 1

    def m_count(self, n: int, label: str) -> int:
        if self.mode != "separated" or n == 1:
            return 0
        dd = materialize(self.diagram, n)
        return dd.matrix(n - 1).mult(self.ss.y_label(n - 1), label)

    def to_graph(self, depth: int) -> MultGraph:
        return self.materialize(depth).graph

    def materialize(self, depth: int) -> MaterializedRealization:
        if self.mode == "separated":
            return _materialize_separated(self, depth)
        return _materialize_strict(self, depth)


def realize_separated(d: BratteliDiagram, ss: SeparatedStructure) -> RealizedGraph:
    """Build the staged graph for a proper separated diagram.

    Vertices: the ideal part (level by level), the chain z_1 ... z_k, and
    delta(v) sources per ideal vertex.  Edges: ideal-internal edges as in the
    diagram; z_i -> z_k for i < k; z_k -> v with multiplicity m(v); one edge
    from each source.  z_k is the unique infinite emitter.
    """
    window = ss.depth
    dd = materialize(d, window)
    for n in range(1, window + 1):
        y = ss.y_label(n)
        if dd.level(n).degree(y) != ss.k:
            raise PreconditionError(f"chain vertex at level {n} has degree {dd.level(n).degree(y)}, expected {ss.k}")
        h_labels = ss.h_labels(dd, n)
        if n >= 2 and not h_labels:
            raise PreconditionError(f"level {n} has an empty ideal part")
        if n >= 2:
            mat = dd.matrix(n - 1)
            if mat.mult(ss.y_label(n - 1), y) != 1:
                raise PreconditionError(f"chain multiplicity into level {n} is not 1")
            for src in ss.h_labels(dd, n - 1):
                if mat.mult(src, y) != 0:
                    raise PreconditionError(f"ideal vertex {src!r} feeds the chain at level {n}")
        for lab in h_labels:
            delta = dd.level(n).degree(lab) - incoming_sum(dd, n, lab) - 1
            if delta < 0:
                raise PreconditionError(f"non-proper input: defect 0 at level {n} vertex {lab!r}")
    if d.tail is not None and ss.tail_y_label is not None:
        for j, step in enumerate(d.tail.steps):
            if not any(src == ss.tail_y_label and dst != ss.tail_y_label for (src, dst) in step.entries):
                raise PreconditionError(f"tail step {j} never feeds the ideal part, so the emitter would be finite")
    return RealizedGraph("separated", ss.k, d, ss)


def realize_strict(d: BratteliDiagram) -> RealizedGraph:
    """Build the staged graph for a diagram with degree >= 2 and strictly
    positive defect everywhere: the diagram's own edges plus delta(v) fresh
    sources per vertex.  No infinite emitters."""
    window = d.prefix_depth if d.tail is None else d.prefix_depth + 2 * d.tail.period
    dd = materialize(d, window)
    for n in range(1, window + 1):
        for lab in dd.level(n).labels:
            _check_strict_vertex(dd, n, lab)
    return RealizedGraph("strict", 0, d, None)


def _check_strict_vertex(dd: BratteliDiagram, n: int, lab: str) -> None:
    deg = dd.level(n).degree(lab)
    if deg < 2:
        raise PreconditionError(f"strict form needs degree >= 2, vertex {lab!r} at level {n} has {deg}")
    if deg <= incoming_sum(dd, n, lab):
        raise PreconditionError(f"strict form needs a positive defect, vertex {lab!r} at level {n} has none")


def _materialize_separated(rg: RealizedGraph, depth: int) -> MaterializedRealization:
    d, ss, k = rg.diagram, rg.ss, rg.k
    dd = materialize(d, depth)
    names: list[str] = [z_name(i) for i in range(1, k + 1)]
    levels: dict[str, int] = {z_name(i): 0 for i in range(1, k + 1)}
    roles: dict[str, dict] = {z_name(i): {"kind": "z", "index": i} for i in range(1, k + 1)}
    edges: dict[tuple[str, str], int] = {}
    chain_slots: dict[int, tuple[str, int]] = {}

    for i in range(1, k):
        edges[(z_name(i), z_name(k))] = 1

    for n in range(1, depth + 1):
        lvl = dd.level(n)
        y = ss.y_label(n)
        chain_slots[n] = (y, lvl.labels.index(y))
        h_labels = [lab for lab in lvl.labels if lab != y]
        for lab in h_labels:
            delta = lvl.degree(lab) - incoming_sum(dd, n, lab) - 1
            if delta < 0:
                raise PreconditionError(f"non-proper input: defect 0 at level {n} vertex {lab!r}")
            name = h_name(lab, n)
            names.append(name)
            levels[name] = n
            roles[name] = {"kind": "h", "level": n, "label": lab}
            if n >= 2:
                mat = dd.matrix(n - 1)
                m_v = mat.mult(y_prev, lab)
                if m_v:
                    edges[(z_name(k), name)] = m_v
                for src in h_prev:
                    mult = mat.mult(src, lab)
                    if mult:
                        edges[(h_name(src, n - 1), name)] = mult
            for i in range(1, delta + 1):
                xn = x_name(i, lab, n)
                names.append(xn)
                levels[xn] = n
                roles[xn] = {"kind": "x", "index": i, "level": n, "label": lab}
                edges[(xn, name)] = 1
        h_prev, y_prev = h_labels, y

    graph = MultGraph(tuple(names), edges, levels=levels, infinite_emitters=frozenset({z_name(k)}))
    return MaterializedRealization("separated", k, depth, graph, roles, chain_slots)


def _materialize_strict(rg: RealizedGraph, depth: int) -> MaterializedRealization:
    dd = materialize(rg.diagram, depth)
    names: list[str] = []
    levels: dict[str, int] = {}
    roles: dict[str, dict] = {}
    edges: dict[tuple[str, str], int] = {}

    for n in range(1, depth + 1):
        lvl = dd.level(n)
        for lab in lvl.labels:
            _check_strict_vertex(dd, n, lab)
            delta = lvl.degree(lab) - incoming_sum(dd, n, lab) - 1
            name = h_name(lab, n)
            names.append(name)
            levels[name] = n
            roles[name] = {"kind": "h", "level": n, "label": lab}
            if n >= 2:
                mat = dd.matrix(n - 1)
                for src in dd.level(n - 1).labels:
                    mult = mat.mult(src, lab)
                    if mult:
                        edges[(h_name(src, n - 1), name)] = mult
            for i in range(1, delta + 1):
                xn = x_name(i, lab, n)
                names.append(xn)
                levels[xn] = n
                roles[xn] = {"kind": "x", "index": i, "level": n, "label": lab}
                edges[(xn, name)] = 1

    graph = MultGraph(tuple(names), edges, levels=levels)
    return MaterializedRealization("strict", 0, depth, graph, roles, None)


@dataclass(frozen=True)
class CheckRecord:
    kind: str
    level: int
    subject: str
    got: int
    want: int

    @property
    def ok(self) -> bool:
        return self.got == self.want

    def to_dict(self) -> dict:
        return {"kind": self.kind, "level": self.level, "subject": self.subject, "got": self.got, "want": self.want, "ok": self.ok}


@dataclass(frozen=True)
class RealizationCertificate:
    """Outcome of replaying a realization against its source diagram: every
    path-count and multiplicity comparison, in deterministic order."""

    passed: bool
    checks: tuple[CheckRecord, ...]

    @property
    def first_failure(self) -> CheckRecord | None:
        for c in self.checks:
            if not c.ok:
                return c
        return None

    def to_dict(self) -> dict:
        return {
            "passed": self.passed,
            "total_checks": len(self.checks),
            "first_failure": self.first_failure.to_dict() if self.first_failure else None,
            "checks": [c.to_dict() for c in self.checks],
        }


def _as_materialized(g, depth: int) -> MaterializedRealization:
    if isinstance(g, RealizedGraph):
        return g.materialize(depth)
    if isinstance(g, MaterializedRealization):
        if g.depth < depth:
            raise DepthError(f"realization materialized to {g.depth} levels, need {depth}")
        return g
    raise PreconditionError(f"not a realized graph: {type(g).__name__}")


def verify_realization(g, d: BratteliDiagram, depth: int) -> RealizationCertificate:
    """Certify that the realized graph reproduces the diagram through `depth`
    levels: path counts equal degrees, internal multiplicities match, and in
    separated mode the chain multiplicities match the old quotient row."""
    mr = _as_materialized(g, depth)
    dd = materialize(d, depth)
    by_level = mr.h_by_level()

    for n in range(1, depth + 1):
        lvl = dd.level(n)
        for _name, label in by_level[n]:
            if not lvl.has(label):
                raise PreconditionError(f"annotation mismatch: no vertex {label!r} at level {n} of the diagram")
        if mr.mode == "separated" and not lvl.has(mr.chain_slots[n][0]):
            raise PreconditionError(
                f"annotation mismatch: no chain vertex {mr.chain_slots[n][0]!r} at level {n} of the diagram"
            )

    pc = mr.pathcounts()
    checks: list[CheckRecord] = []
    for n in range(1, depth + 1):
        lvl = dd.level(n)
        for name, label in by_level[n]:
            checks.append(CheckRecord("pathcount", n, label, pc[name], lvl.degree(label)))
        if mr.mode == "separated":
            y = mr.chain_slots[n][0]
            checks.append(CheckRecord("chain-degree", n, y, mr.k, lvl.degree(y)))
        if n < depth:
            mat = dd.matrix(n)
            for src_name, src in by_level[n]:
                for dst_name, dst in by_level[n + 1]:
                    got = mr.graph.edges.get((src_name, dst_name), 0)
                    checks.append(CheckRecord("mult", n, f"{src}->{dst}", got, mat.mult(src, dst)))
            if mr.mode == "separated":
                y = mr.chain_slots[n][0]
                y_next = mr.chain_slots[n + 1][0]
                checks.append(CheckRecord("chain-mult", n, f"{y}->{y_next}", 1, mat.mult(y, y_next)))
                for dst_name, dst in by_level[n + 1]:
                    checks.append(CheckRecord("chain-mult", n, f"{y}->{dst}", mr.m_of(dst_name), mat.mult(y, dst)))

    passed = all(c.ok for c in checks)
    return RealizationCertificate(passed, tuple(checks))


def reconstruct_diagram(g, depth: int) -> BratteliDiagram:
    """Rebuild the diagram of the realized graph's canonical filtration:
    level n holds the ideal vertices (degree = path count) plus, in separated
    mode, the chain slot of degree k at its recorded position; multiplicities
    are read off the graph.  For a faithful realization this reproduces the
    source diagram exactly."""
    mr = _as_materialized(g, depth)
    pc = mr.pathcounts()
    by_level = mr.h_by_level()

    levels: list[Level] = []
    for n in range(1, depth + 1):
        verts = [(label, pc[name]) for name, label in by_level[n]]
        if mr.mode == "separated":
            y, idx = mr.chain_slots[n]
            verts.insert(idx, (y, mr.k))
        levels.append(Level(n, tuple(verts)))

    matrices: list[MultMatrix] = []
    for n in range(1, depth):
        entries: dict[tuple[str, str], int] = {}
        for src_name, src in by_level[n]:
            for dst_name, dst in by_level[n + 1]:
                mult = mr.graph.edges.get((src_name, dst_name), 0)
                if mult:
                    entries[(src, dst)] = mult
        if mr.mode == "separated":
            y = mr.chain_slots[n][0]
            entries[(y, mr.chain_slots[n + 1][0])] = 1
            for dst_name, dst in by_level[n + 1]:
                m_v = mr.m_of(dst_name)
                if m_v:
                    entries[(y, dst)] = m_v
        matrices.append(MultMatrix(n, entries))

    return BratteliDiagram(tuple(levels), tuple(matrices))
