"""Deterministic DOT export for diagrams and multigraphs.

Vertices are ordered by (level, label); diagrams render left to right with
one rank per level; finite multiplicities become integer edge labels and the
infinite token a bold edge labeled with the infinity sign.
"""
from __future__ import annotations

from .model import INFINITE, BratteliDiagram, MultGraph, materialize, vertex_name
from .realize import MaterializedRealization, RealizedGraph


def _quote(s: str) -> str:
    return '"' + s.replace("\\", "\\\\").replace('"', '\\"') + '"'


def export_dot(obj, depth: int | None = None) -> str:
    """Render a diagram, graph, or realization as DOT text; byte-identical
    across runs for equal input."""
    if isinstance(obj, BratteliDiagram):
        return _dot_diagram(obj, depth)
    if isinstance(obj, RealizedGraph):
        if depth is None:
            raise ValueError("a staged realization needs a depth to export")
        obj = obj.materialize(depth)
    if isinstance(obj, MaterializedRealization):
        return _dot_graph(obj.graph)
    if isinstance(obj, MultGraph):
        return _dot_graph(obj)
    raise TypeError(f"cannot export {type(obj).__name__} as DOT")


def _dot_diagram(d: BratteliDiagram, depth: int | None) -> str:
    dd = materialize(d, depth) if depth is not None else materialize(d, d.prefix_depth)
    lines = ["digraph diagram {", "  rankdir=LR;", "  node [shape=circle];"]
    for lvl in dd.levels:
        names = "; ".join(_quote(vertex_name(lab, lvl.index)) for lab in lvl.labels)
        lines.append(f"  {{ rank=same; {names}; }}")
    for lvl in dd.levels:
        for lab, deg in lvl.vertices:
            lines.append(f"  {_quote(vertex_name(lab, lvl.index))} [label={_quote(f'{lab}:{deg}')}];")
    for m in dd.matrices:
        for src, dst in sorted(m.entries):
            mult = m.entries[(src, dst)]
            attr = f" [label={_quote(str(mult))}]" if mult != 1 else ""
            lines.append(
                f"  {_quote(vertex_name(src, m.from_level))} -> {_quote(vertex_name(dst, m.from_level + 1))}{attr};"
            )
    lines.append("}")
    return "\n".join(lines) + "\n"


def _sort_key(g: MultGraph):
    levels = g.levels or {}

    def key(v: str):
        return (levels.get(v, 0), v)

    return key


def _dot_graph(g: MultGraph) -> str:
    key = _sort_key(g)
    ordered = sorted(g.vertices, key=key)
    lines = ["digraph graph_ {", "  rankdir=LR;", "  node [shape=circle];"]
    if g.levels:
        by_level: dict[int, list[str]] = {}
        for v in ordered:
            by_level.setdefault(g.levels.get(v, 0), []).append(v)
        for lvl in sorted(by_level):
            names = "; ".join(_quote(v) for v in by_level[lvl])
            lines.append(f"  {{ rank=same; {names}; }}")
    for v in ordered:
        lines.append(f"  {_quote(v)};")
    for src, dst in sorted(g.edges, key=lambda e: (key(e[0]), key(e[1]))):
        mult = g.edges[(src, dst)]
        if mult is INFINITE:
            attr = ' [style=bold, label="∞"]'
        elif mult != 1:
            attr = f" [label={_quote(str(mult))}]"
        else:
            attr = ""
        lines.append(f"  {_quote(src)} -> {_quote(dst)}{attr};")
    lines.append("}")
    return "\n".join(lines) + "\n"
