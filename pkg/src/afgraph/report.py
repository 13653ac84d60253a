"""Report rendering: a per-vertex CSV table and matplotlib figures written
next to the JSON report.

All outputs are byte-deterministic: fixed figure geometry, stripped PNG
metadata, sorted rows.
"""
from __future__ import annotations

import csv
import io
from pathlib import Path

from .model import INFINITE, BratteliDiagram, MultGraph, incoming_sum, materialize
from .realize import MaterializedRealization

_FIGSIZE_PER_LEVEL = 1.6
_SAVEFIG_KWARGS = {"metadata": {"Software": None}, "dpi": 100}


def _plt():
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    return plt


def vertex_table_csv(d: BratteliDiagram, depth: int) -> str:
    """Delimited per-vertex report: level, label, degree, incoming degree
    sum, and defect."""
    dd = materialize(d, depth)
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["level", "label", "degree", "incoming", "defect"])
    for lvl in dd.levels:
        for lab, deg in lvl.vertices:
            inc = incoming_sum(dd, lvl.index, lab)
            writer.writerow([lvl.index, lab, deg, inc, deg - inc])
    return buf.getvalue()


def draw_diagram(d: BratteliDiagram, depth: int):
    """Leveled drawing: one column per level, vertices labeled with their
    degree, edge multiplicities > 1 annotated at the midpoint."""
    plt = _plt()
    dd = materialize(d, depth)
    width = max(len(lvl.vertices) for lvl in dd.levels)
    fig, ax = plt.subplots(figsize=(_FIGSIZE_PER_LEVEL * depth, 1.0 + 0.9 * width))

    pos: dict[tuple[int, str], tuple[float, float]] = {}
    for lvl in dd.levels:
        for row, (lab, _deg) in enumerate(lvl.vertices):
            pos[(lvl.index, lab)] = (float(lvl.index), float(-row))

    for m in dd.matrices:
        for (src, dst) in sorted(m.entries):
            x1, y1 = pos[(m.from_level, src)]
            x2, y2 = pos[(m.from_level + 1, dst)]
            ax.annotate(
                "",
                xy=(x2, y2),
                xytext=(x1, y1),
                arrowprops={"arrowstyle": "->", "color": "0.45", "shrinkA": 14, "shrinkB": 14},
            )
            mult = m.entries[(src, dst)]
            if mult != 1:
                ax.text((x1 + x2) / 2, (y1 + y2) / 2 + 0.08, str(mult), fontsize=8, ha="center", color="0.25")

    for lvl in dd.levels:
        for lab, deg in lvl.vertices:
            x, y = pos[(lvl.index, lab)]
            ax.plot([x], [y], "o", markersize=16, color="#dce6f2", markeredgecolor="#3b5b8c")
            ax.text(x, y, str(deg), fontsize=8, ha="center", va="center")
            ax.text(x, y - 0.32, lab, fontsize=7, ha="center", va="top", color="0.35")

    ax.set_xticks(range(1, depth + 1))
    ax.set_xlabel("level")
    ax.set_yticks([])
    ax.set_xlim(0.4, depth + 0.6)
    ax.set_ylim(-(width - 0.2), 0.8)
    for side in ("top", "right", "left"):
        ax.spines[side].set_visible(False)
    fig.tight_layout()
    return fig


def draw_graph(g: MultGraph | MaterializedRealization):
    """Level-ranked drawing of a multigraph; infinitely multiple edges are
    drawn bold with the infinity sign."""
    plt = _plt()
    if isinstance(g, MaterializedRealization):
        g = g.graph
    levels = g.levels or {v: 0 for v in g.vertices}
    by_level: dict[int, list[str]] = {}
    for v in sorted(g.vertices, key=lambda v: (levels.get(v, 0), v)):
        by_level.setdefault(levels.get(v, 0), []).append(v)
    width = max(len(vs) for vs in by_level.values())
    span = max(by_level) - min(by_level) + 1
    fig, ax = plt.subplots(figsize=(_FIGSIZE_PER_LEVEL * span + 1.2, 1.0 + 0.8 * width))

    pos: dict[str, tuple[float, float]] = {}
    for lvl, vs in sorted(by_level.items()):
        for row, v in enumerate(vs):
            pos[v] = (float(lvl), float(-row))

    for (src, dst) in sorted(g.edges, key=lambda e: (levels.get(e[0], 0), e[0], levels.get(e[1], 0), e[1])):
        mult = g.edges[(src, dst)]
        x1, y1 = pos[src]
        x2, y2 = pos[dst]
        bold = mult is INFINITE
        ax.annotate(
            "",
            xy=(x2, y2),
            xytext=(x1, y1),
            arrowprops={
                "arrowstyle": "->",
                "color": "0.2" if bold else "0.5",
                "lw": 2.0 if bold else 1.0,
                "shrinkA": 12,
                "shrinkB": 12,
            },
        )
        if bold:
            ax.text((x1 + x2) / 2, (y1 + y2) / 2 + 0.1, "∞", fontsize=10, ha="center")
        elif mult != 1:
            ax.text((x1 + x2) / 2, (y1 + y2) / 2 + 0.1, str(mult), fontsize=8, ha="center", color="0.25")

    for v, (x, y) in sorted(pos.items()):
        ax.plot([x], [y], "o", markersize=14, color="#e8f0e0", markeredgecolor="#4a6a2a")
        ax.text(x, y - 0.28, v, fontsize=7, ha="center", va="top", color="0.3")

    ax.set_yticks([])
    ax.set_xticks(sorted(by_level))
    ax.set_xlabel("level")
    for side in ("top", "right", "left"):
        ax.spines[side].set_visible(False)
    fig.tight_layout()
    return fig


def write_report(
    outdir: "str | Path",
    d: BratteliDiagram,
    depth: int,
    report_json: str,
    realization: MaterializedRealization | None = None,
) -> list[Path]:
    """Write report.json, vertices.csv, and diagram.png (plus graph.png when
    a realization is supplied) into outdir.  Returns the written paths."""
    plt = _plt()
    outdir = Path(outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    written = []

    path = outdir / "report.json"
    path.write_text(report_json, encoding="utf-8")
    written.append(path)

    path = outdir / "vertices.csv"
    path.write_text(vertex_table_csv(d, depth), encoding="utf-8")
    written.append(path)

    fig = draw_diagram(d, depth)
    path = outdir / "diagram.png"
    fig.savefig(path, **_SAVEFIG_KWARGS)
    plt.close(fig)
    written.append(path)

    if realization is not None:
        fig = draw_graph(realization)
        path = outdir / "graph.png"
        fig.savefig(path, **_SAVEFIG_KWARGS)
        plt.close(fig)
        written.append(path)

    return written
