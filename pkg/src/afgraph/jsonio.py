"""JSON (de)serialization for diagrams, graphs, and realizations.

Parsing validates the document shape and reports the first problem with a
JSON-pointer; structural axioms are then checked by validate_diagram.
Serialization is canonical: fixed key order, entries sorted, two-space
indent, trailing newline, so equal values produce identical bytes.
"""
from __future__ import annotations

import json
from typing import Any

from .errors import InvalidDiagramError, SchemaError
from .model import (
    INFINITE,
    BratteliDiagram,
    Level,
    MultGraph,
    MultMatrix,
    TailStep,
    TailTemplate,
    validate_diagram,
)
from .realize import MaterializedRealization

INFINITE_TOKEN = "inf"


def _loads(text: str) -> Any:
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise SchemaError("", f"not valid JSON: {exc.msg} (line {exc.lineno})") from None


def _expect(obj: Any, typ, pointer: str, what: str):
    if not isinstance(obj, typ) or isinstance(obj, bool) and typ is int:
        raise SchemaError(pointer, f"expected {what}")
    return obj


def _get(obj: dict, key: str, typ, pointer: str, what: str):
    if key not in obj:
        raise SchemaError(f"{pointer}/{key}", f"missing required field ({what})")
    return _expect(obj[key], typ, f"{pointer}/{key}", what)


def _positive_int(obj: Any, pointer: str, what: str, minimum: int = 1) -> int:
    if not isinstance(obj, int) or isinstance(obj, bool) or obj < minimum:
        raise SchemaError(pointer, f"expected {what} (integer >= {minimum})")
    return obj


def _parse_entries(items: Any, pointer: str) -> dict[tuple[str, str], int]:
    _expect(items, list, pointer, "a list of entries")
    entries: dict[tuple[str, str], int] = {}
    for i, item in enumerate(items):
        p = f"{pointer}/{i}"
        _expect(item, dict, p, "an entry object")
        src = _get(item, "src", str, p, "source label")
        dst = _get(item, "dst", str, p, "target label")
        mult = _positive_int(item.get("mult"), f"{p}/mult", "a multiplicity")
        if (src, dst) in entries:
            raise SchemaError(p, f"duplicate entry {src!r}->{dst!r}")
        entries[(src, dst)] = mult
    return entries


def parse_diagram(text: str) -> BratteliDiagram:
    """Parse and validate a diagram document.

    Raises SchemaError (with a JSON-pointer) for shape problems and
    InvalidDiagramError for structural axiom violations.
    """
    obj = _loads(text)
    _expect(obj, dict, "", "a JSON object")
    levels_raw = _get(obj, "levels", list, "", "a list of levels")
    if not levels_raw:
        raise SchemaError("/levels", "diagram needs at least one level")

    levels: list[Level] = []
    for i, lraw in enumerate(levels_raw):
        p = f"/levels/{i}"
        _expect(lraw, dict, p, "a level object")
        index = _positive_int(lraw.get("index"), f"{p}/index", "a level index")
        if index != i + 1:
            raise SchemaError(f"{p}/index", f"levels must be consecutive from 1; expected {i + 1}, got {index}")
        verts_raw = _get(lraw, "vertices", list, p, "a list of vertices")
        verts = []
        for j, vraw in enumerate(verts_raw):
            vp = f"{p}/vertices/{j}"
            _expect(vraw, dict, vp, "a vertex object")
            vid = _get(vraw, "id", str, vp, "a vertex id")
            degree = _positive_int(vraw.get("degree"), f"{vp}/degree", "a degree")
            verts.append((vid, degree))
        try:
            levels.append(Level(index, tuple(verts)))
        except ValueError as exc:
            raise SchemaError(p, str(exc)) from None

    matrices_raw = _get(obj, "matrices", list, "", "a list of matrices")
    matrices: list[MultMatrix] = []
    for i, mraw in enumerate(matrices_raw):
        p = f"/matrices/{i}"
        _expect(mraw, dict, p, "a matrix object")
        from_level = _positive_int(mraw.get("from_level"), f"{p}/from_level", "a level index")
        entries = _parse_entries(_get(mraw, "entries", list, p, "entry list"), f"{p}/entries")
        matrices.append(MultMatrix(from_level, entries))

    tail = None
    if obj.get("tail") is not None:
        tail = _parse_tail(obj["tail"], "/tail")

    try:
        d = BratteliDiagram(tuple(levels), tuple(matrices), tail)
    except ValueError as exc:
        raise SchemaError("", str(exc)) from None
    report = validate_diagram(d)
    if not report.ok:
        raise InvalidDiagramError(report)
    return d


def _parse_tail(obj: Any, pointer: str) -> TailTemplate:
    _expect(obj, dict, pointer, "a tail object")
    start_level = _positive_int(obj.get("start_level"), f"{pointer}/start_level", "a start level", minimum=2)
    period = _positive_int(obj.get("period"), f"{pointer}/period", "a period")
    steps_raw = _get(obj, "matrices", list, pointer, "a list of template matrices")
    steps = []
    for i, sraw in enumerate(steps_raw):
        p = f"{pointer}/matrices/{i}"
        _expect(sraw, dict, p, "a template matrix object")
        targets_raw = _get(sraw, "targets", list, p, "ordered target labels")
        targets = tuple(_expect(t, str, f"{p}/targets/{j}", "a label") for j, t in enumerate(targets_raw))
        entries = _parse_entries(_get(sraw, "entries", list, p, "entry list"), f"{p}/entries")
        try:
            steps.append(TailStep(targets, entries))
        except ValueError as exc:
            raise SchemaError(p, str(exc)) from None
    defects_raw = _get(obj, "defects", dict, pointer, "a defects map")
    defects = {}
    for label, val in defects_raw.items():
        if not isinstance(val, int) or isinstance(val, bool) or val < 0:
            raise SchemaError(f"{pointer}/defects/{label}", "expected a nonnegative integer defect")
        defects[label] = val
    try:
        return TailTemplate(start_level, period, tuple(steps), defects)
    except ValueError as exc:
        raise SchemaError(pointer, str(exc)) from None


def diagram_to_obj(d: BratteliDiagram) -> dict:
    obj: dict[str, Any] = {
        "levels": [
            {"index": lvl.index, "vertices": [{"id": lab, "degree": deg} for lab, deg in lvl.vertices]}
            for lvl in d.levels
        ],
        "matrices": [
            {
                "from_level": m.from_level,
                "entries": [
                    {"src": src, "dst": dst, "mult": m.entries[(src, dst)]} for src, dst in sorted(m.entries)
                ],
            }
            for m in d.matrices
        ],
    }
    if d.tail is not None:
        obj["tail"] = {
            "start_level": d.tail.start_level,
            "period": d.tail.period,
            "matrices": [
                {
                    "targets": list(step.targets),
                    "entries": [
                        {"src": src, "dst": dst, "mult": step.entries[(src, dst)]}
                        for src, dst in sorted(step.entries)
                    ],
                }
                for step in d.tail.steps
            ],
            "defects": {lab: val for lab, val in sorted(d.tail.defects.items())},
        }
    return obj


def dumps(obj: Any) -> str:
    return json.dumps(obj, indent=2, ensure_ascii=False) + "\n"


def serialize_diagram(d: BratteliDiagram) -> str:
    return dumps(diagram_to_obj(d))


def parse_graph(text: str) -> MultGraph:
    """Parse a multigraph document; "mult" is a positive integer or the
    infinite token."""
    obj = _loads(text)
    _expect(obj, dict, "", "a JSON object")
    token = obj.get("infinite_mult_token", INFINITE_TOKEN)
    verts_raw = _get(obj, "vertices", list, "", "a list of vertex labels")
    vertices = tuple(_expect(v, str, f"/vertices/{i}", "a label") for i, v in enumerate(verts_raw))
    edges_raw = _get(obj, "edges", list, "", "a list of edges")
    edges: dict[tuple[str, str], Any] = {}
    for i, eraw in enumerate(edges_raw):
        p = f"/edges/{i}"
        _expect(eraw, dict, p, "an edge object")
        src = _get(eraw, "src", str, p, "source label")
        dst = _get(eraw, "dst", str, p, "target label")
        mult_raw = eraw.get("mult")
        if mult_raw == token:
            mult: Any = INFINITE
        else:
            mult = _positive_int(mult_raw, f"{p}/mult", "a multiplicity or the infinite token")
        if (src, dst) in edges:
            raise SchemaError(p, f"duplicate edge {src!r}->{dst!r}")
        edges[(src, dst)] = mult

    levels = None
    if obj.get("levels") is not None:
        levels_raw = _expect(obj["levels"], dict, "/levels", "a vertex-to-level map")
        levels = {}
        for vid, lvl in levels_raw.items():
            if not isinstance(lvl, int) or isinstance(lvl, bool):
                raise SchemaError(f"/levels/{vid}", "expected an integer level")
            levels[vid] = lvl
    emitters = frozenset(obj.get("infinite_emitters", ()))
    try:
        return MultGraph(vertices, edges, levels=levels, infinite_emitters=emitters)
    except ValueError as exc:
        raise SchemaError("", str(exc)) from None


def graph_to_obj(g: MultGraph) -> dict:
    obj: dict[str, Any] = {
        "vertices": list(g.vertices),
        "edges": [
            {
                "src": src,
                "dst": dst,
                "mult": INFINITE_TOKEN if g.edges[(src, dst)] is INFINITE else g.edges[(src, dst)],
            }
            for src, dst in sorted(g.edges)
        ],
        "infinite_mult_token": INFINITE_TOKEN,
    }
    if g.levels is not None:
        obj["levels"] = {v: g.levels[v] for v in sorted(g.levels)}
    if g.infinite_emitters:
        obj["infinite_emitters"] = sorted(g.infinite_emitters)
    return obj


def serialize_graph(g: MultGraph) -> str:
    return dumps(graph_to_obj(g))


def serialize_realization(mr: MaterializedRealization) -> str:
    obj = graph_to_obj(mr.graph)
    obj["realization"] = {
        "mode": mr.mode,
        "k": mr.k,
        "depth": mr.depth,
        "roles": {name: mr.roles[name] for name in mr.graph.vertices},
        "chain_slots": None
        if mr.chain_slots is None
        else {str(n): [lab, idx] for n, (lab, idx) in sorted(mr.chain_slots.items())},
    }
    return dumps(obj)


def parse_realization(text: str) -> MaterializedRealization:
    graph = parse_graph(text)
    obj = _loads(text)
    meta = _get(obj, "realization", dict, "", "realization metadata")
    mode = _get(meta, "mode", str, "/realization", "mode")
    if mode not in ("separated", "strict"):
        raise SchemaError("/realization/mode", "expected 'separated' or 'strict'")
    k = meta.get("k")
    if not isinstance(k, int) or isinstance(k, bool) or k < 0:
        raise SchemaError("/realization/k", "expected a nonnegative integer")
    depth = _positive_int(meta.get("depth"), "/realization/depth", "a depth")
    roles_raw = _get(meta, "roles", dict, "/realization", "role map")
    roles = {}
    for name, role in roles_raw.items():
        _expect(role, dict, f"/realization/roles/{name}", "a role object")
        if role.get("kind") not in ("h", "x", "z"):
            raise SchemaError(f"/realization/roles/{name}/kind", "expected h, x, or z")
        roles[name] = role
    missing = set(graph.vertices) - set(roles)
    if missing:
        raise SchemaError("/realization/roles", f"vertices without roles: {sorted(missing)}")
    chain_slots = None
    if meta.get("chain_slots") is not None:
        chain_slots = {}
        for key, val in meta["chain_slots"].items():
            p = f"/realization/chain_slots/{key}"
            if not (isinstance(val, list) and len(val) == 2 and isinstance(val[0], str) and isinstance(val[1], int)):
                raise SchemaError(p, "expected [label, index]")
            chain_slots[int(key)] = (val[0], val[1])
    return MaterializedRealization(mode, k, depth, graph, roles, chain_slots)
