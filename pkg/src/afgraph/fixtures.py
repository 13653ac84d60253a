"""Built-in test diagrams and the seeded random diagram generator.

The named fixtures are exact transcriptions of the worked examples this tool
is checked against; their degrees and multiplicities are frozen by golden
files in the test suite.
"""
from __future__ import annotations

import random

from .errors import PreconditionError
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

FIXTURE_NAMES = ("F", "A", "B", "E", "M3", "corner32")


def fixture(name: str) -> "BratteliDiagram | MultGraph":
    """Return a named fixture.

    F, A, B, E: the three-row / two-row family used to exercise the
    properification pipeline (F is separated but not proper, E is the proper
    form, B interpolates, A is the common odd-level telescope).
    M3: a proper separated diagram whose quotient row has degree 3.
    corner32: the two-vertex amplified graph v=>w.
    """
    if name == "F":
        # Rows: u (top, degree 1,2,2,...), v (middle, 1,4,8,12,...),
        # y (bottom, all 1).  Per step: u->v, v->v, y->{u x2, v, y}.
        return BratteliDiagram(
            levels=(Level(1, (("u", 1), ("v", 1), ("y", 1))),),
            matrices=(),
            tail=TailTemplate(
                start_level=2,
                period=1,
                steps=(
                    TailStep(
                        targets=("u", "v", "y"),
                        entries={("u", "v"): 1, ("v", "v"): 1, ("y", "u"): 2, ("y", "v"): 1, ("y", "y"): 1},
                    ),
                ),
                defects={"v": 1},
            ),
        )
    if name == "A":
        # The odd-level telescope of both F and B: middle row 1,8,16,24,...
        return BratteliDiagram(
            levels=(Level(1, (("u", 1), ("v", 1), ("y", 1))),),
            matrices=(),
            tail=TailTemplate(
                start_level=2,
                period=1,
                steps=(
                    TailStep(
                        targets=("u", "v", "y"),
                        entries={("u", "v"): 1, ("v", "v"): 1, ("y", "u"): 2, ("y", "v"): 4, ("y", "y"): 1},
                    ),
                ),
                defects={"v": 2},
            ),
        )
    if name == "B":
        # F with the defect-0 top vertex removed at even levels and its
        # incoming weight rerouted through the bottom row.
        return BratteliDiagram(
            levels=(Level(1, (("u", 1), ("v", 1), ("y", 1))),),
            matrices=(),
            tail=TailTemplate(
                start_level=2,
                period=2,
                steps=(
                    TailStep(
                        targets=("v", "y"),
                        entries={("u", "v"): 1, ("v", "v"): 1, ("y", "v"): 1, ("y", "y"): 1},
                    ),
                    TailStep(
                        targets=("u", "v", "y"),
                        entries={("v", "v"): 1, ("y", "u"): 2, ("y", "v"): 3, ("y", "y"): 1},
                    ),
                ),
                defects={"v": 1},
            ),
        )
    if name == "E":
        # Proper two-row form: top 4,12,20,28,..., bottom all 1, six parallel
        # bottom->top edges per step.
        return BratteliDiagram(
            levels=(Level(1, (("v", 4), ("y", 1))),),
            matrices=(),
            tail=TailTemplate(
                start_level=2,
                period=1,
                steps=(
                    TailStep(
                        targets=("v", "y"),
                        entries={("v", "v"): 1, ("y", "v"): 6, ("y", "y"): 1},
                    ),
                ),
                defects={"v": 2},
            ),
        )
    if name == "M3":
        # Top row 4, 24, 43, 64 then 20(n-1)+4; bottom row constant 3 with
        # six parallel edges into the top row per step.
        step = {("v", "v"): 1, ("y", "v"): 6, ("y", "y"): 1}
        return BratteliDiagram(
            levels=(
                Level(1, (("v", 4), ("y", 3))),
                Level(2, (("v", 24), ("y", 3))),
                Level(3, (("v", 43), ("y", 3))),
                Level(4, (("v", 64), ("y", 3))),
            ),
            matrices=(
                MultMatrix(1, dict(step)),
                MultMatrix(2, dict(step)),
                MultMatrix(3, dict(step)),
            ),
            tail=TailTemplate(
                start_level=5,
                period=1,
                steps=(TailStep(targets=("v", "y"), entries=dict(step)),),
                defects={"v": 2},
            ),
        )
    if name == "corner32":
        return MultGraph(vertices=("v", "w"), edges={("v", "w"): INFINITE})
    raise PreconditionError(f"unknown fixture {name!r} (have {', '.join(FIXTURE_NAMES)})")


def random_diagram(
    seed: int,
    levels: int,
    max_width: int = 4,
    max_mult: int = 3,
    strict: bool = False,
    separated: int | None = None,
) -> BratteliDiagram:
    """Deterministic random diagram that always validates.

    The stream is a Mersenne Twister (random.Random) seeded with `seed`,
    consumed only through randrange/choice; this layout is fixed forever so
    seeds stay reproducible.

    strict=True forces degree >= 2 and a strictly positive defect everywhere
    (the realize_strict preconditions).  separated=k builds a diagram whose
    levels split as H_n plus one chain vertex of constant degree k feeding H
    but never fed by it; combined with strict=True the H-part also gets
    strictly positive defects (the proper form).
    """
    if levels < 1 or max_width < 1 or max_mult < 1:
        raise PreconditionError("levels, max_width, and max_mult must be positive")
    if separated is not None and separated < 1:
        raise PreconditionError("separated quotient degree must be >= 1")
    rng = random.Random(seed)

    if separated is None:
        d = _random_plain(rng, levels, max_width, max_mult, strict)
    else:
        d = _random_separated(rng, levels, max_width, max_mult, strict, separated)
    report = validate_diagram(d)
    assert report.ok, f"generator produced an invalid diagram: {report.summary()}"
    return d


def _labels(width: int) -> tuple[str, ...]:
    return tuple(f"a{i}" for i in range(1, width + 1))


def _random_plain(rng, levels, max_width, max_mult, strict):
    min_deg = 2 if strict else 1
    width = rng.randrange(1, max_width + 1)
    lv = [Level(1, tuple((lab, rng.randrange(min_deg, min_deg + 3)) for lab in _labels(width)))]
    mats = []
    for n in range(2, levels + 1):
        prev = lv[-1]
        width = rng.randrange(1, max_width + 1)
        labels = _labels(width)
        entries: dict[tuple[str, str], int] = {}
        for src in prev.labels:
            # No sinks: every vertex emits at least one edge.
            entries[(src, labels[rng.randrange(width)])] = rng.randrange(1, max_mult + 1)
        for src in prev.labels:
            for dst in labels:
                if (src, dst) not in entries and rng.randrange(3) == 0:
                    entries[(src, dst)] = rng.randrange(1, max_mult + 1)
        verts = []
        for dst in labels:
            inc = sum(mult * prev.degree(src) for (src, d2), mult in entries.items() if d2 == dst)
            lo = 1 if strict else 0
            deg = inc + rng.randrange(lo, lo + 3)
            verts.append((dst, max(deg, min_deg)))
        lv.append(Level(n, tuple(verts)))
        mats.append(MultMatrix(n - 1, entries))
    return BratteliDiagram(tuple(lv), tuple(mats))


def _random_separated(rng, levels, max_width, max_mult, strict, k):
    h_min = 2 if strict else 1
    width = rng.randrange(1, max_width + 1)
    verts = [(lab, rng.randrange(h_min, h_min + 3)) for lab in _labels(width)]
    verts.append(("y", k))
    lv = [Level(1, tuple(verts))]
    mats = []
    for n in range(2, levels + 1):
        prev = lv[-1]
        prev_h = [lab for lab in prev.labels if lab != "y"]
        width = rng.randrange(1, max_width + 1)
        labels = _labels(width)
        entries: dict[tuple[str, str], int] = {("y", "y"): 1}
        # The chain vertex feeds at least one H vertex per level.
        entries[("y", labels[rng.randrange(width)])] = rng.randrange(1, max_mult + 1)
        for src in prev_h:
            entries[(src, labels[rng.randrange(width)])] = rng.randrange(1, max_mult + 1)
        for src in prev_h + ["y"]:
            for dst in labels:
                if (src, dst) not in entries and rng.randrange(3) == 0:
                    entries[(src, dst)] = rng.randrange(1, max_mult + 1)
        verts = []
        for dst in labels:
            inc = sum(mult * prev.degree(src) for (src, d2), mult in entries.items() if d2 == dst)
            lo = 1 if strict else 0
            verts.append((dst, max(inc + rng.randrange(lo, lo + 3), h_min)))
        verts.append(("y", k))
        lv.append(Level(n, tuple(verts)))
        mats.append(MultMatrix(n - 1, entries))
    return BratteliDiagram(tuple(lv), tuple(mats))
