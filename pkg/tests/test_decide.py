from __future__ import annotations

import pytest

from afgraph.decide import (
    VERDICT_SEPARATED,
    VERDICT_STRICT,
    VERDICT_UNITAL,
    VERDICT_UNKNOWN,
    classify,
    realize_auto,
)
from afgraph.errors import InvalidDiagramError, PreconditionError
from afgraph.fixtures import fixture, random_diagram
from afgraph.model import BratteliDiagram, Level, MultMatrix
from afgraph.telescope import prefix_isomorphic


def constant_row(k=3, levels=5):
    return BratteliDiagram(
        tuple(Level(n, (("a", k),)) for n in range(1, levels + 1)),
        tuple(MultMatrix(n, {("a", "a"): 1}) for n in range(1, levels)),
    )


class TestClassify:
    def test_m3_separated(self):
        report = classify(fixture("M3"), 6)
        assert report.verdict == VERDICT_SEPARATED
        assert report.proper is True
        assert report.p6prime is True

    def test_f_separated_after_properify(self):
        report = classify(fixture("F"), 6)
        assert report.verdict == VERDICT_SEPARATED
        assert report.proper is False
        assert report.p6prime is True

    def test_constant_row_unital_out_of_scope(self):
        report = classify(constant_row(), 5)
        assert report.verdict == VERDICT_UNITAL
        assert report.unital.witnessed

    def test_strict_random(self):
        d = random_diagram(7, levels=6, max_width=4, strict=True)
        report = classify(d, 6)
        assert report.verdict == VERDICT_STRICT

    def test_unknown_case(self):
        # Separated shape whose ideal part breaks the defect condition: not
        # strict, not realizable via the separated route, not unital.
        d = BratteliDiagram(
            (
                Level(1, (("a", 1), ("y", 1))),
                Level(2, (("b", 1), ("c", 2), ("y", 1))),
                Level(3, (("b", 1), ("c", 4), ("y", 1))),
            ),
            (
                MultMatrix(1, {("a", "b"): 1, ("y", "c"): 1, ("y", "y"): 1}),
                MultMatrix(2, {("b", "b"): 1, ("c", "c"): 1, ("y", "c"): 1, ("y", "y"): 1}),
            ),
        )
        report = classify(d, 3)
        assert report.verdict == VERDICT_UNKNOWN

    def test_invalid_diagram_rejected(self):
        d = BratteliDiagram(
            (Level(1, (("a", 2),)), Level(2, (("b", 2),))),
            (MultMatrix(1, {("a", "b"): 2}),),
        )
        with pytest.raises(InvalidDiagramError):
            classify(d, 2)

    def test_verdict_monotone_in_depth(self):
        cases = [fixture("M3"), fixture("F"), fixture("E")]
        cases += [random_diagram(s, levels=9, max_width=3, strict=True) for s in range(1, 6)]
        cases += [random_diagram(s, levels=9, max_width=3, strict=True, separated=2) for s in range(1, 6)]
        for d in cases:
            verdicts = [classify(d, depth).verdict for depth in (4, 6, 8)]
            realizable = [v for v in verdicts if v in (VERDICT_SEPARATED, VERDICT_STRICT)]
            if realizable:
                first = verdicts.index(realizable[0])
                assert all(v == realizable[0] for v in verdicts[first:])


class TestRealizeAuto:
    def test_m3(self):
        graph, cert, built_from = realize_auto(fixture("M3"), 6)
        assert cert.passed
        assert built_from == fixture("M3")
        assert graph.mode == "separated"

    def test_f_goes_through_properify(self):
        graph, cert, built_from = realize_auto(fixture("F"), 4)
        assert cert.passed
        assert graph.mode == "separated"
        assert built_from != fixture("F")
        assert prefix_isomorphic(built_from, fixture("E"), 4) is not None

    def test_strict_random(self):
        d = random_diagram(11, levels=6, max_width=4, strict=True)
        graph, cert, built_from = realize_auto(d, 6)
        assert cert.passed
        assert graph.mode == "strict"
        assert built_from == d

    def test_out_of_scope_raises(self):
        with pytest.raises(PreconditionError, match="verdict"):
            realize_auto(constant_row(), 5)
