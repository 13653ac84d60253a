from __future__ import annotations

import itertools

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from afgraph.errors import PreconditionError
from afgraph.fixtures import fixture, random_diagram
from afgraph.ideals import (
    detect_mk_tail,
    diagram_set_is_hereditary,
    diagram_set_is_saturated,
    enumerate_saturated_hereditary,
    is_hereditary_set,
    is_saturated_set,
    is_unital,
    recognize_separated,
    row_set,
    saturated_hereditary_closure,
)
from afgraph.model import INFINITE, BratteliDiagram, Level, MultGraph, MultMatrix, materialize
from afgraph.realize import realize_separated


def small_graphs():
    """Hypothesis strategy: graphs on up to 5 vertices with multiplicities in
    {1, 2, inf}."""
    @st.composite
    def build(draw):
        n = draw(st.integers(1, 5))
        verts = tuple("abcde"[:n])
        edges = {}
        for src in verts:
            for dst in verts:
                kind = draw(st.sampled_from(["none", "none", "one", "two", "inf"]))
                if kind == "one":
                    edges[(src, dst)] = 1
                elif kind == "two":
                    edges[(src, dst)] = 2
                elif kind == "inf":
                    edges[(src, dst)] = INFINITE
        return MultGraph(verts, edges)

    return build()


class TestClosure:
    def test_empty_seed(self):
        g = fixture("corner32")
        assert saturated_hereditary_closure(g, frozenset()) == frozenset()

    def test_hereditary_rule(self):
        g = fixture("corner32")
        assert saturated_hereditary_closure(g, {"v"}) == {"v", "w"}

    def test_bare_chain_saturates_backwards(self):
        g = MultGraph(("u", "v", "w"), {("u", "v"): 1, ("v", "w"): 1})
        assert saturated_hereditary_closure(g, {"w"}) == {"u", "v", "w"}

    def test_side_edge_blocks_saturation(self):
        g = MultGraph(("u", "v", "w", "x"), {("u", "v"): 1, ("v", "w"): 1, ("v", "x"): 1})
        assert saturated_hereditary_closure(g, {"w"}) == {"w"}

    def test_infinite_emitter_never_saturated_in(self):
        # v emits infinitely; even with every successor inside, v stays out.
        g = MultGraph(("v", "w"), {("v", "w"): INFINITE})
        assert saturated_hereditary_closure(g, {"w"}) == {"w"}

    def test_staged_graph_needs_depth(self):
        rec = recognize_separated(fixture("M3"), 6)
        rg = realize_separated(fixture("M3"), rec[0])
        with pytest.raises(PreconditionError, match="depth"):
            saturated_hereditary_closure(rg, frozenset())
        closed = saturated_hereditary_closure(rg, {"v@2"}, depth=5)
        assert "v@3" in closed and "z3" not in closed


class TestEnumerate:
    def test_single_vertex(self):
        g = MultGraph(("v",), {})
        assert enumerate_saturated_hereditary(g) == [frozenset(), frozenset({"v"})]

    def test_amplified_pair(self):
        g = fixture("corner32")
        assert enumerate_saturated_hereditary(g) == [frozenset(), frozenset({"w"}), frozenset({"v", "w"})]

    def test_two_isolated(self):
        g = MultGraph(("a", "b"), {})
        assert len(enumerate_saturated_hereditary(g)) == 4

    def test_cap(self):
        g = MultGraph(tuple(f"v{i}" for i in range(20)), {})
        with pytest.raises(PreconditionError, match="too large"):
            enumerate_saturated_hereditary(g)


@settings(max_examples=60, deadline=None)
@given(g=small_graphs(), data=st.data())
def test_closure_properties(g, data):
    seed = frozenset(data.draw(st.sets(st.sampled_from(list(g.vertices)))))
    closed = saturated_hereditary_closure(g, seed)
    # extensive
    assert seed <= closed
    # idempotent
    assert saturated_hereditary_closure(g, closed) == closed
    # monotone
    bigger = frozenset(seed | data.draw(st.sets(st.sampled_from(list(g.vertices)))))
    assert closed <= saturated_hereditary_closure(g, bigger)
    # closed and smallest among the enumerated family
    family = enumerate_saturated_hereditary(g)
    assert closed in family
    for member in family:
        if seed <= member:
            assert closed <= member


class TestUnitality:
    def test_constant_row_every_vertex_its_own_witness(self):
        d = BratteliDiagram(
            tuple(Level(n, (("a", 3),)) for n in (1, 2, 3)),
            tuple(MultMatrix(n, {("a", "a"): 1}) for n in (1, 2)),
        )
        res = is_unital(d, 3)
        assert res.witnessed
        assert all(res.witnesses[v] == v for v in res.witnesses)

    def test_e_fixture_has_no_witness_on_top_row(self):
        res = is_unital(fixture("E"), 6)
        assert not res.witnessed
        assert res.status == "NoWitnessAtDepth"
        assert set(res.unwitnessed) == {(n, "v") for n in range(2, 7)}

    def test_m3_chain_row_witnessed(self):
        res = is_unital(fixture("M3"), 5)
        for n in range(1, 6):
            assert res.witnesses[(n, "y")] == (n, "y")

    def test_witness_propagation_matches_direct_sums(self):
        # A witnessed vertex must itself satisfy the full path-sum equality.
        for name in ("F", "B", "E", "M3"):
            d = fixture(name)
            depth = 6
            res = is_unital(d, depth)
            dd = materialize(d, depth)
            full = {}
            for lab, deg in dd.level(1).vertices:
                full[(1, lab)] = deg
            for n in range(2, depth + 1):
                m = dd.matrix(n - 1)
                for lab in dd.level(n).labels:
                    full[(n, lab)] = sum(
                        mult * full[(n - 1, src)] for (src, dst), mult in m.entries.items() if dst == lab
                    )
            for v in full:
                assert (v in res.witnesses) == (full[v] == dd.level(v[0]).degree(v[1]))


class TestDetectTail:
    def test_m3_top_row(self):
        d = fixture("M3")
        assert detect_mk_tail(d, row_set(d, {"v"}, 6), 6) == (1, 3)

    def test_f_two_rows(self):
        d = fixture("F")
        assert detect_mk_tail(d, row_set(d, {"u", "v"}, 6), 6) == (1, 1)

    def test_two_vertex_complement_absent(self):
        d = fixture("F")
        assert detect_mk_tail(d, row_set(d, {"u"}, 6), 6) is None

    def test_aberrant_level_resets(self):
        # Complement degree changes at level 2, so the window starts there.
        d = BratteliDiagram(
            (Level(1, (("a", 1), ("x", 1))), Level(2, (("a", 2), ("x", 2))), Level(3, (("a", 4), ("x", 2)))),
            (
                MultMatrix(1, {("a", "a"): 2, ("x", "x"): 2}),
                MultMatrix(2, {("a", "a"): 2, ("x", "x"): 1}),
            ),
        )
        assert detect_mk_tail(d, row_set(d, {"a"}, 3), 3) == (2, 2)


class TestRecognizeSeparated:
    def test_m3(self):
        ss, proper = recognize_separated(fixture("M3"), 6)
        assert ss.k == 3 and proper
        assert ss.y_labels == ("y",) * 6
        assert ss.tail_y_label == "y"

    def test_e(self):
        ss, proper = recognize_separated(fixture("E"), 6)
        assert ss.k == 1 and proper

    def test_f_not_proper(self):
        ss, proper = recognize_separated(fixture("F"), 6)
        assert ss.k == 1 and not proper

    def test_single_row_is_not_separated(self):
        d = BratteliDiagram(
            tuple(Level(n, (("a", 3),)) for n in (1, 2, 3)),
            tuple(MultMatrix(n, {("a", "a"): 1}) for n in (1, 2)),
        )
        assert recognize_separated(d, 3) is None

    def test_recognized_ideal_part_is_hereditary_and_saturated(self):
        for name in ("F", "E", "M3"):
            d = fixture(name)
            ss, _ = recognize_separated(d, 6)
            h = ss.h_sets(d, 6)
            assert diagram_set_is_hereditary(d, h, 6)
            assert diagram_set_is_saturated(d, h, 6)

    def test_separated_seed_sweep(self):
        for seed in range(1, 21):
            d = random_diagram(seed, levels=6, max_width=3, max_mult=3, separated=2)
            rec = recognize_separated(d, 6)
            assert rec is not None and rec[0].k == 2


def test_predicates_against_exhaustive_subsets():
    g = MultGraph(("a", "b", "c"), {("a", "b"): 1, ("b", "c"): INFINITE})
    family = set(enumerate_saturated_hereditary(g))
    for r in range(4):
        for combo in itertools.combinations(g.vertices, r):
            s = frozenset(combo)
            assert (s in family) == (is_hereditary_set(g, s) and is_saturated_set(g, s))
