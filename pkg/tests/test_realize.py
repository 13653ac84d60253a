from __future__ import annotations

import pytest

from afgraph.errors import PreconditionError
from afgraph.fixtures import fixture, random_diagram
from afgraph.ideals import SeparatedStructure, recognize_separated
from afgraph.model import BratteliDiagram, Level, MultMatrix, materialize
from afgraph.realize import (
    MaterializedRealization,
    realize_separated,
    realize_strict,
    reconstruct_diagram,
    verify_realization,
)
from afgraph.telescope import prefix_isomorphic

from helpers import enumerate_paths_into


def m3_realized(depth=8):
    d = fixture("M3")
    ss, proper = recognize_separated(d, depth)
    assert proper
    return realize_separated(d, ss)


def strict_chain():
    return BratteliDiagram(
        (Level(1, (("a", 2),)), Level(2, (("a", 5),)), Level(3, (("a", 11),))),
        (MultMatrix(1, {("a", "a"): 2}), MultMatrix(2, {("a", "a"): 2})),
    )


class TestRealizeSeparated:
    def test_m3_structure(self):
        mr = m3_realized().materialize(5)
        g = mr.graph
        # Chain: z1 -> z3, z2 -> z3; z3 is the unique infinite emitter.
        assert g.edges[("z1", "z3")] == 1
        assert g.edges[("z2", "z3")] == 1
        assert ("z1", "z2") not in g.edges
        assert g.is_infinite_emitter("z3")
        emitters = [v for v in g.vertices if g.is_infinite_emitter(v)]
        assert emitters == ["z3"]
        # z3 feeds every ideal vertex beyond level 1 with multiplicity 6.
        for n in range(2, 6):
            assert g.edges[("z3", f"v@{n}")] == 6
        assert ("z3", "v@1") not in g.edges

    def test_m3_source_counts(self):
        rg = m3_realized()
        assert [rg.delta(n, "v") for n in (1, 2, 3, 4)] == [3, 1, 0, 2]
        mr = rg.materialize(4)
        for n, want in zip((1, 2, 3, 4), (3, 1, 0, 2)):
            xs = [v for v in mr.graph.vertices if mr.roles[v]["kind"] == "x" and mr.roles[v]["level"] == n]
            assert len(xs) == want

    def test_e_realization_has_no_chain_edges(self):
        d = fixture("E")
        ss, _ = recognize_separated(d, 8)
        rg = realize_separated(d, ss)
        mr = rg.materialize(5)
        g = mr.graph
        assert ("z1", "z1") not in g.edges
        assert [v for v in g.vertices if mr.roles[v]["kind"] == "z"] == ["z1"]
        assert g.is_infinite_emitter("z1")
        for n in range(2, 6):
            assert g.edges[("z1", f"v@{n}")] == 6
        # Defect 2 on the ideal row gives one source per vertex beyond level 1.
        assert rg.delta(1, "v") == 3
        assert all(rg.delta(n, "v") == 1 for n in range(2, 6))

    def test_empty_ideal_part_rejected(self):
        d = BratteliDiagram(
            tuple(Level(n, (("a", 3),)) for n in (1, 2, 3)),
            tuple(MultMatrix(n, {("a", "a"): 1}) for n in (1, 2)),
        )
        ss = SeparatedStructure(k=3, y_labels=("a", "a", "a"))
        with pytest.raises(PreconditionError, match="empty ideal part"):
            realize_separated(d, ss)

    def test_non_proper_rejected(self):
        d = fixture("F")
        ss, proper = recognize_separated(d, 6)
        assert not proper
        with pytest.raises(PreconditionError, match="non-proper"):
            realize_separated(d, ss)


class TestRealizeStrict:
    def test_degree_below_two_rejected(self):
        with pytest.raises(PreconditionError, match="degree >= 2.*'y'"):
            realize_strict(fixture("E"))

    def test_zero_defect_rejected(self):
        d = BratteliDiagram(
            (Level(1, (("a", 3),)), Level(2, (("a", 3),))),
            (MultMatrix(1, {("a", "a"): 1}),),
        )
        with pytest.raises(PreconditionError, match="positive defect"):
            realize_strict(d)

    def test_chain_with_defect_one(self):
        d = strict_chain()
        rg = realize_strict(d)
        cert = verify_realization(rg, d, 3)
        assert cert.passed
        mr = rg.materialize(3)
        assert not any(mr.graph.is_infinite_emitter(v) for v in mr.graph.vertices)
        # delta = defect - 1: degrees 2, 5, 11 with incoming 0, 4, 10.
        assert rg.delta(1, "a") == 1 and rg.delta(2, "a") == 0 and rg.delta(3, "a") == 0


class TestVerify:
    def test_m3_pathcount_values(self):
        rg = m3_realized()
        mr = rg.materialize(4)
        pc = mr.pathcounts()
        # 1 + delta + k*m + carried weight: 1+1+18+4 and 1+2+18+43.
        assert pc["v@2"] == 24
        assert pc["v@4"] == 64

    def test_corrupted_multiplicity_fails_at_that_entry(self):
        rg = m3_realized()
        mr = rg.materialize(4)
        edges = dict(mr.graph.edges)
        edges[("v@2", "v@3")] = 5
        bad = MaterializedRealization(
            mr.mode, mr.k, mr.depth,
            type(mr.graph)(mr.graph.vertices, edges, levels=mr.graph.levels, infinite_emitters=mr.graph.infinite_emitters),
            mr.roles, mr.chain_slots,
        )
        cert = verify_realization(bad, fixture("M3"), 4)
        assert not cert.passed
        first = cert.first_failure
        assert first is not None
        for check in cert.checks:
            if check is first:
                break
            assert check.ok

    def test_annotation_mismatch(self):
        rg = m3_realized()
        with pytest.raises(PreconditionError, match="annotation mismatch"):
            verify_realization(rg, strict_chain(), 3)


class TestPathcountOracle:
    def test_recursion_matches_enumeration(self):
        cases = [m3_realized()]
        d = fixture("E")
        ss, _ = recognize_separated(d, 8)
        cases.append(realize_separated(d, ss))
        cases.append(realize_strict(strict_chain()))
        for rg in cases:
            mr = rg.materialize(min(4, rg.diagram.prefix_depth if rg.diagram.tail is None else 4))
            pc = mr.pathcounts()
            for name, role in mr.roles.items():
                if role["kind"] == "h":
                    assert pc[name] == len(enumerate_paths_into(mr.graph, name))


class TestReconstruct:
    def test_m3_round_trip(self):
        rg = m3_realized()
        assert reconstruct_diagram(rg, 6) == materialize(fixture("M3"), 6)

    def test_strict_round_trips(self):
        for seed in range(1, 11):
            d = random_diagram(seed, levels=6, max_width=5, max_mult=3, strict=True)
            rg = realize_strict(d)
            assert reconstruct_diagram(rg, 5) == materialize(d, 5)
            assert verify_realization(rg, d, 5).passed

    def test_separated_round_trips(self):
        for seed in range(1, 11):
            d = random_diagram(seed, levels=6, max_width=4, max_mult=3, strict=True, separated=2)
            rec = recognize_separated(d, 6)
            assert rec is not None and rec[1]
            rg = realize_separated(d, rec[0])
            assert reconstruct_diagram(rg, 5) == materialize(d, 5)

    def test_corrupted_graph_reconstructs_differently(self):
        rg = m3_realized()
        mr = rg.materialize(4)
        edges = dict(mr.graph.edges)
        edges[("z3", "v@3")] = 7
        bad = MaterializedRealization(
            mr.mode, mr.k, mr.depth,
            type(mr.graph)(mr.graph.vertices, edges, levels=mr.graph.levels, infinite_emitters=mr.graph.infinite_emitters),
            mr.roles, mr.chain_slots,
        )
        rebuilt = reconstruct_diagram(bad, 4)
        assert prefix_isomorphic(rebuilt, materialize(fixture("M3"), 4), 4) is None
