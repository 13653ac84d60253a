from __future__ import annotations

import json
from pathlib import Path

import pytest

from afgraph.cli import main
from afgraph.dot import export_dot
from afgraph.fixtures import fixture
from afgraph.model import MultGraph

GOLDEN = Path(__file__).parent / "golden"


def run(capsys, *argv) -> tuple[int, str]:
    code = main(list(argv))
    return code, capsys.readouterr().out


@pytest.fixture()
def m3_file(tmp_path):
    path = tmp_path / "m3.json"
    code = main(["gen", "--fixture", "M3", "--out", str(path)])
    assert code == 0
    return path


class TestExitCodes:
    def test_valid_diagram(self, capsys, m3_file):
        code, out = run(capsys, "validate", "--in", str(m3_file))
        assert code == 0
        assert json.loads(out)["valid"] is True

    def test_axiom_violation_exits_1(self, capsys, tmp_path):
        path = tmp_path / "bad.json"
        path.write_text(
            json.dumps(
                {
                    "levels": [
                        {"index": 1, "vertices": [{"id": "a", "degree": 2}]},
                        {"index": 2, "vertices": [{"id": "b", "degree": 2}]},
                    ],
                    "matrices": [
                        {"from_level": 1, "entries": [{"src": "a", "dst": "b", "mult": 2}]}
                    ],
                }
            )
        )
        code, out = run(capsys, "validate", "--in", str(path))
        assert code == 1
        payload = json.loads(out)
        assert payload["valid"] is False
        assert any(v["code"] == "degree" for v in payload["violations"])

    def test_schema_error_exits_2(self, capsys, tmp_path):
        path = tmp_path / "bad.json"
        path.write_text('{"levels": [{"index": 1, "vertices": [{"id": "a", "degree": -3}]}], "matrices": []}')
        code, _ = run(capsys, "validate", "--in", str(path))
        assert code == 2

    def test_precondition_exits_3(self, capsys, tmp_path):
        path = tmp_path / "row.json"
        payload = {
            "levels": [{"index": n, "vertices": [{"id": "a", "degree": 3}]} for n in (1, 2, 3)],
            "matrices": [
                {"from_level": n, "entries": [{"src": "a", "dst": "a", "mult": 1}]} for n in (1, 2)
            ],
        }
        path.write_text(json.dumps(payload))
        code, _ = run(capsys, "realize", "--in", str(path), "--mode", "separated", "--depth", "3")
        assert code == 3

    def test_depth_insufficiency_exits_4(self, capsys, tmp_path, m3_file):
        finite = tmp_path / "finite.json"
        code = main(["telescope", "--in", str(m3_file), "--levels", "1,2,3", "--out", str(finite)])
        assert code == 0
        code, _ = run(capsys, "telescope", "--in", str(finite), "--levels", "1,2,5")
        assert code == 4


class TestSchemaPointers:
    def test_negative_degree_pointer(self):
        from afgraph.errors import SchemaError
        from afgraph.jsonio import parse_diagram

        doc = '{"levels": [{"index": 1, "vertices": [{"id": "a", "degree": -1}]}], "matrices": []}'
        with pytest.raises(SchemaError) as err:
            parse_diagram(doc)
        assert err.value.pointer == "/levels/0/vertices/0/degree"

    def test_dangling_label_reported(self, capsys, tmp_path):
        path = tmp_path / "dangling.json"
        payload = {
            "levels": [
                {"index": 1, "vertices": [{"id": "a", "degree": 1}]},
                {"index": 2, "vertices": [{"id": "b", "degree": 1}]},
            ],
            "matrices": [{"from_level": 1, "entries": [{"src": "zz", "dst": "b", "mult": 1}, {"src": "a", "dst": "b", "mult": 1}]}],
        }
        path.write_text(json.dumps(payload))
        code, out = run(capsys, "validate", "--in", str(path))
        assert code == 1
        assert "zz" in out


class TestDotExport:
    @pytest.mark.parametrize(
        "args,golden",
        [
            (("export-dot", "--in", "M3GEN", "--depth", "3"), "m3_depth3.dot"),
            (("export-dot", "--in", "FGEN", "--depth", "3"), "f_depth3.dot"),
        ],
    )
    def test_diagram_golden(self, capsys, tmp_path, args, golden):
        name = "M3" if "M3GEN" in args else "F"
        path = tmp_path / "d.json"
        main(["gen", "--fixture", name, "--out", str(path)])
        argv = [a.replace("M3GEN", str(path)).replace("FGEN", str(path)) for a in args]
        code, out = run(capsys, *argv)
        assert code == 0
        assert out == (GOLDEN / golden).read_text(encoding="utf-8")

    def test_f_depth3_has_nine_nodes(self):
        text = export_dot(fixture("F"), 3)
        node_lines = [ln for ln in text.splitlines() if "[label=" in ln and "->" not in ln]
        assert len(node_lines) == 9

    def test_empty_graph(self):
        text = export_dot(MultGraph((), {}))
        assert text == (GOLDEN / "empty.dot").read_text(encoding="utf-8")

    def test_corner32_bold_infinity(self, capsys, tmp_path):
        path = tmp_path / "g.json"
        main(["gen", "--fixture", "corner32", "--out", str(path)])
        code, out = run(capsys, "export-dot", "--graph", str(path))
        assert code == 0
        assert out == (GOLDEN / "corner32.dot").read_text(encoding="utf-8")
        assert 'style=bold, label="∞"' in out

    def test_m3_realization_golden(self, capsys, tmp_path, m3_file):
        gpath = tmp_path / "g.json"
        code = main(["realize", "--in", str(m3_file), "--mode", "separated", "--depth", "4", "--out", str(gpath)])
        assert code == 0
        code, out = run(capsys, "export-dot", "--graph", str(gpath))
        assert code == 0
        assert out == (GOLDEN / "m3_realized_depth4.dot").read_text(encoding="utf-8")
        assert '"z3" -> "v@2" [label="6"]' in out


class TestPipelines:
    def test_verify_pass_and_corruption_fail(self, capsys, tmp_path, m3_file):
        gpath = tmp_path / "g.json"
        main(["realize", "--in", str(m3_file), "--mode", "separated", "--depth", "5", "--out", str(gpath)])
        code, out = run(capsys, "verify", "--graph", str(gpath), "--diagram", str(m3_file), "--depth", "5")
        assert code == 0
        assert json.loads(out)["passed"] is True

        doc = json.loads(gpath.read_text())
        for edge in doc["edges"]:
            if edge["src"] == "z3" and edge["dst"] == "v@3":
                edge["mult"] = 7
        gpath.write_text(json.dumps(doc))
        code, out = run(capsys, "verify", "--graph", str(gpath), "--diagram", str(m3_file), "--depth", "5")
        assert code == 1
        assert json.loads(out)["passed"] is False

    def test_decide_with_realize(self, capsys, tmp_path, m3_file):
        gpath = tmp_path / "g.json"
        code, out = run(capsys, "decide", "--in", str(m3_file), "--depth", "5", "--realize", "--out", str(gpath))
        assert code == 0
        payload = json.loads(out)
        assert payload["verdict"] == "RealizableViaSeparatedForm"
        assert payload["certificate"]["passed"] is True
        assert gpath.exists()

    def test_properify_writes_trace(self, capsys, tmp_path):
        fpath = tmp_path / "f.json"
        main(["gen", "--fixture", "F", "--out", str(fpath)])
        trace = tmp_path / "trace.json"
        code, out = run(capsys, "properify", "--in", str(fpath), "--depth", "4", "--trace", str(trace))
        assert code == 0
        doc = json.loads(trace.read_text())
        assert doc["removed"]["2"] == ["u"]

    def test_separate_cli(self, capsys, tmp_path, m3_file):
        code, out = run(capsys, "separate", "--in", str(m3_file), "--rows", "v", "--depth", "5")
        assert code == 0
        assert json.loads(out)["levels"][0]["vertices"][0]["id"] == "v"

    def test_analyze_payload(self, capsys, m3_file):
        code, out = run(capsys, "analyze", "--in", str(m3_file), "--depth", "5")
        assert code == 0
        payload = json.loads(out)
        assert payload["separated"] == {"k": 3, "proper": True, "y_labels": ["y"] * 5}
        assert payload["mk_tail"] == [1, 3]
        assert payload["unital"] == "NoWitnessAtDepth"

    def test_k0_normalize(self, capsys, tmp_path):
        gpath = tmp_path / "g.json"
        main(["gen", "--fixture", "corner32", "--out", str(gpath)])
        code, out = run(capsys, "k0", "normalize", "--graph", str(gpath), "--vector", '{"v": 1, "w": 0}')
        assert code == 0
        payload = json.loads(out)
        assert payload["m"] == {"v": 1, "w": 1}
        assert payload["source_positive"] is True


class TestReportDir:
    def test_report_files_written_and_deterministic(self, capsys, tmp_path, m3_file):
        out1 = tmp_path / "r1"
        out2 = tmp_path / "r2"
        for out in (out1, out2):
            code, _ = run(capsys, "decide", "--in", str(m3_file), "--depth", "4", "--realize",
                          "--out", str(tmp_path / "g.json"), "--report-dir", str(out))
            assert code == 0
        names = sorted(p.name for p in out1.iterdir())
        assert names == ["diagram.png", "graph.png", "report.json", "vertices.csv"]
        for name in names:
            assert (out1 / name).read_bytes() == (out2 / name).read_bytes()
        csv_text = (out1 / "vertices.csv").read_text()
        assert csv_text.splitlines()[0] == "level,label,degree,incoming,defect"
        assert "2,v,24,22,2" in csv_text


class TestDeterminism:
    def test_stdout_byte_identical(self, capsys, m3_file):
        outs = set()
        for _ in range(2):
            code, out = run(capsys, "analyze", "--in", str(m3_file), "--depth", "6")
            assert code == 0
            outs.add(out)
        assert len(outs) == 1
