import json
import subprocess

import pytest

from cli import build_parser, companion_dot, format_table, main, rows_json, run, write_dot
from topology import analyze

from conftest import D17_X, D17_Y


@pytest.fixture(autouse=True)
def private_cache(monkeypatch, tmp_settings):
    monkeypatch.setenv("JANUARIAL_CACHE", str(tmp_settings.cache_dir))
    monkeypatch.delenv("JANUARIAL_WORKERS", raising=False)


def _run_json(capsys, argv):
    code = main(argv)
    out = capsys.readouterr().out
    return code, json.loads(out) if out.strip() else None


def test_analyze_d17_example(capsys):
    code, data = _run_json(capsys, ["analyze", "--x", D17_X, "--y", D17_Y, "--p", "17"])
    assert code == 0
    assert data["type"] == "general"
    assert data["h"] == [2, 1]
    assert (data["g1"], data["g2"], data["alpha"], data["genus"]) == (1, 1, -1, 2)
    assert data["checks"]["formula"] is True
    assert data["action"]["points"] == "pl:17"


def test_analyze_from_file(capsys, tmp_path):
    path = tmp_path / "six.txt"
    path.write_text("# six points\nx=(1,5)(3,4)\ny=(1,2,3)(4,5,6)\npoints=1..6\n", encoding="utf-8")
    code, data = _run_json(capsys, ["analyze", "--file", str(path), "--k", "3"])
    assert code == 0
    assert (data["type"], data["h"], data["genus"]) == ("simple", 1, 0)
    assert data["checks"]["thm9"] is True


@pytest.mark.parametrize("argv", [
    ["analyze", "--x", "(1,2", "--y", "(1,2,3)"],
    ["analyze", "--x", "(1,2)"],
    ["analyze", "--x", "()", "--y", "(1,2,3)"],
    ["analyze", "--x", "(1,7)(3,5)", "--y", "(1,2,3,4)(5,6,7,8)", "--k", "5"],
    ["analyze", "--file", "/nonexistent/action.txt"],
])
def test_analyze_input_errors(capsys, argv):
    assert main(argv) == 2
    assert capsys.readouterr().out == ""


def test_analyze_identity_failure_exits_one(capsys):
    assert main(["analyze", "--x", "(1,7)(3,5)", "--y", "(1,2,3,4)(5,6,7,8)", "--p", "17",
                 "--points", "1..8"]) == 1


def test_analyze_writes_dot_files(capsys, tmp_path):
    diagram, comp = tmp_path / "d.dot", tmp_path / "c.dot"
    code = main(["analyze", "--x", "(1,7)(3,5)", "--y", "(1,2,3,4)(5,6,7,8)",
                 "--dot", str(diagram), "--companion-dot", str(comp)])
    assert code == 0
    assert "digraph coset_diagram {" in diagram.read_text(encoding="utf-8")
    text = comp.read_text(encoding="utf-8")
    assert "graph companion {" in text
    assert text.count("color=red") == 2


def test_family_even(capsys):
    code, data = _run_json(capsys, ["family", "--k", "4"])
    assert code == 0
    assert data["action"]["x"] == "(1,7)(3,5)"
    assert (data["h"], data["genus"]) == (1, 0)


def test_family_odd_uses_cache(capsys):
    code, data = _run_json(capsys, ["family", "--k", "3"])
    assert code == 0
    assert data["action"]["x"] == "(1,12)(2,4)(5,7)(9,10)"
    assert data["l"] == 6


def test_run_exits_with_command_code(capsys):
    with pytest.raises(SystemExit) as info:
        run(["family", "--k", "4"])
    assert info.value.code == 0
    assert json.loads(capsys.readouterr().out)["h"] == 1
    with pytest.raises(SystemExit) as info:
        run(["hecke", "--p", "7", "--k", "100"])
    assert info.value.code == 2


@pytest.mark.parametrize("k", ["1", "2", "three"])
def test_family_rejects_small_k(k):
    with pytest.raises(SystemExit) as info:
        main(["family", "--k", k])
    assert info.value.code == 2


def test_hecke_table(capsys):
    code = main(["hecke", "--p", "17", "--k", "8", "--theta", "16", "--b", "8",
                 "--max-solutions", "2", "--table"])
    out = capsys.readouterr().out
    assert code == 0
    lines = out.splitlines()
    assert lines[0].split() == ["p", "k", "l", "theta", "type", "h", "g1", "g2", "alpha", "genus",
                                "status"]
    assert len([line for line in lines[1:] if line.strip().startswith("17")]) == 2
    assert "p=17 k=8: g_pk=2" in out


def test_hecke_json(capsys):
    code, data = _run_json(capsys, ["hecke", "--p", "17", "--k", "8", "--theta", "16", "--b", "8",
                                    "--max-solutions", "1"])
    assert code == 0
    assert len(data["rows"]) == 1
    assert data["rows"][0]["theta"] == 16
    assert data["summary"][0]["g_pk"] == 2


def test_hecke_without_solutions(capsys):
    assert main(["hecke", "--p", "7", "--k", "100"]) == 2


def test_census_empty_range(capsys):
    code, data = _run_json(capsys, ["census", "--p-max", "2", "--k-max", "5"])
    assert code == 0
    assert data == {"rows": [], "summary": []}


def test_verify_round_trip(capsys, tmp_path):
    assert main(["analyze", "--x", D17_X, "--y", D17_Y, "--p", "17"]) == 0
    report = tmp_path / "d17.json"
    report.write_text(capsys.readouterr().out, encoding="utf-8")

    code, data = _run_json(capsys, ["verify", "--report", str(report)])
    assert code == 0
    assert data == {"verified": True, "signature": "((2,1),(1,1))", "genus": 2}

    tampered = json.loads(report.read_text(encoding="utf-8"))
    tampered["genus"] = 3
    report.write_text(json.dumps(tampered), encoding="utf-8")
    code, data = _run_json(capsys, ["verify", "--report", str(report)])
    assert code == 1
    assert data["mismatched"] == ["genus"]


def test_verify_malformed_report(capsys, tmp_path):
    report = tmp_path / "bad.json"
    report.write_text("{not json", encoding="utf-8")
    assert main(["verify", "--report", str(report)]) == 2


def test_parser_requires_command():
    with pytest.raises(SystemExit):
        build_parser().parse_args([])


def test_format_table_and_rows_json(d17_action):
    report = analyze(d17_action).report
    table = format_table([report])
    assert table.splitlines()[1].split() == ["17", "8", "9", "general", "2,1", "1", "1", "-1", "2", "ok"]
    assert json.loads(rows_json([])) == {"rows": []}


def test_companion_dot_lists_circuits(d17_action):
    text = companion_dot(analyze(d17_action))
    assert "// ((2,1),(1,1)) genus=2 alpha=-1" in text
    assert "// P1[0]: 2->6 14->8 11->3" in text
    assert text.count("color=red") == 3


def test_write_dot_keeps_dot_without_graphviz(tmp_path, monkeypatch):
    def missing(*args, **kwargs):
        raise FileNotFoundError("dot")

    monkeypatch.setattr(subprocess, "run", missing)
    written = write_dot("graph g {}\n", str(tmp_path / "out.svg"))
    assert written == str(tmp_path / "out.dot")
    assert (tmp_path / "out.dot").read_text(encoding="utf-8") == "graph g {}\n"
    plain = write_dot("graph g {}\n", str(tmp_path / "plain.dot"))
    assert plain == str(tmp_path / "plain.dot")
