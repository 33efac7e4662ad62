import json
import subprocess
import sys

import pytest

from localstats.acceptance import cli_determinism_commands, run_cli_captured
from localstats.cli import main
from localstats.io import stats_from_doc


def _write(tmp_path, name, doc):
    p = tmp_path / name
    p.write_text(json.dumps(doc))
    return str(p)


def _run(capsys, argv):
    code = main(argv)
    out = capsys.readouterr()
    return code, out.out, out.err


@pytest.fixture
def files(tmp_path):
    return {
        "k13": _write(tmp_path, "k13.json", {"kind": "graph", "n": 4, "edges": [[0, 1], [0, 2], [0, 3]]}),
        "edge": _write(tmp_path, "edge.json", {"kind": "graph", "n": 2, "edges": [[0, 1]]}),
        "cube": _write(tmp_path, "cube.json", {"catalog": {"kind": "schreier", "params": [2, 0]}, "boxes": [{}]}),
        "gempty": _write(tmp_path, "gempty.json", {"catalog": {"kind": "graph", "params": [3, 1]}, "boxes": []}),
        "dir": tmp_path,
    }


def test_stats_of_star(capsys, files):
    code, out, _ = _run(capsys, ["stats", "--graph", files["k13"], "--r", "1"])
    doc = json.loads(out)
    assert code == 0
    assert doc["stats"]["entries"] == {"47000280": "3/4", "470004d0": "1/4"}
    assert doc["manifest"]["command"] == "stats" and doc["manifest"]["deterministic"] is True
    assert len(next(iter(doc["manifest"]["inputs"].values()))) == 64
    x = stats_from_doc(doc["stats"])
    assert sum(x.entries.values()) == 1


def test_out_file(capsys, files):
    target = str(files["dir"] / "s.json")
    code, out, _ = _run(capsys, ["stats", "--graph", files["k13"], "--r", "0", "--out", target])
    assert code == 0 and out == ""
    assert json.load(open(target))["stats"]["r"] == 0


def test_encode_then_decode(capsys, files):
    code, out, _ = _run(capsys, ["encode", "--graph", files["edge"]])
    enc = json.loads(out)
    assert code == 0 and enc["kind"] == "schreier" and enc["perms"] == [[0, 1], [1, 0]]
    enc.pop("manifest")
    sch = _write(files["dir"], "enc.json", enc)
    code, out, _ = _run(capsys, ["decode", "--graph", sch, "--delta", "1"])
    dec = json.loads(out)
    assert code == 0 and dec["bad_fraction"] == "0/1"
    assert dec["kind"] == "graph" and dec["n"] == 2 and dec["edges"] == [[0, 1]]


def test_pirs_check_whole_cube_halts(capsys, files):
    code, out, _ = _run(capsys, ["pirs-check", "--d", "2", "--r", "0", "--region", files["cube"], "--kmax", "3"])
    doc = json.loads(out)
    assert code == 0 and doc["halted"] and doc["k"] == 1 and doc["witness"] is None


def test_pirs_check_not_halting_exits_1(capsys, files):
    empty = _write(files["dir"], "e.json", {"catalog": {"kind": "schreier", "params": [2, 0]}, "boxes": []})
    code, out, _ = _run(capsys, ["pirs-check", "--d", "2", "--r", "0", "--region", empty, "--kmax", "2"])
    doc = json.loads(out)
    assert code == 1 and not doc["halted"] and doc["witness"] is not None
    assert [t["k"] for t in doc["trace"]] == [1, 2]


def test_pirs_upper_and_sofic_lb(capsys):
    code, out, _ = _run(capsys, ["pirs-upper", "--pattern", "a1; !a1^2", "--d", "2", "--k", "3"])
    assert code == 0 and json.loads(out)["upper_bound"] == "0/1"
    code, out, _ = _run(capsys, ["pirs-upper", "--pattern", "a1", "--d", "2", "--k", "3"])
    assert json.loads(out)["upper_bound"] == "1/1"
    code, out, _ = _run(capsys, ["sofic-lb", "--pattern", "!a1; a1^2", "--d", "2", "--nmax", "2"])
    assert code == 0 and json.loads(out)["lower_bound"] == "1/1"


def test_enum_and_ballcat(capsys, files):
    code, out, _ = _run(capsys, ["enum-schreier", "--d", "2", "--n", "3", "--count-only"])
    assert code == 0 and json.loads(out)["count"] == 36
    code, out, _ = _run(capsys, ["enum-schreier", "--d", "2", "--n", "3", "--dedup"])
    assert len(json.loads(out)["graphs"]) == 11
    cache = str(files["dir"] / "cache")
    argv = ["ballcat", "--kind", "graph", "--delta", "3", "--r", "1", "--cache-dir", cache]
    code, first, err1 = _run(capsys, argv)
    code2, second, err2 = _run(capsys, argv)
    assert code == code2 == 0 and first == second
    assert len(json.loads(first)["catalog"]["codes"]) == 8
    assert "cache hit" not in err1 and "cache hit" in err2


def test_usage_errors_exit_2(capsys, files):
    assert _run(capsys, ["stats", "--graph", "missing.json", "--r", "1"])[0] == 2
    assert _run(capsys, ["lsdf", "--delta", "3", "--eps", "1/2", "--r", "1", "--region", files["cube"]])[0] == 2
    assert _run(capsys, ["net", "--delta", "3", "--eps", "-1", "--r", "1", "--size-cap", "3"])[0] == 2
    assert _run(capsys, ["bogus"])[0] == 2
    assert _run(capsys, ["stats", "--r", "1"])[0] == 2


def test_resource_cap_exits_3(capsys):
    code, _, err = _run(capsys, ["enum-schreier", "--d", "2", "--n", "5", "--cap-graphs", "10"])
    assert code == 3 and "cap" in err


def test_lsdf_answers(capsys, files):
    argv = ["lsdf", "--delta", "3", "--eps", "1/2", "--r", "1", "--region", files["gempty"], "--size-cap", "2"]
    code, out, _ = _run(capsys, argv)
    assert code == 3 and json.loads(out)["answer"] == "unknown"
    code, out, _ = _run(capsys, argv + ["--trusted-n", "2"])
    assert code == 0 and json.loads(out)["answer"] == "no"


def test_reduce(capsys):
    argv = ["reduce", "--direction", "schreier-from-sparse", "--oracle-value", "17", "--d", "2", "--eps", "1/2", "--r", "0"]
    code, out, _ = _run(capsys, argv)
    doc = json.loads(out)
    assert code == 0 and doc["N"] == 1 and doc["sentinel"] is False and doc["eps0"] == "1/8"


def test_table_format_respects_no_color(tmp_path, files):
    argv = [sys.executable, "-m", "localstats.cli", "stats", "--graph", files["k13"], "--r", "1", "--format", "table"]
    out = subprocess.run(argv, capture_output=True, text=True, env={"NO_COLOR": "1", "PATH": ""}, check=True).stdout
    assert "\x1b[" not in out and "47000280" in out and "3/4" in out


def test_determinism(tmp_path):
    for argv in cli_determinism_commands(str(tmp_path))[:6]:
        assert run_cli_captured(argv) == run_cli_captured(argv)
