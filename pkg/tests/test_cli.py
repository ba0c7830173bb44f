from __future__ import annotations

import json
import subprocess
import sys

import pytest

from quadricode.cli import SUITES, main


def run(capsys, *args):
    code = main(list(args))
    out = capsys.readouterr()
    return code, out.out, out.err


def lines(out):
    return [json.loads(x) for x in out.splitlines()]


def test_build_elliptic(capsys):
    code, out, _ = run(capsys, "build", "--variety", "elliptic", "--q", "3", "--s", "1")
    obj = lines(out)[0]
    assert code == 0 and (obj["n"], obj["k"]) == (10, 4)


def test_build_segre(capsys):
    code, out, _ = run(capsys, "build", "--variety", "segre", "--q", "3", "--d", "3", "--s", "1")
    obj = lines(out)[0]
    assert code == 0 and (obj["n"], obj["k"]) == (64, 8)


def test_build_out_of_range(capsys):
    code, _, err = run(capsys, "build", "--variety", "hyperbolic", "--q", "3", "--s", "3")
    assert code == 2 and "s < q" in err
    code, _, err = run(capsys, "build", "--variety", "elliptic", "--q", "3", "--s", "2")
    assert code == 2 and "elliptic quadric codes require s < q-1" in err


def test_usage_errors(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["verify", "nonsense"])
    assert exc.value.code == 2
    capsys.readouterr()
    assert run(capsys, "build", "--q", "6", "--s", "1")[0] == 2
    assert run(capsys, "build", "--q", "3")[0] == 2


def test_params_exhaustive_and_budget(capsys):
    code, out, _ = run(capsys, "params", "--variety", "elliptic", "--q", "4", "--s", "2")
    rep = lines(out)[0]
    assert code == 0 and (rep["n"], rep["k"], rep["d_exact"]) == (17, 9, 7)
    assert rep["elapsed_ms"] is None
    code, _, err = run(capsys, "params", "--q", "5", "--s", "2", "--budget", "10")
    assert code == 3 and str((5**9 - 1) // 4) in err


def test_params_bounds(capsys):
    code, out, _ = run(capsys, "params", "--variety", "twisted", "--q", "4", "--d", "3", "--s", "2",
                       "--dmode", "bounds")
    rep = lines(out)[0]
    assert code == 0 and rep["k"] == 27 and rep["d_exact"] is None
    assert rep["d_lower"] <= 23 <= rep["d_upper"]


@pytest.mark.parametrize("args,check", [
    (("verify", "equivalence", "--q", "4", "--s", "2"), lambda r: r[0]["equivalent"]),
    (("verify", "example-q5"), lambda r: (r[0]["quadric_points"], r[0]["curve_points"]) == (26, 18)),
    (("verify", "lemma-uv", "--s", "5"), lambda r: r[0]["size"] == 36),
    (("search", "--variety", "hyperbolic", "--q", "3", "--s", "1"), lambda r: (r[0]["max"], r[0]["bound"]) == (7, 7)),
    (("search", "--variety", "elliptic", "--q", "4", "--s", "2"), lambda r: (r[0]["max"], r[0]["bound"]) == (10, 10)),
    (("search", "--variety", "elliptic", "--q", "3", "--s", "0"), lambda r: r[0]["max"] == 0),
    (("count", "--variety", "elliptic", "--q", "3", "--form", "x0"), lambda r: (r[0]["points"], r[0]["zeros"]) == (10, 1)),
])
def test_documented_examples(capsys, args, check):
    code, out, _ = run(capsys, *args)
    assert code == 0 and check(lines(out))


@pytest.mark.parametrize("suite", SUITES)
def test_every_suite_passes(capsys, suite):
    code, out, _ = run(capsys, "verify", suite)
    reports = lines(out)
    assert reports and all(r["status"] == "pass" for r in reports)
    assert code == 0


def test_psl2_flags_discrepancy(capsys):
    _, out, _ = run(capsys, "verify", "psl2")
    rep = lines(out)[0]
    assert rep["monomial"] == rep["samples"] == 20 and rep["discrepancy"]


def test_text_mode_mirrors_json(capsys):
    _, js, _ = run(capsys, "verify", "cyclic")
    _, txt, _ = run(capsys, "verify", "cyclic", "--format", "text")
    js_lines, txt_lines = js.splitlines(), txt.splitlines()
    assert len(js_lines) == len(txt_lines)
    for j, t in zip(js_lines, txt_lines):
        obj = json.loads(j)
        pairs = dict(item.split("=", 1) for item in t.split("\t"))
        assert {k: json.loads(v) for k, v in pairs.items()} == obj


def test_output_is_deterministic(capsys):
    first = run(capsys, "verify", "psl2", "--seed", "5")[1]
    second = run(capsys, "verify", "psl2", "--seed", "5")[1]
    assert first == second
    again = subprocess.run([sys.executable, "-m", "quadricode.cli", "verify", "psl2", "--seed", "5"],
                           capture_output=True, text=True, check=True).stdout
    assert again == first


def test_exit_status_tracks_report_status(capsys, monkeypatch):
    import quadricode.cli as cli

    def failing(cfg):
        yield {"suite": "x", "status": "pass"}
        yield {"suite": "x", "status": "fail"}

    monkeypatch.setitem(cli.SUITE_FUNCS, "lemma-uv", failing)
    assert run(capsys, "verify", "lemma-uv")[0] == 1


def test_export_and_out_file(capsys, tmp_path):
    target = tmp_path / "g.json"
    code, out, _ = run(capsys, "export", "--q", "3", "--s", "1", "--what", "parity", "--out", str(target))
    obj = json.loads(target.read_text())
    assert code == 0 and out == "" and len(obj["rows"]) == 12
    _, out, _ = run(capsys, "export", "--q", "3", "--s", "1", "--what", "points")
    assert len(lines(out)[0]["points"]) == 16


def test_modulus_override(capsys):
    code, out, _ = run(capsys, "verify", "elliptic", "--q", "3", "--s", "1", "--modulus", "2,1,1")
    assert code == 0 and lines(out)[0]["status"] == "pass"
    assert run(capsys, "build", "--q", "3", "--s", "1", "--variety", "elliptic", "--modulus", "0,1,1")[0] == 2
