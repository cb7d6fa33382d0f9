import io
import json
import subprocess
import sys

import pytest

from conftest import DATA
from galdef import __version__
from galdef.cli import EXIT_DATA, EXIT_PARAMS, EXIT_USAGE, build_parser, run


def call(argv, tmp_path=None):
    out, err = io.StringIO(), io.StringIO()
    code = run(argv, stdout=out, stderr=err)
    report = json.loads(out.getvalue()) if code == 0 and "--out" not in argv else None
    return code, report, out.getvalue(), err.getvalue()


def check_schema(report):
    assert set(report) == {"command", "params", "result", "checks", "paper_anchor", "version"}
    assert report["version"] == __version__
    assert report["paper_anchor"] and "§" not in report["paper_anchor"]
    for c in report["checks"]:
        assert set(c) == {"name", "pass", "detail"}


def test_principal_series_example():
    code, rep, _, _ = call(["criteria", "principal-series", "--p", "7", "--ell", "5"])
    assert code == 0 and rep["result"] == {"nonzero": True}
    check_schema(rep)


def test_recipe_q_squared_one_exits_4():
    code, _, _, err = call(["recipe", "--ell", "5", "--q", "4"])
    assert code == EXIT_PARAMS
    assert "q^2" in err


def test_recipe_report():
    code, rep, _, err = call(["recipe", "--ell", "5", "--q", "2"])
    assert code == 0
    assert rep["result"]["lambda"] == 1 and rep["result"]["all_pairs_agree"]
    assert all(c["pass"] for c in rep["checks"])
    assert "[PASS]" in err


def test_usage_errors_exit_2():
    assert call(["bogus"])[0] == EXIT_USAGE
    assert call(["recipe", "--ell", "5"])[0] == EXIT_USAGE
    assert call([])[0] == EXIT_USAGE


def test_data_errors_exit_3(tmp_path, monkeypatch):
    monkeypatch.delenv("GALDEF_DATA_DIR", raising=False)
    assert call(["congruence", "--label", "26a"])[0] == EXIT_DATA
    bad = tmp_path / "bad.json"
    bad.write_text('{"forms": [{"label": "x"}]}')
    assert call(["congruence", "--data", str(bad), "--label", "x"])[0] == EXIT_DATA
    assert call(["congruence", "--data", str(DATA / "newforms.json"), "--label", "nope"])[0] == EXIT_DATA


def test_invalid_parameters_exit_4():
    assert call(["invariants", "--ell", "9", "--q", "2", "--alpha", "2", "--beta", "1"])[0] == EXIT_PARAMS
    assert call(["criteria", "supercuspidal", "--p", "3", "--ell", "7"])[0] == EXIT_PARAMS
    assert call(["classify", "--N", "7", "--ell", "5", "--local", "7:Bogus"])[0] == EXIT_PARAMS


def test_congruence_uses_data_dir(monkeypatch):
    monkeypatch.setenv("GALDEF_DATA_DIR", str(DATA))
    code, rep, _, _ = call(["congruence", "--label", "26a"])
    assert code == 0 and rep["result"]["strict_primes"] == [7]
    assert rep["result"]["congruence_primes"] == [7]


def test_classify_level_raise():
    code, rep, _, _ = call(["classify", "--N", "7", "--ell", "5", "--local", "2:LevelRaiseQ:alpha=2,beta=1",
                            "--assume-vanishing"])
    r = rep["result"]["report"]
    assert code == 0 and r["hom_h2_dim_lower_bound"] == 1 and r["generator_tag"] == "e3"
    assert "T*(ell - Phi)" in r["ring_descriptor"]


@pytest.mark.parametrize("argv", [
    ["invariants", "--ell", "7", "--q", "3", "--alpha", "3", "--beta", "1"],
    ["cocycle", "--ell", "5", "--q", "2"],
    ["cohomology", "--ell", "5", "--q", "2", "--module", "eps-ad0"],
    ["lift", "--ell", "5", "--q", "2", "--sections", "3", "--cochains", "10"],
    ["criteria", "standing", "--N", "11", "--ell", "5"],
    ["criteria", "ell", "--ell", "5", "--a-ell", "2", "--m-deg", "3", "--congruence-prime"],
    ["ars", "--N", "26", "--m-deg", "6"],
])
def test_commands_pass_their_checks(argv):
    code, rep, _, _ = call(argv)
    assert code == 0
    check_schema(rep)
    assert all(c["pass"] for c in rep["checks"]), rep["checks"]


def test_standing_report():
    _, rep, _, _ = call(["criteria", "standing", "--N", "11", "--ell", "5"])
    assert rep["result"] == {"ok": False, "violations": ["p = 1 mod ell at p = 11"]}


def test_seeded_report_is_byte_identical(tmp_path):
    paths = [tmp_path / "a.json", tmp_path / "b.json"]
    for p in paths:
        assert run(["lift", "--ell", "5", "--q", "2", "--sections", "3", "--cochains", "10", "--seed", "4",
                    "--out", str(p)], stdout=io.StringIO(), stderr=io.StringIO()) == 0
    assert paths[0].read_bytes() == paths[1].read_bytes()
    text = paths[0].read_text()
    assert text == json.dumps(json.loads(text), sort_keys=True, indent=2) + "\n"


def test_cocycle_sampling_and_exhaustive_flag():
    _, rep, _, _ = call(["cocycle", "--ell", "11", "--q", "2", "--samples", "2000", "--seed", "1"])
    assert rep["result"]["cocycle_mode"] == "2000 seeded samples"
    assert all(c["pass"] for c in rep["checks"])
    _, rep, _, _ = call(["cocycle", "--ell", "5", "--q", "2", "--exhaustive"])
    assert rep["result"]["cocycle_mode"] == "exhaustive"


def test_defring_report():
    code, rep, _, _ = call(["defring", "--p", "7", "--ell", "5", "--D", "2"])
    assert code == 0
    res = rep["result"]
    assert res["candidates"] == 1045
    assert res["matched"] == len(res["matches"])


def test_summary_goes_to_stdout_with_out(tmp_path):
    out = tmp_path / "r.json"
    code, _, stdout, _ = call(["ars", "--N", "26", "--m-deg", "6", "--out", str(out)])
    assert code == 0 and stdout.startswith("galdef ars")
    assert json.loads(out.read_text())["result"]["primes_of_mdeg"] == [2, 3]


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "galdef", "ars", "--N", "11", "--m-deg", "1"],
                          capture_output=True, text=True, check=False)
    assert proc.returncode == 0
    assert json.loads(proc.stdout)["result"]["primes_of_N_times_mdeg"] == [11]


def test_parser_lists_all_commands():
    sub = next(a for a in build_parser()._actions if a.dest == "command")
    assert set(sub.choices) == {"invariants", "cocycle", "recipe", "cohomology", "lift", "criteria", "classify",
                                "congruence", "ars", "defring"}
