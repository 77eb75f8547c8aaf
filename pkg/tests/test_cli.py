import json
import subprocess
import sys

import numpy as np
import pytest

from gpptkit.cli import RunConfig, UsageError, main
from gpptkit.matrix_io import matrix_from_json, matrix_to_json, write_csv

M0 = np.array([[2, -2, 1], [2, -2, 1], [-1, 1, -0.5]])
H = np.array([[0.125, 0.125, -0.25], [-0.125, -0.125, 0.25], [-0.25, -0.25, 0.0]])


@pytest.fixture
def files(tmp_path):
    def put(name, m, split=None):
        p = tmp_path / name
        if name.endswith(".csv"):
            p.write_text(write_csv(m))
        else:
            p.write_text(json.dumps(matrix_to_json(np.asarray(m, dtype=float), split)))
        return str(p)
    return put


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr().out
    return code, json.loads(out)


def test_pinv(capsys, files):
    code, doc = run(capsys, "pinv", files("a.csv", np.ones((2, 2))))
    assert code == 0
    g, _ = matrix_from_json(doc["matrix"])
    assert np.allclose(g, np.ones((2, 2)) / 4)
    assert max(doc["penrose_residuals"].values()) < 1e-14
    code, doc = run(capsys, "pinv", files("i.csv", np.eye(3)))
    assert np.allclose(matrix_from_json(doc["matrix"])[0], np.eye(3))
    code, doc = run(capsys, "pinv", files("z.csv", np.zeros((1, 1))))
    assert matrix_from_json(doc["matrix"])[0].tolist() == [[0.0]] and doc["rank"] == 0


def test_gppt(capsys, files):
    path = files("m.csv", [[0.0, 0.0], [1.0, 1.0]])
    code, doc = run(capsys, "gppt", path, "--wrt", "A", "--split", "1")
    assert code == 0
    t, k = matrix_from_json(doc["matrix"])
    assert np.allclose(t, [[0, 0], [0, 1]]) and k == 1
    _, doc = run(capsys, "gppt", path, "--wrt", "D", "--split", "1")
    assert np.allclose(matrix_from_json(doc["matrix"])[0], [[0, 0], [-1, 1]])
    eye = files("eye.json", np.eye(4), split=2)
    for side in ("A", "D"):
        _, doc = run(capsys, "gppt", eye, "--wrt", side)
        assert np.allclose(matrix_from_json(doc["matrix"])[0], np.eye(4))


def test_gppt_output_readable_by_reader(capsys, files, tmp_path):
    out = tmp_path / "t.json"
    code = main(["gppt", files("m.csv", M0), "--split", "2", "-o", str(out)])
    assert code == 0 and capsys.readouterr().out == ""
    t, k = matrix_from_json(json.loads(out.read_text())["matrix"])
    assert np.allclose(t, H) and k == 2


def test_schur(capsys, files):
    code, doc = run(capsys, "schur", files("m.csv", [[0.0, 0.0], [1.0, 1.0]]), "--split", "1")
    assert code == 0
    assert np.allclose(matrix_from_json(doc["F"])[0], [[1]])
    assert np.allclose(matrix_from_json(doc["G"])[0], [[0]])


def test_check_p_dagger(capsys, files):
    code, doc = run(capsys, "check", files("m0.csv", M0), "--predicate", "p-dagger")
    assert code == 0 and doc["member"] is True
    code, doc = run(capsys, "check", files("h.csv", H), "--predicate", "p-dagger")
    assert code == 0 and doc["member"] is False
    # any witness must be a nonzero row-space vector with every product x_i (Hx)_i <= 0
    x = np.array(doc["witness"])
    assert np.any(x) and np.all(x * (H @ x) <= 1e-9)
    _, doc = run(capsys, "check", files("h2.csv", H), "--predicate", "p-dagger", "--mode", "randomized")
    assert doc["method"] == "randomized_falsifier"


def test_check_other_predicates(capsys, files):
    herm = files("h.csv", [[2.0, 1.0], [1.0, 3.0]])
    assert run(capsys, "check", herm, "--predicate", "ep")[1]["holds"] is True
    assert run(capsys, "check", herm, "--predicate", "almost-skew")[1]["holds"] is False
    assert run(capsys, "check", herm, "--predicate", "r-dagger")[1]["member"] is True
    ones, anti = files("a.csv", np.ones((2, 2))), files("c.csv", [[0.0, 1.0], [1.0, 0.0]])
    assert run(capsys, "check", ones, "--predicate", "null-included", "--other", anti)[1]["holds"] is False
    assert run(capsys, "check", anti, "--predicate", "range-included", "--other", ones)[1]["holds"] is False
    _, doc = run(capsys, "check", ones, "--predicate", "ginverse", "--other", files("g.csv", np.ones((2, 2)) / 4))
    assert doc["satisfies"] == [1, 2, 3, 4]


def test_check_complex_csv(capsys, tmp_path):
    p = tmp_path / "c.csv"
    p.write_text("1+2i,0\n0,3-i\n")
    code, doc = run(capsys, "pinv", str(p))
    g, _ = matrix_from_json(doc["matrix"])
    assert code == 0 and np.allclose(g, np.diag([1 / (1 + 2j), 1 / (3 - 1j)]))


def test_verify_theorem(capsys):
    code, doc = run(capsys, "verify", "--theorem", "T31_EQUIV", "--trials", "100", "--seed", "7")
    assert code == 0
    assert doc["unexpected_counterexamples"] == 0 and doc["summary"]["confirms"] == 100
    code2, doc2 = run(capsys, "verify", "--theorem", "T31_EQUIV", "--trials", "100", "--seed", "7")
    assert doc == doc2


def test_verify_fixtures(capsys):
    code, doc = run(capsys, "verify", "--theorem", "FIXTURES")
    assert code == 0 and doc["failed"] == 0 and len(doc["fixtures"]) > 40


def test_verify_all_reports_known_defect(capsys):
    code, doc = run(capsys, "verify", "--all", "--trials", "20", "--seed", "1")
    names = {c["theorem_id"] for c in doc["campaigns"]}
    assert {"T31_EQUIV", "T15_P_INHERIT", "L34_FACTORS"} <= names
    defect = next(c for c in doc["campaigns"] if c["theorem_id"] == "L34_FACTORS")
    # the literal factorization statement fails on some instances, which is a real counterexample
    expected = 1 if defect["counts"]["COUNTEREXAMPLE"] else 0
    assert code == expected
    assert doc["unexpected_counterexamples"] == defect["counts"]["COUNTEREXAMPLE"]


def test_verify_counterexample_exit(capsys):
    code, doc = run(capsys, "verify", "--theorem", "L34_FACTORS", "--trials", "40")
    assert code == 1 and doc["unexpected_counterexamples"] > 0
    # the refuted statement is expected to fail and does not change the exit code
    code, doc = run(capsys, "verify", "--theorem", "T_RK33_REFUTED", "--trials", "20")
    assert code == 0 and doc["summary"]["COUNTEREXAMPLE"] > 0


def test_verify_reports_flag(capsys):
    _, doc = run(capsys, "verify", "--theorem", "T_GRAM", "--trials", "3", "--reports")
    assert len(doc["campaigns"][0]["reports"]) == 3


def test_lcp(capsys, files):
    eye = files("i.csv", np.eye(2))
    _, doc = run(capsys, "lcp", eye, "--q=-1,-1")
    assert doc["solutions"] == [[1.0, 1.0]]
    _, doc = run(capsys, "lcp", eye, "--q", "1,1")
    assert doc["solutions"] == [[0.0, 0.0]]
    _, doc = run(capsys, "lcp", files("m0.csv", M0), "--row-space")
    assert doc["solutions"] == [[0.0, 0.0, 0.0]]
    _, doc = run(capsys, "lcp", eye, "--q-file", files("q.csv", [[-1.0, -1.0]]))
    assert doc["solutions"] == [[1.0, 1.0]]


# --- exit codes and configuration -----------------------------------------

@pytest.mark.parametrize("argv", [
    ["verify", "--theorem", "NOPE"],
    ["verify"],
])
def test_usage_errors(capsys, argv):
    code, doc = run(capsys, *argv)
    assert code == 2 and doc["error"] == "usage"


def test_usage_errors_with_files(capsys, files, tmp_path):
    m = files("m.csv", np.eye(2))
    assert run(capsys, "gppt", m)[0] == 2  # no split
    assert run(capsys, "gppt", m, "--split", "3")[0] == 2
    assert run(capsys, "gppt", files("r.csv", np.ones((2, 3))), "--split", "1")[0] == 2
    assert run(capsys, "check", m, "--predicate", "ginverse")[0] == 2
    assert run(capsys, "lcp", m, "--q", "1,x")[0] == 2
    assert run(capsys, "lcp", m, "--q", "1,2,3")[0] == 2
    assert run(capsys, "pinv", str(tmp_path / "missing.csv"))[0] == 2
    bad = tmp_path / "bad.csv"
    bad.write_text("1,2\n3\n")
    assert run(capsys, "pinv", str(bad))[0] == 2


def test_argparse_errors_exit_2(capsys):
    with pytest.raises(SystemExit) as info:
        main(["check", "x.csv", "--predicate", "unknown"])
    assert info.value.code == 2
    with pytest.raises(SystemExit) as info:
        main([])
    assert info.value.code == 2


def test_numeric_exit(capsys, files):
    code, doc = run(capsys, "pinv", files("big.csv", np.full((2, 2), 1e308)))
    assert code == 3 and doc["error"] == "numeric"


def test_size_cap_exit(capsys, files):
    m = files("big.csv", np.eye(9))
    code, doc = run(capsys, "check", m, "--predicate", "r-dagger")
    assert code == 4 and doc["error"] == "size_cap"
    code, _ = run(capsys, "check", m, "--predicate", "p-dagger", "--size-cap", "9")
    assert code == 0
    code, _ = run(capsys, "check", files("s.csv", np.eye(3)), "--predicate", "p-dagger", "--size-cap", "2")
    assert code == 4


def test_config_file_and_seed_precedence(capsys, tmp_path, monkeypatch):
    cfg = tmp_path / "run.json"
    cfg.write_text(json.dumps({"seed": 11, "trials": 5, "tolerances": {"eq_tol": 1e-8}}))
    _, doc = run(capsys, "verify", "--theorem", "T_GRAM", "--config", str(cfg))
    assert doc["seed"] == 11 and doc["trials_per_theorem"] == 5 and doc["tolerances"]["eq_tol"] == 1e-8
    _, doc = run(capsys, "verify", "--theorem", "T_GRAM", "--config", str(cfg), "--seed", "3", "--eq-tol", "1e-7")
    assert doc["seed"] == 3 and doc["tolerances"]["eq_tol"] == 1e-7
    monkeypatch.setenv("GPPT_SEED", "5")
    _, doc = run(capsys, "verify", "--theorem", "T_GRAM", "--trials", "2")
    assert doc["seed"] == 5
    # a seed in the config file beats the environment
    _, doc = run(capsys, "verify", "--theorem", "T_GRAM", "--config", str(cfg))
    assert doc["seed"] == 11
    monkeypatch.setenv("GPPT_SEED", "five")
    assert run(capsys, "verify", "--theorem", "T_GRAM", "--trials", "2")[0] == 2


def test_bad_config_files(capsys, tmp_path):
    for content in ("[1, 2]", "{bad", json.dumps({"colour": 1}), json.dumps({"trials": 0}),
                    json.dumps({"tolerances": {"eq_tol": -1}}), json.dumps({"seed": "x"})):
        cfg = tmp_path / "c.json"
        cfg.write_text(content)
        code, doc = run(capsys, "verify", "--theorem", "T_GRAM", "--config", str(cfg))
        assert code == 2, content


def test_runconfig_roundtrip():
    rc = RunConfig(seed=4, trials=9)
    assert RunConfig.from_dict(rc.to_dict()) == rc
    with pytest.raises(UsageError):
        RunConfig(seed=-1)


def test_tolerance_flag_changes_verdict(capsys, files):
    # a singular matrix with a tiny off-range entry: exact EP test fails at default, passes loosely
    s = files("s.csv", [[1.0, 0.0], [1e-6, 0.0]])
    assert run(capsys, "check", s, "--predicate", "ep")[1]["holds"] is False
    assert run(capsys, "check", s, "--predicate", "ep", "--eq-tol", "1e-3")[1]["holds"] is True


def test_console_entry_point(tmp_path):
    p = tmp_path / "a.csv"
    p.write_text("1,1\n1,1\n")
    res = subprocess.run([sys.executable, "-m", "gpptkit.cli", "pinv", str(p)], capture_output=True, text=True)
    assert res.returncode == 0
    assert json.loads(res.stdout)["rank"] == 1
    res = subprocess.run([sys.executable, "-m", "gpptkit.cli", "verify", "--theorem", "NOPE"],
                         capture_output=True, text=True)
    assert res.returncode == 2 and "unknown theorem" in res.stderr
