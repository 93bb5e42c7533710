import csv
import io
import json
import subprocess
import sys

import pytest

from aloff_wallach.cli import fmt, main


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_fmt_nine_significant_digits():
    assert fmt(1 / 3) == "0.333333333"
    assert fmt(2.0) == "2"
    assert fmt(float("nan")) == "nan"
    assert fmt(-1.5e-20) == "-1.5e-20"


def test_classify_irreducible_pair(capsys):
    code, out, _ = run(capsys, "classify", "--k", "1", "--l", "-1", "--A", "0.5", "--B", "1", "--C", "1",
                       "--D", "1", "--n", "2", "--gauge", "so3")
    assert code == 0
    assert "sigma1=1.5" in out
    assert out.count("irreducible b=") == 2


def test_classify_family_notice(capsys):
    code, out, _ = run(capsys, "classify", "--k", "1", "--l", "2", "--A", "1", "--B", "1", "--C", "1",
                       "--D", "1", "--n", "0", "--gauge", "u1")
    assert code == 0
    assert "family_dim=1" in out


def test_classify_json(capsys):
    code, out, _ = run(capsys, "classify", "--k", "1", "--l", "2", "--A", "1.1", "--B", "0.8", "--C", "1.3",
                       "--D", "0.9", "--json")
    assert code == 0
    reports = json.loads(out)
    assert [r["n"] for r in reports] == [-4, -1, 0, 5]


def test_invalid_parameter_exits_2(capsys):
    code, _, err = run(capsys, "classify", "--k", "1", "--l", "-1", "--A", "0", "--B", "1", "--C", "1",
                       "--D", "1")
    assert code == 2
    assert "nonzero" in err


def test_missing_parameter_exits_2(capsys):
    code, _, err = run(capsys, "classify", "--k", "1", "--l", "2", "--A", "1")
    assert code == 2 and "--B" in err


def test_unknown_flag_exits_2(capsys):
    assert run(capsys, "sweep", "--bogus")[0] == 2


@pytest.mark.parametrize("fix", ["B=1,C=1", "B=1,C=1,D=1,A=2", "B=1,C=1,X=1", "B1,C=1,D=1"])
def test_sweep_axis_errors(capsys, fix):
    code, _, _ = run(capsys, "sweep", "--k", "1", "--l", "-1", "--n", "2", "--vary", "A", "--from", "0.1",
                     "--to", "1", "--steps", "3", "--fix", fix)
    assert code == 2


def test_sweep_single_step(capsys):
    code, out, _ = run(capsys, "sweep", "--k", "1", "--l", "-1", "--n", "2", "--vary", "A", "--from", "0.5",
                       "--to", "1", "--steps", "1", "--fix", "B=1,C=1,D=1")
    assert code == 0
    rows = list(csv.DictReader(io.StringIO(out)))
    assert len(rows) == 1 and rows[0]["param_value"] == "0.5"


def test_sweep_is_byte_deterministic(tmp_path):
    args = ["sweep", "--k", "1", "--l", "-5", "--n", "6", "--vary", "A", "--from", "0.05", "--to", "1.6",
            "--steps", "60", "--fix", "B=1,C=1,D=1"]
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    assert main(args + ["--out", str(a)]) == 0
    assert main(args + ["--out", str(b)]) == 0
    assert a.read_bytes() == b.read_bytes()
    assert b"\r" not in a.read_bytes()


def test_sweep_figure_written(tmp_path):
    fig = tmp_path / "branches.png"
    code = main(["sweep", "--k", "1", "--l", "-1", "--n", "2", "--vary", "A", "--from", "0.05", "--to", "1.4",
                 "--steps", "30", "--fix", "B=1,C=1,D=1", "--out", str(tmp_path / "s.csv"), "--figure", str(fig)])
    assert code == 0
    assert fig.read_bytes()[:8] == b"\x89PNG\r\n\x1a\n"


def test_np_solve_table_and_csv(capsys, tmp_path):
    path = tmp_path / "np.csv"
    code, out, _ = run(capsys, "np-solve", "--k", "1", "--l", "2", "--csv", str(path), "--json")
    assert code == 0
    rows = json.loads(out)
    assert [r["branch"] for r in rows] == ["plus", "minus"]
    assert rows[0]["A"] == pytest.approx(2.82249, abs=1e-4)
    assert rows[0]["instanton_bundles"][0]["n"] == -4
    assert path.read_text().startswith("k,l,branch,A,B,C,D,lambda,residual\n")


def test_np_solve_no_convergence_exits_3(capsys, monkeypatch):
    import numpy as np

    import aloff_wallach.np_solver as mod
    monkeypatch.setattr(mod, "newton", lambda k, l, lam, x0, **kw: (np.asarray(x0), np.ones(len(x0))))
    code, _, err = run(capsys, "np-solve", "--k", "1", "--l", "2", "--starts", "2")
    assert code == 3 and "error" in err


def test_landscape_rejects_foreign_coefficient(capsys):
    code, _, err = run(capsys, "landscape", "--k", "1", "--l", "2", "--A", "1", "--B", "1", "--C", "1",
                       "--D", "1", "--n", "-1", "--a-name", "a2", "--resolution", "10")
    assert code == 2 and "a2" in err


def test_landscape_json(capsys, tmp_path):
    code, out, _ = run(capsys, "landscape", "--k", "1", "--l", "-1", "--np-branch", "minus", "--n", "-1",
                       "--a-name", "a3", "--resolution", "60", "--json", "--out", str(tmp_path / "g.csv"),
                       "--figure", str(tmp_path / "g.png"))
    assert code == 0
    crit = json.loads(out)
    assert sorted(c["index"] for c in crit) == [0, 0, 0, 1, 1]
    assert (tmp_path / "g.png").exists()


def test_verify_filter_and_json(capsys):
    code, out, _ = run(capsys, "verify", "--filter", "example5", "--json")
    assert code == 0
    records = json.loads(out)
    assert records and all(r["claim_id"].startswith("example5") for r in records)
    assert all(r["status"] == "pass" for r in records)


def test_verify_flagged_records_do_not_fail(capsys):
    code, out, _ = run(capsys, "verify", "--filter", "example7")
    assert code == 0
    assert "FLAGGED" in out and "0 fail" in out


def test_verify_failure_exits_1(capsys, monkeypatch):
    import aloff_wallach.verify as verify
    bad = verify.VerifyRecord("synthetic.claim", 1.0, 2.0, 0.1)
    monkeypatch.setattr(verify, "run_suite", lambda prefix="": [bad])
    code, out, _ = run(capsys, "verify")
    assert code == 1 and "FAIL" in out


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "aloff_wallach", "verify", "--filter", "squash"],
                          capture_output=True, text=True)
    assert proc.returncode == 0
    assert "squash.t0" in proc.stdout
