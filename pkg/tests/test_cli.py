import csv
import json

import pytest

from rabi_texp import cli


def run(args):
    return cli.main(args)


def test_estimate_decoupled_point(tmp_path, capsys):
    out = tmp_path / "est.json"
    code = run([
        "estimate", "--omega", "1", "--g", "0", "--kind", "nonsym",
        "--method", "var", "--order", "1", "--out", str(out),
    ])
    assert code == 0
    record = json.loads(out.read_text())
    assert record["energy"] == pytest.approx(-0.5, abs=1e-9)
    assert record["oracle"] == pytest.approx(-0.5, abs=1e-9)
    assert record["method"] == "var"
    assert record["order"] == 1
    assert set(record) == {
        "method", "order", "energy", "x_opt", "y_opt",
        "grad_norm", "oracle", "rel_error",
    }


def test_estimate_prints_json(capsys):
    code = run([
        "estimate", "--omega", "1", "--g", "0.1", "--kind", "pparity",
        "--method", "csm", "--order", "3",
    ])
    assert code == 0
    record = json.loads(capsys.readouterr().out)
    assert record["rel_error"] < 1e-4


def test_estimate_no_solution_exit_code(monkeypatch, capsys):
    from rabi_texp.errors import NoPhysicalSolution

    def boom(*args, **kwargs):
        raise NoPhysicalSolution("forced")

    monkeypatch.setattr(cli, "estimate_energy", boom)
    code = run(["estimate", "--omega", "1", "--g", "0.5"])
    assert code == 2
    assert "optimization failed" in capsys.readouterr().err


def test_estimate_oracle_not_converged_exit_code(capsys):
    # omega = 0.02 pushes the oracle past its cutoff cap
    code = run([
        "estimate", "--omega", "0.02", "--g", "1", "--kind", "nonsym",
        "--method", "var", "--order", "1",
    ])
    assert code == 3
    assert "did not converge" in capsys.readouterr().err


def read_rows(path):
    with open(path, newline="") as handle:
        return list(csv.DictReader(handle))


def test_sweep_csv_layout_and_self_consistency(tmp_path):
    out = tmp_path / "sweep.csv"
    code = run([
        "sweep", "--omega", "1", "--kind", "pparity", "--method", "csm",
        "--order", "3", "--g-start", "0.0", "--g-stop", "0.2",
        "--g-count", "5", "--out", str(out),
    ])
    assert code == 0
    rows = read_rows(out)
    assert len(rows) == 5
    assert list(rows[0]) == [
        "g", "x_opt", "y_opt", "energy", "branch_label",
        "method", "order", "exact", "rel_error",
    ]
    for row in rows:
        assert row["branch_label"] == "Physical"
        assert row["method"] == "csm"
        recomputed = abs(float(row["energy"]) - float(row["exact"])) / abs(
            float(row["exact"])
        )
        assert recomputed == pytest.approx(float(row["rel_error"]), rel=1e-6)
    # LF line endings
    raw = out.read_bytes()
    assert b"\r" not in raw


def test_sweep_deterministic(tmp_path):
    args = [
        "sweep", "--omega", "1", "--kind", "nonsym", "--method", "var",
        "--order", "1", "--g-start", "0.1", "--g-stop", "0.3", "--g-count", "3",
    ]
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    assert run(args + ["--out", str(a)]) == 0
    assert run(args + ["--out", str(b)]) == 0
    assert a.read_bytes() == b.read_bytes()


def test_sweep_rejects_single_point(capsys):
    code = run([
        "sweep", "--omega", "1", "--g-start", "0", "--g-stop", "1",
        "--g-count", "1",
    ])
    assert code == 1


def test_sweep_trivial_branch_structure(tmp_path):
    # non-symmetrized variational branch: x = 0 up to g = 1/4, then rising
    out = tmp_path / "varsweep.csv"
    assert run([
        "sweep", "--omega", "1", "--kind", "nonsym", "--method", "var",
        "--order", "1", "--g-start", "0.0", "--g-stop", "0.6",
        "--g-count", "13", "--out", str(out),
    ]) == 0
    rows = read_rows(out)
    for row in rows:
        g = float(row["g"])
        x = float(row["x_opt"])
        if g < 0.24:
            assert abs(x) < 1e-5
        if g > 0.3:
            assert x > 0.01
            assert x <= 2.0 * g + 1e-9


def test_config_file_defaults(tmp_path, capsys):
    config = tmp_path / "run.conf"
    config.write_text("omega = 1\nkind = pparity\nmethod = var\norder = 1\n")
    code = run(["--config", str(config), "estimate", "--g", "0"])
    assert code == 0
    record = json.loads(capsys.readouterr().out)
    assert record["method"] == "var"
    assert record["energy"] == pytest.approx(-0.5, abs=1e-9)


def test_config_flag_overrides_file(tmp_path, capsys):
    config = tmp_path / "run.conf"
    config.write_text("omega = 2\nmethod = var\norder = 1\n")
    code = run([
        "--config", str(config), "estimate", "--g", "0", "--omega", "1",
        "--kind", "nonsym",
    ])
    assert code == 0
    record = json.loads(capsys.readouterr().out)
    assert record["oracle"] == pytest.approx(-0.5, abs=1e-9)


def test_reproduce_table2(tmp_path):
    out = tmp_path / "table2.csv"
    assert run(["reproduce", "table2", "--out", str(out)]) == 0
    rows = read_rows(out)
    assert [row["quantity"] for row in rows] == [
        "E1_var_nparity", "E1_cmx5_nparity", "E1_csm6_nparity", "E1_exact",
    ]
    # relative errors are scale-free and pinned by the published table
    assert float(rows[0]["rel_error"]) == pytest.approx(0.39, rel=0.05)
    assert float(rows[1]["rel_error"]) == pytest.approx(0.000335, rel=0.05)
    assert float(rows[2]["rel_error"]) == pytest.approx(0.00197, rel=0.05)


def test_reproduce_fig3_rows(tmp_path):
    out = tmp_path / "fig3.csv"
    assert run(["reproduce", "fig3", "--out", str(out)]) == 0
    rows = read_rows(out)
    orders = [(row["method"], row["order"]) for row in rows]
    assert orders == [
        ("csm", "1"), ("csm", "3"), ("csm", "4"), ("csm", "5"), ("csm", "6"),
        ("cmx", "1"), ("cmx", "3"), ("cmx", "5"), ("exact", ""),
    ]
    errors = [float(r["rel_error"]) for r in rows if r["method"] == "csm"]
    assert errors == sorted(errors, reverse=True)
