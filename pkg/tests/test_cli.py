import csv
import io
import json
import math
import subprocess
import sys

import pytest
from scipy.special import gamma as G

from fraccob.cli import RunConfig, cmd_table, cmd_traj, main
from fraccob.cobweb import DemandModel, derive, price_at

EX1 = ["--alpha", "40", "--beta", "-10", "--alpha1", "2", "--beta1", "9", "--c", "20"]
EX2 = [
    "--model", "supply", "--alpha", "80", "--beta", "-4", "--alpha1", "-10",
    "--beta1", "2", "--delta", "3", "--c", "20",
]


def run(capsys, *argv):
    rc = main(list(argv))
    out, err = capsys.readouterr()
    return rc, out, err


def parse_csv(text):
    return list(csv.reader(io.StringIO(text)))


class TestMlf:
    def test_exponential(self, capsys):
        rc, out, _ = run(capsys, "mlf", "eval", "--mu", "1", "--gamma", "1", "--z", "-3")
        assert rc == 0
        assert out.strip() == "0.0497871"

    def test_asymptotic_region(self, capsys):
        _, out, _ = run(capsys, "mlf", "--mu", "0.5", "--z", "-19")
        assert float(out) == pytest.approx(0.0297, abs=1e-4)

    def test_origin(self, capsys):
        _, out, _ = run(capsys, "mlf", "--mu", "0.7", "--gamma", "0.9", "--z", "0", "--precision", "17")
        assert float(out) == pytest.approx(1 / G(0.9), rel=1e-15)

    def test_bad_order(self, capsys):
        rc, _, err = run(capsys, "mlf", "--mu", "3", "--z", "1")
        assert rc == 1
        assert "error" in err


class TestTable:
    def test_layout(self, capsys):
        rc, out, _ = run(capsys, "table", *EX1, "--mu", "0.5", "--times", "100,1000,10000")
        assert rc == 0
        rows = parse_csv(out)
        assert rows[0] == ["nu", "100", "1000", "10000", "p_e"]
        assert [r[0] for r in rows[1:]] == ["0", "0.2", "0.4", "0.6", "0.8", "1"]
        assert all(r[-1] == "2" for r in rows[1:])
        assert "\r" not in out

    def test_caputo_cell(self, capsys):
        _, out, _ = run(capsys, "table", *EX1, "--mu", "0.5", "--nu", "1", "--times", "100")
        assert float(parse_csv(out)[1][1]) == pytest.approx(2.5338, rel=1e-3)

    def test_supply_equilibrium_cell(self, capsys):
        _, out, _ = run(capsys, "table", *EX2, "--mu", "0.9", "--nu", "0.8", "--times", "10000")
        assert float(parse_csv(out)[1][1]) == pytest.approx(15, abs=1e-3)

    def test_all_zero(self, capsys):
        argv = ["--alpha", "2", "--beta", "-10", "--alpha1", "2", "--beta1", "9", "--c", "0"]
        _, out, _ = run(capsys, "table", *argv, "--mu", "0.3", "--times", "1", "10", "100")
        for row in parse_csv(out)[1:]:
            assert all(float(x) == 0.0 for x in row[1:])

    def test_cells_are_price_at(self):
        cfg = RunConfig(alpha=40, beta=-10, alpha1=2, beta1=9, c=20, mu=(0.1, 0.5), times=(3.0, 100.0))
        for tb in cmd_table(cfg):
            for nu, row in zip(tb.nu, tb.cells):
                d = derive(DemandModel(40, -10, 2, 9, tb.mu, nu, 20))
                assert row == tuple(price_at(d, 20, t) for t in tb.times)

    def test_round_trip_17_digits(self, capsys):
        cfg = RunConfig(alpha=40, beta=-10, alpha1=2, beta1=9, c=20, mu=(0.7,), times=(0.5, 7.0, 1e4))
        _, out, _ = run(
            capsys, "table", *EX1, "--mu", "0.7", "--times", "0.5,7,1e4", "--precision", "17"
        )
        parsed = [tuple(float(x) for x in r[1:-1]) for r in parse_csv(out)[1:]]
        assert parsed == list(cmd_table(cfg)[0].cells)

    def test_several_mu_add_column(self, capsys):
        _, out, _ = run(capsys, "table", *EX1, "--mu", "0.5", "0.9", "--nu", "1", "--times", "10")
        rows = parse_csv(out)
        assert rows[0][0] == "mu"
        assert [r[0] for r in rows if r[0] != "mu"] == ["0.5", "0.9"]

    def test_json(self, capsys):
        _, out, _ = run(capsys, "table", *EX1, "--mu", "0.5", "--times", "100", "--format", "json")
        doc = json.loads(out)
        assert doc[0]["p_e"] == 2.0
        assert len(doc[0]["p"]) == 6

    def test_degenerate_exits_nonzero(self, capsys):
        argv = ["--alpha", "1", "--beta", "-2", "--alpha1", "1", "--beta1", "-2", "--c", "1"]
        rc, out, err = run(capsys, "table", *argv, "--mu", "0.5", "--times", "1")
        assert rc == 1
        assert out == ""
        assert err.startswith("fraccob: error")

    def test_missing_coefficients(self, capsys):
        rc, _, err = run(capsys, "table", "--mu", "0.5", "--times", "1")
        assert rc == 1
        assert "--alpha" in err


class TestTraj:
    def test_single_cell_matches_table(self):
        cfg = RunConfig(alpha=40, beta=-10, alpha1=2, beta1=9, c=20, mu=(0.5,), nu=(0.4,), times=(37.0,))
        (row,) = cmd_traj(cfg)
        assert row[3] == cmd_table(cfg)[0].cells[0][0]

    def test_log_range(self, capsys):
        rc, out, _ = run(
            capsys, "traj", *EX1, "--mu", "0.5", "--nu", "0", "1",
            "--t-start", "0.01", "--t-end", "1e4",
        )
        assert rc == 0
        rows = parse_csv(out)
        assert rows[0] == ["nu", "t", "p"]
        assert len(rows) == 1 + 2 * 400
        ts = [float(r[1]) for r in rows[1:401]]
        assert ts[0] == pytest.approx(0.01) and ts[-1] == pytest.approx(1e4)
        assert all(b > a for a, b in zip(ts, ts[1:]))

    def test_supply_family(self, capsys):
        _, out, _ = run(
            capsys, "traj", *EX2, "--nu", "0.8", "--mu", "0.1,0.3,0.5,0.7,0.9",
            "--t-start", "1", "--t-end", "100", "--points", "5",
        )
        rows = parse_csv(out)
        assert rows[0] == ["mu", "nu", "t", "p"]
        assert len(rows) == 1 + 5 * 5

    def test_needs_time_spec(self, capsys):
        rc, _, err = run(capsys, "traj", *EX1, "--mu", "0.5")
        assert rc == 1
        assert "--times" in err


class TestVerify:
    def test_report_schema(self, capsys):
        rc, out, _ = run(capsys, "verify", *EX1, "--mu", "0.5", "--nu", "0.5", "--h", "0.01")
        assert rc == 0
        rep = json.loads(out)
        for key in ("model", "mu", "nu", "h", "max_residual", "refinement_ratio", "grid", "residuals"):
            assert key in rep
        assert len(rep["grid"]) == len(rep["residuals"])
        assert rep["grid"][0] == pytest.approx(0.5)
        # second order scheme: halving h divides the error by about four
        assert 3.0 < rep["refinement_ratio"] < 5.0

    def test_zero_solution(self, capsys):
        argv = ["--alpha", "2", "--beta", "-10", "--alpha1", "2", "--beta1", "9", "--c", "0"]
        _, out, _ = run(capsys, "verify", *argv, "--mu", "0.5", "--nu", "0.5", "--t-end", "5")
        assert json.loads(out)["max_residual"] < 1e-12

    def test_supply_decreases(self, capsys):
        _, out, _ = run(capsys, "verify", *EX2, "--mu", "0.9", "--nu", "0.8", "--t-end", "5")
        rep = json.loads(out)
        assert math.isfinite(rep["max_residual"])
        assert rep["max_residual_half_step"] < rep["max_residual"]


class TestConfig:
    def test_file_then_flags(self, tmp_path, capsys):
        path = tmp_path / "run.json"
        path.write_text(
            json.dumps(
                {"alpha": 40, "beta": -10, "alpha1": 2, "beta1": 9, "c": 20,
                 "mu": [0.5], "nu": [0, 1], "times": [100]}
            )
        )
        _, from_file, _ = run(capsys, "table", "--config", str(path))
        assert len(parse_csv(from_file)) == 3
        _, overridden, _ = run(capsys, "table", "--config", str(path), "--nu", "1", "--c", "5")
        rows = parse_csv(overridden)
        assert len(rows) == 2
        d = derive(DemandModel(40, -10, 2, 9, 0.5, 1.0, 5.0))
        assert float(rows[1][1]) == pytest.approx(price_at(d, 5.0, 100.0), rel=1e-5)

    def test_unknown_key(self, tmp_path, capsys):
        path = tmp_path / "run.json"
        path.write_text(json.dumps({"colour": "red"}))
        rc, _, err = run(capsys, "table", "--config", str(path))
        assert rc == 1
        assert "colour" in err

    def test_missing_file(self, tmp_path, capsys):
        rc, _, _ = run(capsys, "table", "--config", str(tmp_path / "nope.json"))
        assert rc == 1

    def test_out_file(self, tmp_path, capsys):
        target = tmp_path / "t.csv"
        rc, out, _ = run(capsys, "table", *EX1, "--mu", "0.5", "--times", "100", "--out", str(target))
        assert rc == 0 and out == ""
        assert target.read_bytes().startswith(b"nu,100,p_e\n")


def test_console_entry_point():
    proc = subprocess.run(
        [sys.executable, "-m", "fraccob.cli", "mlf", "--mu", "1", "--z", "0"],
        capture_output=True,
        text=True,
        check=False,
    )
    assert proc.returncode == 0
    assert proc.stdout.strip() == "1"
