"""Command line subcommands: wiring, exit codes, seed logging, determinism."""

import subprocess
import sys

import numpy as np
import pytest

from bgmlab import __version__
from bgmlab.bounds import qfunc
from bgmlab.cli import main
from bgmlab.ensemble import SystematicCode, encode, iowef, load_code, save_code
from bgmlab.gf2 import BitMatrix, bits_from_string


def run_cli(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


class TestThreshold:
    def test_three_six_pair(self, capsys):
        code, out, _ = run_cli(capsys, "threshold", "--dc", "3", "--dr", "6")
        assert code == 0
        assert abs(float(out.strip()) - 0.102) < 0.002


class TestBounds:
    def test_zero_generator_columns_collapse_to_q(self, capsys, tmp_path):
        path = str(tmp_path / "zero.npz")
        save_code(SystematicCode(4, 2, BitMatrix(4, 2, [[], [], [], []])), path)
        code, out, _ = run_cli(capsys, "bounds", "--code", path, "--sigma", "0.8")
        assert code == 0
        lines = dict(line.split(": ") for line in out.strip().splitlines())
        q = float(qfunc(1.0 / 0.8))
        assert float(lines["ber_lower_bound"]) == pytest.approx(q, rel=1e-5)
        assert lines["fer_lower_bound"] == lines["fer_lower_bound_approx"]


class TestSampleAndEncode:
    def test_round_trip(self, capsys, tmp_path):
        path = str(tmp_path / "code.npz")
        code, out, _ = run_cli(
            capsys, "sample-code", "--construction", "bgm",
            "--k", "8", "--m", "4", "--rho", "0.3", "--seed", "5", "--out", path,
        )
        assert code == 0
        assert (tmp_path / "code.npz.json").exists()
        saved = load_code(path)

        code, out, _ = run_cli(capsys, "encode", "--code", path, "--message", "10110001")
        assert code == 0
        expected = encode(saved, bits_from_string("10110001"))
        assert out.strip() == "".join(str(int(b)) for b in expected)

    def test_omitted_seed_is_logged(self, capsys, tmp_path):
        path = str(tmp_path / "c.npz")
        code, _, err = run_cli(
            capsys, "sample-code", "--k", "4", "--m", "4", "--rho", "0.5", "--out", path,
        )
        assert code == 0
        assert "seed: " in err

    def test_wrong_message_length_exits_nonzero(self, capsys, tmp_path):
        path = str(tmp_path / "code.npz")
        run_cli(capsys, "sample-code", "--k", "8", "--m", "4", "--seed", "1", "--out", path)
        code, _, err = run_cli(capsys, "encode", "--code", path, "--message", "101")
        assert code == 2
        assert "error:" in err


class TestSimulate:
    def write_config(self, tmp_path):
        cfg = tmp_path / "cfg.json"
        cfg.write_text(
            """
            {
              "code": {"construction": "uncoded", "k": 200},
              "channel": {"type": "bsc"},
              "sweep": [0.1, 0.05],
              "stop": {"min_frame_errors": 1000, "max_frames": 30},
              "seed": 9
            }
            """
        )
        return str(cfg)

    def test_same_seed_byte_identical(self, capsys, tmp_path):
        cfg = self.write_config(tmp_path)
        out1, out2 = str(tmp_path / "a.csv"), str(tmp_path / "b.csv")
        assert run_cli(capsys, "simulate", "--config", cfg, "--out", out1)[0] == 0
        assert run_cli(capsys, "simulate", "--config", cfg, "--out", out2)[0] == 0
        with open(out1, "rb") as f1, open(out2, "rb") as f2:
            assert f1.read() == f2.read()

    def test_seed_override_changes_header(self, capsys, tmp_path):
        cfg = self.write_config(tmp_path)
        out = str(tmp_path / "c.csv")
        run_cli(capsys, "simulate", "--config", cfg, "--out", out, "--seed", "77")
        with open(out) as fh:
            assert "seed=77" in fh.readline()

    def test_missing_config_exits_nonzero(self, capsys, tmp_path):
        code, _, err = run_cli(
            capsys, "simulate", "--config", str(tmp_path / "nope.json"),
            "--out", str(tmp_path / "x.csv"),
        )
        assert code == 2
        assert "error:" in err


class TestGraphgen:
    def test_writes_edges_and_sidecar(self, capsys, tmp_path):
        d1 = tmp_path / "var.txt"
        d2 = tmp_path / "chk.txt"
        d1.write_text("\n".join(["2"] * 20 + ["4"] * 20))
        d2.write_text("\n".join(["4"] * 30))
        out = str(tmp_path / "graph.txt")
        code, stdout, _ = run_cli(
            capsys, "graphgen", "--var-degrees", str(d1), "--chk-degrees", str(d2),
            "--r-star", "0.0", "--epsilon", "0.3", "--seed", "4", "--out", out,
        )
        assert code == 0
        assert "r_measured=" in stdout
        edges = np.loadtxt(out, dtype=np.int64)
        assert edges.shape == (120, 2)
        var_deg = np.bincount(edges[:, 0], minlength=40)
        assert sorted(var_deg.tolist()) == sorted([2] * 20 + [4] * 20)
        import json

        with open(out + ".json") as fh:
            sidecar = json.load(fh)
        assert sidecar["seed"] == 4
        assert abs(sidecar["r_measured"]) <= 0.3

    def test_unreachable_profile_exits_one(self, capsys, tmp_path):
        d1 = tmp_path / "var.txt"
        d2 = tmp_path / "chk.txt"
        d1.write_text("3\n1\n")
        d2.write_text("2\n2\n")
        code, _, err = run_cli(
            capsys, "graphgen", "--var-degrees", str(d1), "--chk-degrees", str(d2),
            "--r-star", "0.0", "--epsilon", "0.3", "--seed", "0",
            "--out", str(tmp_path / "g.txt"),
        )
        assert code == 1
        assert "graph generation failed" in err


class TestPopdynCommand:
    def test_emits_csv_rows(self, capsys):
        code, out, _ = run_cli(
            capsys, "popdyn", "--regular", "--dv", "3", "--dc", "6",
            "--channel", "bec", "--param", "0.3",
            "--population", "2000", "--iterations", "3", "--seed", "1",
        )
        assert code == 0
        lines = out.strip().splitlines()
        assert lines[0] == "iteration,error_rate,edge_error_rate,llr_mean,llr_var"
        assert len(lines) == 4
        rates = [float(line.split(",")[1]) for line in lines[1:]]
        assert rates[-1] <= rates[0]


class TestConcatSimCommand:
    def test_smoke(self, capsys):
        code, out, _ = run_cli(
            capsys, "concat-sim", "--r", "3", "--blocks", "2", "--inner-m", "8",
            "--rho", "0.2", "--sigma", "0.4", "--frames", "5", "--seed", "3",
        )
        assert code == 0
        assert out.startswith("frames=5 ber=")


class TestExponentCommand:
    def test_capacity_mode(self, capsys):
        code, out, _ = run_cli(
            capsys, "exponent", "--channel", "bsc", "--param", "0.11", "--p", "0.5",
        )
        assert code == 0
        lines = dict(line.split(": ") for line in out.strip().splitlines())
        assert float(lines["capacity_bits"]) == pytest.approx(0.4998, abs=2e-3)
        assert lines["partial_mi_bits"] == lines["capacity_bits"]

    def test_exponent_mode_positive_at_zero_rate(self, capsys):
        code, out, _ = run_cli(
            capsys, "exponent", "--channel", "awgn", "--param", "1.0",
            "--p", "0.4", "--rate", "0.0",
        )
        assert code == 0
        assert float(out.split(": ")[1]) > 0.0


class TestIowefCommand:
    def test_rows_match_library(self, capsys):
        code, out, _ = run_cli(capsys, "iowef", "--k", "2", "--m", "2", "--rho", "0.5")
        assert code == 0
        table = iowef(2, 2, 0.5).coefficients
        for line in out.strip().splitlines():
            i, j, value = line.split(",")
            assert float(value) == pytest.approx(table[int(i), int(j)], rel=1e-9)


class TestParserEdges:
    def test_unknown_flag_rejected(self):
        with pytest.raises(SystemExit) as exc:
            main(["threshold", "--dc", "3", "--dr", "6", "--frobnicate"])
        assert exc.value.code == 2

    def test_console_entry_point(self):
        proc = subprocess.run(
            [sys.executable, "-m", "bgmlab.cli", "--version"],
            capture_output=True, text=True,
        )
        assert proc.returncode == 0
        assert __version__ in proc.stdout
