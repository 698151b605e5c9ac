import csv
import filecmp
import io
import os
import subprocess
import sys
from pathlib import Path

import pytest

from rsslocate import cli


def run(argv, capsys):
    code = cli.main(argv)
    return code, capsys.readouterr()


def read_csv(path):
    with open(path, newline="", encoding="utf-8") as fh:
        return list(csv.reader(fh))


class TestTrial:
    def test_noiseless_summary(self, tmp_path, capsys):
        code, out = run(["trial", "--strategy", "corner", "--sigma", "0", "--true-n", "3", "--seed", "1", "--out", str(tmp_path)], capsys)
        assert code == 0
        fields = dict(kv.split("=", 1) for kv in out.out.split() if "=" in kv)
        assert float(fields["n_opt"]) == 3.0
        assert float(fields["error_m"]) < 1e-6
        for name in ("trajectory.csv", "measurements.csv", "cost_curve.csv", "result.csv"):
            assert (tmp_path / name).exists()
        traj = read_csv(tmp_path / "trajectory.csv")
        assert traj[0] == ["epoch", "x", "y"] and len(traj) == 152
        curve = read_csv(tmp_path / "cost_curve.csv")
        assert curve[0] == ["n_j", "cost"] and len(curve) == 42
        result = read_csv(tmp_path / "result.csv")
        assert result[1][0] == "ok"

    def test_invalid_exponent(self, capsys):
        with pytest.raises(SystemExit) as info:
            cli.main(["trial", "--true-n", "0"])
        assert info.value.code != 0

    def test_byte_identical(self, tmp_path, capsys):
        for d in ("a", "b"):
            assert cli.main(["trial", "--strategy", "random", "--seed", "5", "--out", str(tmp_path / d)]) == 0
        names = ["trajectory.csv", "measurements.csv", "cost_curve.csv", "result.csv"]
        match, mismatch, errors = filecmp.cmpfiles(tmp_path / "a", tmp_path / "b", names, shallow=False)
        assert match == names

    def test_line_endings(self, tmp_path, capsys):
        cli.main(["trial", "--out", str(tmp_path)])
        raw = (tmp_path / "measurements.csv").read_bytes()
        assert b"\r" not in raw and raw.endswith(b"\n")
        raw.decode("utf-8")

    def test_env_seed_fallback(self, tmp_path, capsys, monkeypatch):
        monkeypatch.setenv(cli.SEED_ENV, "5")
        cli.main(["trial", "--strategy", "random", "--out", str(tmp_path / "env")])
        monkeypatch.delenv(cli.SEED_ENV)
        cli.main(["trial", "--strategy", "random", "--seed", "5", "--out", str(tmp_path / "flag")])
        assert (tmp_path / "env" / "result.csv").read_bytes() == (tmp_path / "flag" / "result.csv").read_bytes()

    def test_unwritable_output(self, tmp_path, capsys):
        blocker = tmp_path / "file"
        blocker.write_text("x")
        code, _ = run(["trial", "--out", str(blocker / "sub")], capsys)
        assert code == cli.EXIT_IO


class TestConfig:
    def test_precedence(self, tmp_path):
        cfg = tmp_path / "run.cfg"
        cfg.write_text("# sweep settings\nsigma = 1.5\ntrue-n = 2.5\nseed=9\ntable = 1, 2\n")
        parser = cli.build_parser()
        args = parser.parse_args(["sweep", "--config", str(cfg), "--sigma", "2.0"])
        resolved = cli.resolve(args, parser, environ={cli.SEED_ENV: "4"})
        assert resolved["sigma"] == 2.0
        assert resolved["true_n"] == 2.5
        assert resolved["seed"] == 9
        assert resolved["table"] == [1, 2]
        assert resolved["r0"] == -27.0
        assert resolved["trials"] == 100

    def test_env_below_flags(self):
        parser = cli.build_parser()
        args = parser.parse_args(["trial", "--seed", "3"])
        assert cli.resolve(args, parser, environ={cli.SEED_ENV: "4"})["seed"] == 3
        args = parser.parse_args(["trial"])
        assert cli.resolve(args, parser, environ={cli.SEED_ENV: "4"})["seed"] == 4
        assert cli.resolve(args, parser, environ={})["seed"] == 0

    def test_bad_key(self, tmp_path):
        cfg = tmp_path / "bad.cfg"
        cfg.write_text("colour = blue\n")
        parser = cli.build_parser()
        with pytest.raises(SystemExit):
            cli.resolve(parser.parse_args(["trial", "--config", str(cfg)]), parser, environ={})


class TestSweep:
    def test_table_layout(self, tmp_path, capsys):
        code, _ = run(["sweep", "--table", "2", "--seed", "7", "--trials", "3", "--out", str(tmp_path)], capsys)
        assert code == 0
        rows = read_csv(tmp_path / "table_II.csv")
        assert rows[0] == ["n", "2.0", "2.5", "3.0", "3.5", "4.0"]
        assert [r[0] for r in rows[1:]] == ["Random", "Proposed"]
        assert all(float(v) >= 0 for r in rows[1:] for v in r[1:])

    def test_table_out_of_range(self, capsys):
        with pytest.raises(SystemExit) as info:
            cli.main(["sweep", "--table", "9"])
        assert info.value.code == 2

    def test_needs_selector(self, capsys):
        with pytest.raises(SystemExit):
            cli.main(["sweep"])

    def test_figure_schema(self, tmp_path, capsys):
        cli.main(["sweep", "--figure", "2", "--trials", "3", "--out", str(tmp_path)])
        rows = read_csv(tmp_path / "figure_2.csv")
        assert rows[0] == ["error_m", "cdf_random", "cdf_proposed"]
        assert float(rows[-1][1]) == 1.0 and float(rows[-1][2]) == 1.0
        assert not (tmp_path / "table_I.csv").exists()

    def test_all_smoke_subprocess(self, tmp_path):
        import time

        t0 = time.perf_counter()
        proc = subprocess.run(
            [sys.executable, "-m", "rsslocate", "sweep", "--all", "--trials", "5", "--out", str(tmp_path)],
            capture_output=True, text=True, env={**os.environ, "PYTHONHASHSEED": "0"},
        )
        elapsed = time.perf_counter() - t0
        assert proc.returncode == 0, proc.stderr
        expected = {f"table_{r}.csv" for r in ("I", "II", "III", "IV", "V", "VI")} | {f"figure_{k}.csv" for k in (1, 2, 3)}
        assert expected <= {p.name for p in tmp_path.iterdir()}
        assert elapsed < 10.0
