from __future__ import annotations

import csv
import io
import json
import subprocess
import sys

import pytest

from bqtsim import __version__, cli
from bqtsim.cli import EXIT_CHECK, EXIT_OK, EXIT_USAGE, ResultRecord


def run(args):
    out = io.StringIO()
    code = cli.run(args, stdout=out)
    return code, out.getvalue()


def csv_rows(text: str) -> list[list[str]]:
    body = [line for line in text.splitlines() if not line.startswith("#")]
    return list(csv.reader(body))


class TestBqtRun:
    def test_defaults_cover_all_branches(self):
        code, text = run(["bqt", "run"])
        assert code == EXIT_OK
        rows = csv_rows(text)
        assert rows[0][:3] == ["trial", "alice_outcome", "bob_outcome"]
        trials = rows[1:-1]
        assert len(trials) == 1000
        assert len({r[3] for r in trials}) == 16
        assert rows[-1][0] == "min"
        assert float(rows[-1][7]) >= 1 - 1e-9 and float(rows[-1][8]) >= 1 - 1e-9

    def test_single_trial_deterministic(self):
        a = run(["bqt", "run", "--trials", "1", "--seed", "77"])
        b = run(["bqt", "run", "--trials", "1", "--seed", "77"])
        assert a == b

    def test_invalid_amplitudes(self, capsys):
        code, text = run(["bqt", "run", "--alpha", "1,0:1,0"])
        assert code == EXIT_USAGE
        assert text == ""
        assert "expected 1" in capsys.readouterr().err

    def test_malformed_amplitudes(self):
        assert run(["bqt", "run", "--alpha", "0.6"])[0] == EXIT_USAGE
        assert run(["bqt", "run", "--alpha", "a,b:c,d"])[0] == EXIT_USAGE

    def test_normalize_small_deviation(self):
        code, _ = run(["bqt", "run", "--trials", "3", "--alpha", "0.6005,0:0.8,0", "--normalize"])
        assert code == EXIT_OK

    def test_normalize_refuses_large_deviation(self):
        code, _ = run(["bqt", "run", "--trials", "3", "--alpha", "0.7,0:0.8,0", "--normalize"])
        assert code == EXIT_USAGE

    def test_complex_and_sizes(self):
        code, text = run(["bqt", "run", "--trials", "20", "--n-alice", "5", "--n-bob", "2",
                          "--beta", "0.6,0:0,0.8", "--format", "json"])  # fmt: skip
        assert code == EXIT_OK
        rec = json.loads(text)
        assert rec["config"]["n_alice"] == 5
        assert rec["summary"]["min_fidelity"] >= 1 - 1e-9


class TestBqtBranches:
    def test_sixteen_rows(self):
        code, text = run(["bqt", "branches"])
        assert code == EXIT_OK
        rows = csv_rows(text)
        assert rows[0] == ["branch", "alice_outcome", "bob_outcome", "probability", "eta_overlap",
                           "alice_correction", "bob_correction", "fidelity_to_bob", "fidelity_to_alice"]  # fmt: skip
        assert [int(r[0]) for r in rows[1:]] == list(range(1, 17))
        for r in rows[1:]:
            assert float(r[3]) == pytest.approx(1 / 16, abs=1e-12)


class TestNoiseCommands:
    def test_bitflip_delta(self):
        code, text = run(["noise", "sweep", "--kind", "bitflip", "--grid", "0:1:11"])
        assert code == EXIT_OK
        rows = csv_rows(text)
        assert rows[0] == ["p", "f_exact", "f_closed_form", "delta"]
        assert len(rows) == 12
        assert all(abs(float(r[3])) < 1e-12 for r in rows[1:])

    def test_depolarizing_endpoint_reported(self):
        _, text = run(["noise", "sweep", "--kind", "depolarizing", "--format", "json"])
        last = json.loads(text)["rows"][-1]
        assert last[0] == 1.0
        assert last[1] == pytest.approx(1 / 3, abs=1e-12)
        assert last[2] == pytest.approx(27**-0.5, abs=1e-12)

    def test_invalid_kind(self):
        assert run(["noise", "sweep", "--kind", "bitflop"])[0] == EXIT_USAGE

    def test_invalid_grid(self):
        assert run(["noise", "sweep", "--grid", "0:1"])[0] == EXIT_USAGE

    def test_compare_covers_every_kind(self):
        code, text = run(["noise", "compare", "--grid", "0:1:3"])
        assert code == EXIT_OK
        kinds = [r[0] for r in csv_rows(text)[1:]]
        assert sorted(set(kinds)) == sorted(["bitflip", "phaseflip", "bitphaseflip", "depolarizing", "ampdamp", "phasedamp"])
        assert len(kinds) == 18


class TestQecCommands:
    def test_mc_small(self):
        code, text = run(["qec", "mc", "--p", "0.05,0.2", "--trials", "2000", "--seed", "3"])
        assert code == EXIT_OK
        rows = csv_rows(text)
        assert rows[0] == ["p", "p_ec_closed_form", "estimate", "standard_error", "abs_z"]
        assert [float(r[0]) for r in rows[1:]] == [0.05, 0.2]

    def test_mc_exit_code_on_bad_fit(self, monkeypatch):
        monkeypatch.setattr(cli.qec, "p_ec_closed_form", lambda p: 0.0)
        code, _ = run(["qec", "mc", "--p", "0.05", "--trials", "500"])
        assert code == EXIT_CHECK

    def test_mc_bad_probability(self):
        assert run(["qec", "mc", "--p", "1.5"])[0] == EXIT_USAGE

    def test_threshold(self):
        code, text = run(["qec", "threshold"])
        assert code == EXIT_OK
        root, pe, f = (float(x) for x in csv_rows(text)[1])
        assert 0.016 <= root <= 0.018
        assert abs(pe - root) <= 1e-6
        assert f == pytest.approx(0.9666, abs=1e-3)


class TestFormats:
    def test_csv_layout(self):
        _, text = run(["noise", "sweep", "--grid", "0:0.5:3"])
        assert text.endswith("\n") and "\r" not in text
        lines = text.splitlines()
        assert lines[0] == f"# bqtsim {__version__}"
        assert lines[1] == "# command: noise sweep"
        cfg = json.loads(lines[2].removeprefix("# config: "))
        assert cfg == {"format": "csv", "grid": "0:0.5:3", "kind": "bitflip"}

    def test_twelve_significant_digits(self):
        _, text = run(["noise", "sweep", "--kind", "depolarizing", "--grid", "0:0.1:2"])
        row = csv_rows(text)[2]
        assert row[1] == format(0.8133333333333335, ".12g") == "0.813333333333"

    def test_json_round_trip(self):
        _, text = run(["bqt", "branches", "--format", "json"])
        rec = ResultRecord.from_json(text)
        assert rec.to_json() == text
        assert rec.command == "bqt branches" and rec.version == __version__
        assert len(rec.rows) == 16

    def test_json_round_trip_with_timing(self):
        rec = ResultRecord("x", {"a": 1}, ["c"], [[0.1 + 0.2]], {"s": 1.5}, duration_s=0.25)
        back = ResultRecord.from_json(rec.to_json(timing=True))
        assert back == rec

    def test_timing_is_opt_in(self):
        _, plain = run(["qec", "threshold", "--format", "json"])
        _, timed = run(["qec", "threshold", "--format", "json", "--timing"])
        assert "duration_s" not in json.loads(plain)
        assert json.loads(timed)["duration_s"] >= 0


class TestConfig:
    def test_file_then_flag_precedence(self, tmp_path):
        cfg = tmp_path / "run.json"
        cfg.write_text(json.dumps({"trials": 5, "seed": 9, "n-alice": 2}))
        _, from_file = run(["bqt", "run", "--config", str(cfg), "--format", "json"])
        rec = json.loads(from_file)
        assert rec["config"]["trials"] == 5 and rec["config"]["n_alice"] == 2
        _, flagged = run(["bqt", "run", "--config", str(cfg), "--trials", "3", "--format", "json"])
        rec = json.loads(flagged)
        assert rec["config"]["trials"] == 3 and rec["config"]["seed"] == 9

    def test_unknown_key(self, tmp_path):
        cfg = tmp_path / "bad.json"
        cfg.write_text(json.dumps({"trails": 5}))
        assert run(["bqt", "run", "--config", str(cfg)])[0] == EXIT_USAGE

    def test_missing_file(self, tmp_path):
        assert run(["qec", "threshold", "--config", str(tmp_path / "nope.json")])[0] == EXIT_USAGE

    def test_unknown_flag(self):
        assert run(["qec", "threshold", "--seed", "1"])[0] == EXIT_USAGE

    def test_unknown_command(self):
        assert run(["bqt", "fly"])[0] == EXIT_USAGE

    def test_seed_range(self):
        assert run(["bqt", "run", "--seed", str(2**64)])[0] == EXIT_USAGE


class TestDeterminism:
    @pytest.mark.parametrize("args", [
        ["bqt", "run", "--trials", "50", "--seed", "11"],
        ["bqt", "branches", "--beta", "0.6,0:0,0.8"],
        ["noise", "sweep", "--kind", "ampdamp"],
        ["noise", "compare", "--grid", "0:1:5"],
        ["qec", "mc", "--trials", "3000", "--seed", "5"],
        ["qec", "threshold"],
    ])  # fmt: skip
    @pytest.mark.parametrize("fmt", ["csv", "json"])
    def test_byte_identical_files(self, tmp_path, args, fmt):
        a, b = tmp_path / "a", tmp_path / "b"
        assert cli.run(args + ["--format", fmt, "--out", str(a)]) == EXIT_OK
        assert cli.run(args + ["--format", fmt, "--out", str(b)]) == EXIT_OK
        assert a.read_bytes() == b.read_bytes()

    def test_seed_changes_output(self):
        assert run(["bqt", "run", "--trials", "20", "--seed", "1"]) != run(["bqt", "run", "--trials", "20", "--seed", "2"])


def test_module_entry_point():
    proc = subprocess.run(
        [sys.executable, "-m", "bqtsim", "qec", "threshold"], capture_output=True, text=True
    )
    assert proc.returncode == 0
    assert proc.stdout.startswith(f"# bqtsim {__version__}\n")
