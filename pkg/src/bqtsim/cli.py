"""Command-line experiment harness.

    bqtsim bqt run        sampled protocol runs
    bqtsim bqt branches   all sixteen measurement branches
    bqtsim noise sweep    exact vs closed-form fidelity for one noise kind
    bqtsim noise compare  the same for every noise kind
    bqtsim qec mc         Monte Carlo success rate of the bit-flip code
    bqtsim qec threshold  crossover where the code starts to help

Exit codes: 0 success, 1 a built-in acceptance check failed, 2 usage error.
Outputs are deterministic for a fixed configuration; wall-clock time is only
written when ``--timing`` is given.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Callable, Sequence

import numpy as np

from . import __version__, bqt, noise, qec
from .errors import ArgumentError, QSimError
from .qsim import Rng

EXIT_OK, EXIT_CHECK, EXIT_USAGE = 0, 1, 2
FIDELITY_FLOOR = 1 - 1e-9
Z_LIMIT = 4.0
NORMALIZE_SLACK = 1e-3

_H = 1 / math.sqrt(2)
DEFAULTS: dict[str, dict[str, Any]] = {
    "bqt run": {
        "n_alice": 3, "n_bob": 3,
        "alpha": [[_H, 0.0], [_H, 0.0]], "beta": [[_H, 0.0], [_H, 0.0]],
        "normalize": False, "seed": 0, "trials": 1000, "format": "csv",
    },
    "bqt branches": {
        "n_alice": 3, "n_bob": 3,
        "alpha": [[_H, 0.0], [_H, 0.0]], "beta": [[_H, 0.0], [_H, 0.0]],
        "normalize": False, "format": "csv",
    },
    "noise sweep": {"kind": "bitflip", "grid": "0:1:11", "format": "csv"},
    "noise compare": {"grid": "0:1:11", "format": "csv"},
    "qec mc": {"p": [0.005, 0.017, 0.05, 0.2], "trials": 100000, "seed": 0, "format": "csv"},
    "qec threshold": {"format": "csv"},
}  # fmt: skip


class UsageError(Exception):
    pass


@dataclass
class ResultRecord:
    command: str
    config: dict[str, Any]
    columns: list[str]
    rows: list[list[Any]]
    summary: dict[str, Any] = field(default_factory=dict)
    version: str = __version__
    duration_s: float | None = None
    exit_code: int = EXIT_OK

    def to_dict(self, timing: bool = False) -> dict[str, Any]:
        out = {
            "command": self.command,
            "version": self.version,
            "config": self.config,
            "columns": self.columns,
            "rows": self.rows,
            "summary": self.summary,
        }
        if timing:
            out["duration_s"] = self.duration_s
        return out

    def to_json(self, timing: bool = False) -> str:
        return json.dumps(self.to_dict(timing), indent=2) + "\n"

    @classmethod
    def from_json(cls, text: str) -> ResultRecord:
        d = json.loads(text)
        return cls(
            command=d["command"],
            config=d["config"],
            columns=d["columns"],
            rows=d["rows"],
            summary=d.get("summary", {}),
            version=d["version"],
            duration_s=d.get("duration_s"),
        )

    def to_csv(self, timing: bool = False) -> str:
        buf = io.StringIO()
        buf.write(f"# bqtsim {self.version}\n")
        buf.write(f"# command: {self.command}\n")
        buf.write(f"# config: {json.dumps(self.config, sort_keys=True)}\n")
        if self.summary:
            buf.write(f"# summary: {json.dumps(self.summary, sort_keys=True)}\n")
        if timing:
            buf.write(f"# duration_s: {self.duration_s!r}\n")
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(self.columns)
        for row in self.rows:
            w.writerow([_csv_cell(v) for v in row])
        return buf.getvalue()


def _csv_cell(v: Any) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return format(v, ".12g")
    if v is None:
        return ""
    return str(v)


# ---------------------------------------------------------------------------
# parsing helpers


def parse_amplitudes(text: str) -> list[list[float]]:
    """``"re,im:re,im"`` -> ``[[re, im], [re, im]]``; ``im`` may be omitted."""
    parts = text.split(":")
    if len(parts) != 2:
        raise UsageError(f"amplitudes must look like re,im:re,im, got {text!r}")
    out = []
    for part in parts:
        nums = part.split(",")
        if len(nums) not in (1, 2):
            raise UsageError(f"bad complex number {part!r}")
        try:
            vals = [float(x) for x in nums] + [0.0] * (2 - len(nums))
        except ValueError:
            raise UsageError(f"bad complex number {part!r}") from None
        out.append(vals)
    return out


def _coefficients(pairs: Sequence[Sequence[float]], normalize: bool) -> tuple[complex, complex]:
    c = np.array([complex(re, im) for re, im in pairs])
    norm = float(np.linalg.norm(c))
    if normalize:
        if abs(norm - 1) > NORMALIZE_SLACK:
            raise UsageError(f"amplitude norm {norm:.6g} too far from 1 to normalize")
        c = c / norm
    return complex(c[0]), complex(c[1])


def _spec(n: int, pairs, normalize: bool) -> bqt.GhzLikeSpec:
    if not isinstance(pairs, (list, tuple)) or len(pairs) != 2:
        raise UsageError("amplitudes must be two [re, im] pairs")
    c0, c1 = _coefficients(pairs, normalize)
    return bqt.GhzLikeSpec(int(n), c0, c1)


def _p_list(value) -> list[float]:
    if isinstance(value, str):
        try:
            value = [float(x) for x in value.split(",") if x.strip()]
        except ValueError:
            raise UsageError(f"bad probability list {value!r}") from None
    if isinstance(value, (int, float)):
        value = [value]
    ps = [float(x) for x in value]
    if not ps or any(not 0 <= p <= 1 for p in ps):
        raise UsageError("probabilities must lie in [0, 1]")
    return ps


# ---------------------------------------------------------------------------
# commands


def cmd_bqt_run(cfg: dict[str, Any]) -> ResultRecord:
    alice = _spec(cfg["n_alice"], cfg["alpha"], cfg["normalize"])
    bob = _spec(cfg["n_bob"], cfg["beta"], cfg["normalize"])
    trials, seed = int(cfg["trials"]), int(cfg["seed"])
    if trials < 1:
        raise UsageError("trials must be positive")
    rows, branches, worst = [], set(), 1.0
    for t in range(trials):
        tr = bqt.run_bqt(alice, bob, Rng.for_trial(seed, t))
        branches.add(tr.eta_index)
        worst = min(worst, tr.min_fidelity)
        rows.append([
            t, tr.alice_outcome.label, tr.bob_outcome.label, tr.eta_index,
            tr.alice_correction.value, tr.bob_correction.value, tr.probability,
            tr.fidelity_to_bob, tr.fidelity_to_alice,
        ])  # fmt: skip
    rows.append(["min", "", "", "", "", "", "", min(r[7] for r in rows), min(r[8] for r in rows)])
    ok = worst >= FIDELITY_FLOOR
    return ResultRecord(
        "bqt run", cfg,
        ["trial", "alice_outcome", "bob_outcome", "branch", "alice_correction",
         "bob_correction", "probability", "fidelity_to_bob", "fidelity_to_alice"],
        rows,
        {"trials": trials, "distinct_branches": len(branches), "min_fidelity": worst, "passed": ok},
        exit_code=EXIT_OK if ok else EXIT_CHECK,
    )  # fmt: skip


def cmd_bqt_branches(cfg: dict[str, Any]) -> ResultRecord:
    alice = _spec(cfg["n_alice"], cfg["alpha"], cfg["normalize"])
    bob = _spec(cfg["n_bob"], cfg["beta"], cfg["normalize"])
    rows, ok = [], True
    for tr in bqt.enumerate_branches(alice, bob):
        ok &= abs(tr.probability - 1 / 16) <= 1e-12
        ok &= tr.eta_overlap >= 1 - 1e-12
        ok &= abs(tr.min_fidelity - 1) <= 1e-12
        rows.append([
            tr.eta_index, tr.alice_outcome.label, tr.bob_outcome.label, tr.probability,
            tr.eta_overlap, tr.alice_correction.value, tr.bob_correction.value,
            tr.fidelity_to_bob, tr.fidelity_to_alice,
        ])  # fmt: skip
    return ResultRecord(
        "bqt branches", cfg,
        ["branch", "alice_outcome", "bob_outcome", "probability", "eta_overlap",
         "alice_correction", "bob_correction", "fidelity_to_bob", "fidelity_to_alice"],
        rows, {"branches": len(rows), "passed": bool(ok)},
        exit_code=EXIT_OK if ok else EXIT_CHECK,
    )  # fmt: skip


def _kind(name: str) -> noise.NoiseKind:
    try:
        return noise.NoiseKind.parse(str(name))
    except ArgumentError as e:
        raise UsageError(str(e)) from None


def cmd_noise_sweep(cfg: dict[str, Any]) -> ResultRecord:
    kind = _kind(cfg["kind"])
    curve = noise.sweep(kind, noise.parse_grid(cfg["grid"]))
    rows = [[p, fe, fc, fe - fc] for p, fe, fc in curve.samples]
    return ResultRecord("noise sweep", cfg, ["p", "f_exact", "f_closed_form", "delta"], rows)


def cmd_noise_compare(cfg: dict[str, Any]) -> ResultRecord:
    grid = noise.parse_grid(cfg["grid"])
    rows = []
    for kind in noise.NoiseKind:
        for p, fe, fc in noise.sweep(kind, grid).samples:
            rows.append([kind.value, p, fe, fc, fe - fc])
    return ResultRecord("noise compare", cfg, ["kind", "p", "f_exact", "f_closed_form", "delta"], rows)


def cmd_qec_mc(cfg: dict[str, Any]) -> ResultRecord:
    ps = _p_list(cfg["p"])
    trials, seed = int(cfg["trials"]), int(cfg["seed"])
    if trials < 1:
        raise UsageError("trials must be positive")
    rows, worst = [], 0.0
    for p in ps:
        r = qec.monte_carlo(p, trials, seed)
        expected = qec.p_ec_closed_form(p)
        z = abs(r.z_score(expected))
        worst = max(worst, z)
        rows.append([p, expected, r.estimate, r.standard_error, z])
    ok = worst <= Z_LIMIT
    return ResultRecord(
        "qec mc", cfg, ["p", "p_ec_closed_form", "estimate", "standard_error", "abs_z"], rows,
        {"max_abs_z": worst, "passed": ok}, exit_code=EXIT_OK if ok else EXIT_CHECK,
    )  # fmt: skip


def cmd_qec_threshold(cfg: dict[str, Any]) -> ResultRecord:
    root = qec.crossover_threshold()
    f = noise.closed_form_fidelity(noise.NoiseKind.BIT_FLIP, root)
    return ResultRecord(
        "qec threshold", cfg, ["threshold", "p_e_at_threshold", "bitflip_fidelity_at_threshold"],
        [[root, qec.p_e_closed_form(root), f]],
    )  # fmt: skip


COMMANDS: dict[str, Callable[[dict[str, Any]], ResultRecord]] = {
    "bqt run": cmd_bqt_run,
    "bqt branches": cmd_bqt_branches,
    "noise sweep": cmd_noise_sweep,
    "noise compare": cmd_noise_compare,
    "qec mc": cmd_qec_mc,
    "qec threshold": cmd_qec_threshold,
}


# ---------------------------------------------------------------------------
# argument handling


class _Parser(argparse.ArgumentParser):
    def error(self, message: str):
        self.print_usage(sys.stderr)
        raise UsageError(message)


def _seed(text: str) -> int:
    v = int(text, 0)
    if not 0 <= v < 1 << 64:
        raise argparse.ArgumentTypeError("seed must fit in 64 unsigned bits")
    return v


def build_parser() -> argparse.ArgumentParser:
    S = argparse.SUPPRESS
    common = _Parser(add_help=False)
    common.add_argument("--out", default=S, help="output path (default: stdout)")
    common.add_argument("--format", choices=["csv", "json"], default=S)
    common.add_argument("--config", default=S, help="JSON file with option values")
    common.add_argument("--timing", action="store_true", default=S,
                        help="embed wall-clock duration (output no longer reproducible)")

    parties = _Parser(add_help=False)
    parties.add_argument("--n-alice", dest="n_alice", type=int, default=S)
    parties.add_argument("--n-bob", dest="n_bob", type=int, default=S)
    parties.add_argument("--alpha", type=parse_amplitudes, default=S, metavar="RE,IM:RE,IM")
    parties.add_argument("--beta", type=parse_amplitudes, default=S, metavar="RE,IM:RE,IM")
    parties.add_argument("--normalize", action="store_true", default=S,
                         help=f"rescale amplitudes whose norm is within {NORMALIZE_SLACK} of 1")

    seeded = _Parser(add_help=False)
    seeded.add_argument("--seed", type=_seed, default=S)
    seeded.add_argument("--trials", type=int, default=S)

    parser = _Parser(prog="bqtsim", description=__doc__.split("\n\n")[0])
    parser.add_argument("--version", action="version", version=f"bqtsim {__version__}")
    groups = parser.add_subparsers(dest="group", required=True, parser_class=_Parser)

    g = groups.add_parser("bqt").add_subparsers(dest="action", required=True, parser_class=_Parser)
    g.add_parser("run", parents=[parties, seeded, common])
    g.add_parser("branches", parents=[parties, common])

    g = groups.add_parser("noise").add_subparsers(dest="action", required=True, parser_class=_Parser)
    sp = g.add_parser("sweep", parents=[common])
    sp.add_argument("--kind", default=S, help=", ".join(k.value for k in noise.NoiseKind))
    sp.add_argument("--grid", default=S, metavar="START:STOP:COUNT")
    sp = g.add_parser("compare", parents=[common])
    sp.add_argument("--grid", default=S, metavar="START:STOP:COUNT")

    g = groups.add_parser("qec").add_subparsers(dest="action", required=True, parser_class=_Parser)
    g.add_parser("mc", parents=[seeded, common]).add_argument(
        "--p", default=S, help="comma-separated flip probabilities"
    )
    g.add_parser("threshold", parents=[common])
    return parser


_IO_KEYS = ("out", "config", "timing")


def resolve_config(command: str, flags: dict[str, Any]) -> tuple[dict[str, Any], dict[str, Any]]:
    """Built-in defaults, then the config file, then explicit flags.

    Returns the resolved command config and the output-handling options.
    """
    cfg = dict(DEFAULTS[command])
    path = flags.get("config")
    if path is not None:
        try:
            loaded = json.loads(Path(path).read_text())
        except (OSError, json.JSONDecodeError) as e:
            raise UsageError(f"cannot read config {path}: {e}") from None
        if not isinstance(loaded, dict):
            raise UsageError("config file must hold a JSON object")
        loaded = {k.replace("-", "_"): v for k, v in loaded.items()}
        unknown = set(loaded) - set(cfg) - set(_IO_KEYS)
        if unknown:
            raise UsageError(f"unknown config keys for {command}: {sorted(unknown)}")
        cfg.update({k: v for k, v in loaded.items() if k not in _IO_KEYS})
        flags = {**{k: loaded[k] for k in ("out", "timing") if k in loaded}, **flags}
    cfg.update({k: v for k, v in flags.items() if k not in _IO_KEYS})
    if command == "qec mc":
        cfg["p"] = _p_list(cfg["p"])
    return cfg, flags


def run(argv: Sequence[str] | None = None, stdout=None) -> int:
    stdout = sys.stdout if stdout is None else stdout
    try:
        ns = vars(build_parser().parse_args(argv))
        command = f"{ns.pop('group')} {ns.pop('action')}"
        cfg, io_flags = resolve_config(command, ns)
        start = time.perf_counter()
        record = COMMANDS[command](cfg)
        record.duration_s = time.perf_counter() - start
    except (UsageError, ArgumentError) as e:
        print(f"bqtsim: error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except QSimError as e:
        print(f"bqtsim: {type(e).__name__}: {e}", file=sys.stderr)
        return EXIT_CHECK
    timing = bool(io_flags.get("timing", False))
    text = record.to_json(timing) if cfg["format"] == "json" else record.to_csv(timing)
    out = io_flags.get("out")
    if out:
        Path(out).write_text(text, encoding="utf-8", newline="\n")
    else:
        stdout.write(text)
    return record.exit_code


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
