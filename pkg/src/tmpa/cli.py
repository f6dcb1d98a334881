"""
Command-line front end.

    tmpa pattern    --n 16 --delta 0 --scan 90
    tmpa efficiency --start 0 --stop 0.09 --step 0.001
    tmpa design     --pl5 -22
    tmpa steer      --n 4 --scan 90
    tmpa verify     --n 16 --delta 0.05 --samples 8192

Settings resolve as command-line flag, then ``--config`` file key, then the
built-in default. The config file is flat ``key = value`` text using the
``RunConfig`` field names; ``#`` starts a comment. When ``TMPA_OUTPUT_DIR``
is set, relative output paths are placed under it and a missing output path
becomes ``<command>.<format>`` there; otherwise CSV and JSON go to stdout.
"""

import argparse
import csv
import io
import json
import math
import os
import sys
from dataclasses import dataclass, fields
from pathlib import Path
from typing import List, Optional

import numpy as np

from .array_model import ArrayConfig, directivity, full_pattern, steering_delays, theta_grid
from .harmonics import Band
from .metrics import design_delta, efficiencies, sweep
from .timedomain import verify_array

__all__ = ["RunConfig", "CliError", "main", "run", "load_config_file"]

COMMANDS = ("pattern", "efficiency", "design", "steer", "verify")
FORMATS = ("csv", "json", "svg")
OUTPUT_DIR_ENV = "TMPA_OUTPUT_DIR"
PLOT_FLOOR_DB = -40.0
PLOT_MAX_Q = 13
PATTERN_Q_MAX = 41
VERIFY_Q_MAX = 13


class CliError(Exception):
    """Invalid configuration or failure to produce an artifact."""


@dataclass
class RunConfig:
    command: str = "pattern"
    n_elements: int = 16
    spacing_wl: float = 0.5
    delta_norm: float = 0.0
    theta_scan_deg: float = 90.0
    pl5_target_db: Optional[float] = None
    q_max: Optional[int] = None
    theta_points: int = 1801
    samples: int = 4096
    theta_deg: float = 90.0
    sampling: str = "cell"
    sweep_start: float = 0.0
    sweep_stop: float = 0.09
    sweep_step: float = 0.001
    output_path: Optional[str] = None
    format: str = "csv"

    def __post_init__(self):
        if self.q_max is None:
            self.q_max = VERIFY_Q_MAX if self.command == "verify" else PATTERN_Q_MAX

    def validate(self):
        if self.command not in COMMANDS:
            raise CliError(f"unknown command {self.command!r}")
        if self.format not in FORMATS:
            raise CliError(f"format must be one of {FORMATS}")
        if self.format == "svg" and self.command not in ("pattern", "efficiency"):
            raise CliError(f"svg output is only available for pattern and efficiency, not {self.command}")
        if self.command == "design" and self.pl5_target_db is None:
            raise CliError("design needs a target level (--pl5)")
        if self.n_elements < 1:
            raise CliError("n_elements must be >= 1")
        if self.q_max < 1:
            raise CliError("q_max must be >= 1")
        if not 0.0 < self.theta_scan_deg < 180.0:
            raise CliError("theta_scan_deg must lie in (0, 180)")


_FIELD_TYPES = {
    "n_elements": int,
    "q_max": int,
    "theta_points": int,
    "samples": int,
    "spacing_wl": float,
    "delta_norm": float,
    "theta_scan_deg": float,
    "pl5_target_db": float,
    "theta_deg": float,
    "sweep_start": float,
    "sweep_stop": float,
    "sweep_step": float,
    "command": str,
    "sampling": str,
    "output_path": str,
    "format": str,
}


def load_config_file(path) -> dict:
    """Parse a flat ``key = value`` file into typed ``RunConfig`` fields."""
    values = {}
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise CliError(f"cannot read config file {path}: {exc}") from exc
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise CliError(f"{path}:{lineno}: expected key = value")
        key, value = (s.strip() for s in line.split("=", 1))
        if key not in _FIELD_TYPES:
            raise CliError(f"{path}:{lineno}: unknown key {key!r}")
        try:
            values[key] = _FIELD_TYPES[key](value)
        except ValueError as exc:
            raise CliError(f"{path}:{lineno}: bad value for {key}: {value!r}") from exc
    return values


# ---------------------------------------------------------------- formatting

def _fmt(x) -> str:
    return f"{float(x):.9g}"


def _clean(obj):
    """Round floats to 9 significant digits; non-finite floats become null."""
    if isinstance(obj, dict):
        return {k: _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [_clean(v) for v in obj.tolist()]
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        return float(_fmt(obj)) if math.isfinite(obj) else None
    return obj


def _to_json(report: dict) -> str:
    return json.dumps(_clean(report), indent=2) + "\n"


def _to_csv(header: List[str], rows) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow(
            [v if isinstance(v, str) else (str(bool(v)).lower() if isinstance(v, (bool, np.bool_)) else _fmt(v)) for v in row]
        )
    return buf.getvalue()


# ------------------------------------------------------------------ commands

def _array(cfg: RunConfig) -> ArrayConfig:
    return ArrayConfig(cfg.n_elements, cfg.spacing_wl, cfg.theta_scan_deg)


def _pattern(cfg: RunConfig):
    result = full_pattern(_array(cfg), cfg.delta_norm, cfg.q_max, theta_grid(cfg.theta_points))
    columns = result.columns()
    peaks = []
    for q, band in result.harmonics:
        angle, level = result.peak(q, band)
        peaks.append({"q": q, "band": band.value, "theta_deg": angle, "level_db": level})
    report = {
        "command": "pattern",
        "n_elements": cfg.n_elements,
        "spacing_wl": cfg.spacing_wl,
        "delta_norm": cfg.delta_norm,
        "theta_scan_deg": cfg.theta_scan_deg,
        "q_max": cfg.q_max,
        "reference_power": result.reference,
        "peaks": peaks,
        "theta_deg": result.theta_deg,
        "patterns": columns,
    }
    header = ["theta_deg"] + list(columns)
    rows = zip(result.theta_deg, *columns.values())
    return report, header, rows, result


def _efficiency(cfg: RunConfig):
    table = sweep(cfg.sweep_start, cfg.sweep_stop, cfg.sweep_step)
    report = {
        "command": "efficiency",
        "columns": list(table.columns),
        "rows": [list(r) for r in table.rows()],
    }
    return report, list(table.columns), table.rows(), table


def _design(cfg: RunConfig):
    result = design_delta(cfg.pl5_target_db)
    eff = efficiencies(result.delta_norm, cfg.n_elements)
    eff = eff.with_directivity(directivity(_array(cfg), result.delta_norm, cfg.q_max))
    report = {
        "command": "design",
        "target_db": result.target_db,
        "delta_norm": result.delta_norm,
        "pl5_db": result.pl5_db,
        "already_met": result.already_met,
        "iterations": result.iterations,
        "theta_scan_deg": cfg.theta_scan_deg,
        "eta_below_max": eff.eta_below_max,
        "report": eff.to_dict(),
    }
    header = ["target_db", "delta_norm", "pl5_db", "eta_tma", "eta_s", "eta", "eta_below_max", "directivity_dbi"]
    rows = [[result.target_db, result.delta_norm, result.pl5_db, eff.eta_tma, eff.eta_s, eff.eta,
             eff.eta_below_max, eff.directivity_dbi]]
    return report, header, rows, None


def _steer(cfg: RunConfig):
    delays = steering_delays(cfg.n_elements, cfg.theta_scan_deg, cfg.spacing_wl)
    positions = np.arange(cfg.n_elements) * cfg.spacing_wl
    report = {
        "command": "steer",
        "n_elements": cfg.n_elements,
        "spacing_wl": cfg.spacing_wl,
        "theta_scan_deg": cfg.theta_scan_deg,
        "delays": delays,
    }
    rows = [[n, positions[n], delays[n]] for n in range(cfg.n_elements)]
    return report, ["element", "position_wl", "delay_norm"], rows, None


def _verify(cfg: RunConfig):
    cmp = verify_array(_array(cfg), cfg.delta_norm, cfg.theta_deg, cfg.samples, cfg.q_max, cfg.sampling)
    report = {"command": "verify", **cmp.to_dict()}
    header = ["m", "measured_re", "measured_im", "predicted_re", "predicted_im", "abs_error", "suppressed"]
    rows = [[r[k] for k in header] for r in report["harmonics"]]
    return report, header, rows, cmp


_HANDLERS = {
    "pattern": _pattern,
    "efficiency": _efficiency,
    "design": _design,
    "steer": _steer,
    "verify": _verify,
}


# ---------------------------------------------------------------------- plots

def _plot_pattern(result, cfg: RunConfig, path: Path):
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    plt.rcParams["svg.hashsalt"] = "tmpa"
    fig, ax = plt.subplots(figsize=(7, 4.5))
    for q, band in result.harmonics:
        if q > PLOT_MAX_Q:
            continue
        sign = "+" if band is Band.POSITIVE else "-"
        label = f"q={q} ($\\omega_c{sign}{'' if q == 1 else q}\\omega_0$)"
        ax.plot(result.theta_deg, np.maximum(result.db(q, band), PLOT_FLOOR_DB), label=label,
                lw=1.6 if q == 1 else 1.0)
    ax.set_ylim(PLOT_FLOOR_DB, 1.0)
    ax.set_xlim(0, 180)
    ax.set_xlabel(r"$\theta$ (deg)")
    ax.set_ylabel("relative power (dB)")
    ax.set_title(
        f"N={cfg.n_elements}, $\\bar\\Delta$={cfg.delta_norm:g}, "
        f"$\\theta_{{scan}}$={cfg.theta_scan_deg:g}$^\\circ$"
    )
    ax.grid(True, alpha=0.3)
    ax.legend(fontsize=8, loc="upper right")
    fig.tight_layout()
    fig.savefig(path, format="svg", metadata={"Date": None})
    plt.close(fig)


def _plot_efficiency(table, cfg: RunConfig, path: Path):
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    plt.rcParams["svg.hashsalt"] = "tmpa"
    fig, (ax1, ax2) = plt.subplots(1, 2, figsize=(10, 4))
    ax1.plot(table.delta_norm, table.pl5_db)
    ax1.set_xlabel(r"$\bar\Delta$")
    ax1.set_ylabel(r"$P_L^{5th}$ (dB)")
    ax1.grid(True, alpha=0.3)
    for name, label in (("eta_tma", r"$\eta_{TMA}$"), ("eta_s", r"$\eta_s$"), ("eta", r"$\eta$")):
        ax2.plot(table.delta_norm, 100 * getattr(table, name), label=label)
    ax2.set_xlabel(r"$\bar\Delta$")
    ax2.set_ylabel("efficiency (%)")
    ax2.grid(True, alpha=0.3)
    ax2.legend()
    fig.tight_layout()
    fig.savefig(path, format="svg", metadata={"Date": None})
    plt.close(fig)


# ------------------------------------------------------------------------ run

def _resolve_output(cfg: RunConfig) -> Optional[Path]:
    base = os.environ.get(OUTPUT_DIR_ENV)
    if cfg.output_path is None:
        if base:
            return Path(base) / f"{cfg.command}.{cfg.format}"
        return None
    path = Path(cfg.output_path)
    if base and not path.is_absolute():
        path = Path(base) / path
    return path


def _write(path: Path, writer):
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        writer(path)
    except OSError as exc:
        raise CliError(f"cannot write {path}: {exc}") from exc


def run(cfg: RunConfig, stdout=None) -> int:
    """
    Execute one command and write its artifact.

    Returns the process exit status. Raises :class:`CliError` on invalid
    settings or unwritable output; numerical domain errors surface as
    ``ValueError`` or ``ArithmeticError``.
    """
    stdout = sys.stdout if stdout is None else stdout
    cfg.validate()
    report, header, rows, payload = _HANDLERS[cfg.command](cfg)
    path = _resolve_output(cfg)
    if cfg.format == "svg" and path is None:
        raise CliError("svg output needs an output path (--output)")
    if cfg.format == "svg":
        plot = _plot_pattern if cfg.command == "pattern" else _plot_efficiency
        _write(path, lambda p: plot(payload, cfg, p))
        return 0
    text = _to_json(report) if cfg.format == "json" else _to_csv(header, rows)
    if path is None:
        stdout.write(text)
    else:
        _write(path, lambda p: p.write_text(text))
    return 0


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        _emit_error("usage", message, None)
        self.exit(2)


def _emit_error(kind: str, message: str, command: Optional[str]):
    record = {"error": {"type": kind, "message": message, "command": command}}
    sys.stderr.write(json.dumps(record) + "\n")


def _build_parser() -> argparse.ArgumentParser:
    S = argparse.SUPPRESS
    common = _Parser(add_help=False)
    common.add_argument("--config", help="flat key = value settings file")
    common.add_argument("-o", "--output", dest="output_path", default=S, help="output file")
    common.add_argument("--format", choices=FORMATS, default=S)

    array = _Parser(add_help=False)
    array.add_argument("--n", dest="n_elements", type=int, default=S, help="element count (16)")
    array.add_argument("--spacing", dest="spacing_wl", type=float, default=S, help="spacing in wavelengths (0.5)")
    array.add_argument("--scan", dest="theta_scan_deg", type=float, default=S, help="scan angle in degrees (90)")
    array.add_argument("--q-max", dest="q_max", type=int, default=S, help="highest harmonic kept (41; 13 for verify)")

    delta = _Parser(add_help=False)
    delta.add_argument("--delta", dest="delta_norm", type=float, default=S,
                       help="normalized rise/fall time (0)")

    parser = _Parser(prog="tmpa", description=__doc__.split("\n\n")[0].strip())
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("pattern", parents=[common, array, delta], help="per-harmonic power patterns")
    p.add_argument("--theta-points", dest="theta_points", type=int, default=S)

    p = sub.add_parser("efficiency", parents=[common], help="sweep of P_L5 and efficiencies")
    p.add_argument("--start", dest="sweep_start", type=float, default=S)
    p.add_argument("--stop", dest="sweep_stop", type=float, default=S)
    p.add_argument("--step", dest="sweep_step", type=float, default=S)

    p = sub.add_parser("design", parents=[common, array], help="rise/fall time for a 5th-harmonic target")
    p.add_argument("--pl5", dest="pl5_target_db", type=float, default=S, help="target level in dB")

    sub.add_parser("steer", parents=[common, array], help="steering delay table")

    p = sub.add_parser("verify", parents=[common, array, delta], help="time-domain DFT check")
    p.add_argument("--samples", dest="samples", type=int, default=S, help="samples per period (4096)")
    p.add_argument("--theta", dest="theta_deg", type=float, default=S, help="observation angle (90)")
    p.add_argument("--sampling", choices=("cell", "point"), default=S)
    return parser


def parse_config(argv: Optional[List[str]] = None) -> RunConfig:
    args = vars(_build_parser().parse_args(argv))
    config_path = args.pop("config", None)
    merged = load_config_file(config_path) if config_path else {}
    merged.update(args)
    known = {f.name for f in fields(RunConfig)}
    return RunConfig(**{k: v for k, v in merged.items() if k in known})


def main(argv: Optional[List[str]] = None) -> int:
    command = None
    try:
        cfg = parse_config(argv)
        command = cfg.command
        return run(cfg)
    except CliError as exc:
        _emit_error("config", str(exc), command)
    except (ValueError, ArithmeticError) as exc:
        _emit_error(type(exc).__name__, str(exc), command)
    except BrokenPipeError:
        # downstream closed early (e.g. piped into head)
        sys.stdout = open(os.devnull, "w")
        return 0
    return 1


if __name__ == "__main__":
    sys.exit(main())
