"""Command-line front end.

Every command is described by a :class:`RunConfig`, either assembled from
command-line flags or read from a TOML document (``moranspec run FILE``)::

    command = "spectrum"
    preset = "middle-third"
    output_dir = "out"
    format = "csv"

    [params]
    theta_grid = "0.1:1.0:0.1"
    tol = 0.005

Results go to ``<output_dir>/<command>*.csv`` (or ``.jsonl``), each with a
``.meta.json`` sidecar holding the spec hash, the resolved parameters and
the package version.  Exit status is 0 on success, 2 for configuration
errors and 3 for computation errors; failures print one JSON record on
stderr.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import math
import os
import re
import sys
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

import numpy as np
import tomli
import tomli_w

from . import __version__
from .cutset import DeltaSchedule, spectrum, theta_pressure
from .geometry import (box_count, empirical_box_dim, local_exponent_scan,
                       mass_distribution, realize_attractor)
from .infinite import build_subsystem, verify_coverage
from .presets import PRESETS, preset
from .pressure import jump_points, moran_exponents, moran_limits, pressure
from .serialize import dumps_spec, loads_spec, spec_hash
from .system import CONDITIONS, condition_diagnostics, materialize_level

COMMANDS = ("pressure", "jump", "moran", "spectrum", "realize", "boxdim", "massdim",
            "truncate", "diagnose")
FORMATS = ("csv", "jsonl")
EXIT_OK, EXIT_CONFIG, EXIT_COMPUTE = 0, 2, 3


class ConfigError(ValueError):
    """Invalid configuration; ``code`` names the kind of problem."""

    def __init__(self, code: str, message: str, line: Optional[int] = None,
                 column: Optional[int] = None):
        super().__init__(message)
        self.code = code
        self.line = line
        self.column = column

    def record(self) -> dict:
        rec = {"error": self.code, "message": str(self)}
        if self.line is not None:
            rec["line"] = self.line
            rec["column"] = self.column
        return rec


# ---------------------------------------------------------------------------
# Parameters
# ---------------------------------------------------------------------------

def _grid(value, name):
    """A list of floats, or a "start:stop:step" string (inclusive)."""
    if isinstance(value, str):
        parts = value.split(":")
        if len(parts) != 3:
            raise ConfigError("bad-type", f"{name}: expected start:stop:step, got {value!r}")
        try:
            a, b, h = (float(p) for p in parts)
        except ValueError:
            raise ConfigError("bad-type", f"{name}: non-numeric range {value!r}") from None
        if not h > 0 or b < a:
            raise ConfigError("out-of-range", f"{name}: empty range {value!r}")
        n = int(math.floor((b - a) / h + 1e-9)) + 1
        return [round(a + i * h, 12) for i in range(n)]
    if isinstance(value, (int, float)) and not isinstance(value, bool):
        return [float(value)]
    if isinstance(value, list) and value and all(
            isinstance(v, (int, float)) and not isinstance(v, bool) for v in value):
        return [float(v) for v in value]
    raise ConfigError("bad-type", f"{name}: expected a number list or start:stop:step")


def _int(value, name):
    if isinstance(value, bool) or not isinstance(value, int):
        raise ConfigError("bad-type", f"{name}: expected an integer, got {value!r}")
    return value


def _float(value, name):
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError("bad-type", f"{name}: expected a number, got {value!r}")
    return float(value)


def _bool(value, name):
    if not isinstance(value, bool):
        raise ConfigError("bad-type", f"{name}: expected true/false, got {value!r}")
    return value


def _str(value, name):
    if not isinstance(value, str):
        raise ConfigError("bad-type", f"{name}: expected a string, got {value!r}")
    return value


# name -> (converter, check or None, description of the valid range)
_PARAMS = {
    "k_max": (_int, lambda v: v >= 2, ">= 2"),
    "window": (_int, lambda v: v >= 1, ">= 1"),
    "tol": (_float, lambda v: 0 < v < 1, "in (0, 1)"),
    "t": (_grid, lambda v: all(x >= 0 for x in v), "non-negative"),
    "k": (_int, lambda v: v >= 1, ">= 1"),
    "theta_grid": (_grid, lambda v: all(0 < x <= 1 for x in v) and v == sorted(v),
                   "ascending values in (0, 1]"),
    "rho": (_float, lambda v: 0 < v < 1, "in (0, 1)"),
    "trace": (_bool, None, ""),
    "depth": (_int, lambda v: 0 <= v <= 40, "in [0, 40]"),
    "placement": (_str, lambda v: v in ("SSC-uniform-gaps", "OSC-left-packed"),
                  "SSC-uniform-gaps or OSC-left-packed"),
    "gap_fraction": (_float, lambda v: 0 < v < 1, "in (0, 1)"),
    "scale_min": (_float, lambda v: v > 0, "> 0"),
    "scale_max": (_float, lambda v: v > 0, "> 0"),
    "n_scales": (_int, lambda v: v >= 5, ">= 5"),
    "mass_t": (_float, lambda v: v >= 0, ">= 0"),
    "radii": (_grid, lambda v: all(0 < x < 1 for x in v), "in (0, 1)"),
    "samples": (_int, lambda v: v >= 1, ">= 1"),
    "t_grid": (_grid, lambda v: all(x > 0 for x in v), "positive"),
    "slacks": (_grid, lambda v: all(x > 0 for x in v), "positive"),
    "block_length": (_int, lambda v: v >= 1, ">= 1"),
    "eps_grid": (_grid, lambda v: all(x > 0 for x in v), "positive"),
    "n_check": (_int, lambda v: v >= 2, ">= 2"),
    "hold_threshold": (_float, lambda v: v > 0, "> 0"),
    "fail_threshold": (_float, lambda v: v > 0, "> 0"),
}

# per-command defaults (None: optional, computed at run time)
_DEFAULTS = {
    "pressure": {"t": [1.0], "k_max": 2000, "window": 500},
    "jump": {"k_max": 2000, "window": 500, "tol": 1e-4},
    "moran": {"k": 2000, "window": 500, "tol": 1e-10},
    "spectrum": {"theta_grid": "0.1:1.0:0.1", "tol": 1e-3, "k_max": 2000, "window": 500,
                 "rho": None, "trace": False},
    "realize": {"depth": 8, "placement": None, "gap_fraction": None},
    "boxdim": {"depth": 12, "placement": None, "scale_min": None, "scale_max": None,
               "n_scales": 25},
    "massdim": {"depth": 12, "mass_t": None, "radii": None, "samples": 512,
                "k_max": 2000, "window": 500},
    "truncate": {"t_grid": "0.1:0.9:0.1", "slacks": [0.01], "block_length": 64,
                 "k_max": 64, "eps_grid": [0.5, 1.0], "n_check": 256, "window": 64},
    "diagnose": {"k_max": 200, "window": 50, "hold_threshold": 0.01, "fail_threshold": 0.1},
}


@dataclass(frozen=True)
class RunConfig:
    command: str
    preset: Optional[str] = None
    spec_path: Optional[str] = None
    output_dir: str = "."
    format: str = "csv"
    params: dict = field(default_factory=dict)

    def load_spec(self):
        if self.preset is not None:
            return preset(self.preset)
        return loads_spec(Path(self.spec_path).read_text())


_TOP_KEYS = ("command", "preset", "spec_path", "output_dir", "format", "params")


def config_from_dict(data: dict) -> RunConfig:
    """Validate and default a configuration mapping (strict)."""
    unknown = sorted(set(data) - set(_TOP_KEYS))
    if unknown:
        raise ConfigError("unknown-key", f"unknown configuration keys: {unknown}")
    command = data.get("command")
    if command not in COMMANDS:
        raise ConfigError("out-of-range" if command else "missing-key",
                          f"command must be one of {', '.join(COMMANDS)}, got {command!r}")
    has_preset, has_spec = data.get("preset") is not None, data.get("spec_path") is not None
    if has_preset == has_spec:
        raise ConfigError("missing-key", "give exactly one of preset or spec_path")
    if has_preset and data["preset"] not in PRESETS:
        raise ConfigError("unknown-preset", f"unknown preset {data['preset']!r}; "
                                            f"choose from {', '.join(PRESETS)}")
    fmt = data.get("format", "csv")
    if fmt not in FORMATS:
        raise ConfigError("out-of-range", f"format must be csv or jsonl, got {fmt!r}")
    raw = data.get("params", {})
    if not isinstance(raw, dict):
        raise ConfigError("bad-type", "params must be a table")
    defaults = _DEFAULTS[command]
    unknown = sorted(set(raw) - set(defaults))
    if unknown:
        raise ConfigError("unknown-key", f"unknown parameters for {command}: {unknown}")
    if command == "spectrum" and "theta_grid" in raw:
        try:
            grid = _grid(raw["theta_grid"], "theta_grid")
        except ConfigError:
            grid = []
        if any(x == 0 for x in grid):
            raise ConfigError("theta-zero", "theta = 0 is the Hausdorff dimension: use the "
                                            "`jump` command (its s_lower) instead of spectrum")
    params = {}
    for name, default in defaults.items():
        value = raw.get(name, default)
        if value is None:
            params[name] = None
            continue
        conv, check, desc = _PARAMS[name]
        value = conv(value, name)
        if check is not None and not check(value):
            raise ConfigError("out-of-range", f"{name} must be {desc}, got {value!r}")
        params[name] = value
    if "window" in params and "k_max" in params and command != "truncate":
        if params["k_max"] < 2 * params["window"]:
            raise ConfigError("out-of-range", "k_max must be at least 2 * window")
    if command == "moran" and params["k"] < 2 * params["window"]:
        params["window"] = max(1, params["k"] // 2)
    return RunConfig(command=command, preset=data.get("preset"),
                     spec_path=data.get("spec_path"),
                     output_dir=str(data.get("output_dir", ".")), format=fmt, params=params)


_POSITION = re.compile(r"\(at line (\d+), column (\d+)\)")


def parse_config(text: str) -> RunConfig:
    """Parse a TOML configuration document into a validated :class:`RunConfig`."""
    try:
        data = tomli.loads(text)
    except tomli.TOMLDecodeError as exc:
        msg = str(exc)
        m = _POSITION.search(msg)
        line, col = (int(m.group(1)), int(m.group(2))) if m else (None, None)
        code = "duplicate-key" if ("overwrite" in msg or "twice" in msg) else "syntax"
        raise ConfigError(code, msg, line, col) from None
    return config_from_dict(data)


def emit_config(config: RunConfig) -> str:
    """Canonical TOML document; ``parse_config(emit_config(c)) == c``."""
    doc = {"command": config.command}
    if config.preset is not None:
        doc["preset"] = config.preset
    else:
        doc["spec_path"] = config.spec_path
    doc["output_dir"] = config.output_dir
    doc["format"] = config.format
    doc["params"] = {k: v for k, v in sorted(config.params.items()) if v is not None}
    return tomli_w.dumps(doc)


# ---------------------------------------------------------------------------
# Output
# ---------------------------------------------------------------------------

def _cell(v) -> str:
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return format(float(v), ".17g")
    if v is None:
        return ""
    return str(v)


def _json_value(v):
    if isinstance(v, (bool, np.bool_)):
        return bool(v)
    if isinstance(v, (int, np.integer)):
        return int(v)
    if isinstance(v, (float, np.floating)):
        v = float(v)
        return v if math.isfinite(v) else str(v)
    return v


class _Writer:
    def __init__(self, config: RunConfig, spec):
        self.config = config
        self.spec = spec
        self.hash = spec_hash(spec)
        self.dir = Path(config.output_dir)
        self.dir.mkdir(parents=True, exist_ok=True)
        self.written = []

    def _header(self) -> dict:
        head = {"spec": self.spec.label(), "spec_hash": self.hash[:16]}
        for k, v in sorted(self.config.params.items()):
            if v is not None:
                head[k] = v
        return head

    def table(self, stem: str, columns, rows):
        ext = "csv" if self.config.format == "csv" else "jsonl"
        path = self.dir / f"{stem}.{ext}"
        head = self._header()
        if ext == "csv":
            lines = ["# " + " ".join(f"{k}={json.dumps(v, separators=(',', ':'))}"
                                     if not isinstance(v, str) else f"{k}={v}"
                                     for k, v in head.items()),
                     ",".join(columns)]
            lines += [",".join(_cell(v) for v in row) for row in rows]
        else:
            lines = [json.dumps({"#": head}, sort_keys=True)]
            lines += [json.dumps({c: _json_value(v) for c, v in zip(columns, row)})
                      for row in rows]
        data = ("\n".join(lines) + "\n").encode()
        self._write(path, data, columns)

    def document(self, name: str, text: str):
        self._write(self.dir / name, text.encode(), None)

    def _write(self, path: Path, data: bytes, columns):
        path.write_bytes(data)
        meta = {"file": path.name, "command": self.config.command,
                "spec": self.spec.label(), "spec_hash": self.hash,
                "source": {"preset": self.config.preset, "spec_path": self.config.spec_path},
                "params": {k: v for k, v in sorted(self.config.params.items())},
                "format": self.config.format, "columns": columns,
                "version": __version__, "sha256": hashlib.sha256(data).hexdigest(),
                "deterministic": True}
        Path(str(path) + ".meta.json").write_text(json.dumps(meta, indent=2, sort_keys=True) + "\n")
        self.written.append(path)


# ---------------------------------------------------------------------------
# Commands
# ---------------------------------------------------------------------------

def _cmd_pressure(spec, p, out: _Writer):
    rows, samples = [], []
    for t in p["t"]:
        est = pressure(spec, t, p["k_max"], p["window"])
        rows.append((t, est.upper_est, est.lower_est))
        samples += [(t, k, q) for k, q in est.samples]
    out.table("pressure", ["t", "upper_est", "lower_est"], rows)
    out.table("pressure_samples", ["t", "k", "q_k"], samples)


def _cmd_jump(spec, p, out):
    r = jump_points(spec, p["k_max"], p["window"], p["tol"])
    out.table("jump", ["s_upper", "s_lower", "upper_width", "lower_width", "degenerate_upper",
                       "degenerate_lower", "raw_upper", "raw_lower"],
              [(r.s_upper, r.s_lower, r.upper_width, r.lower_width, r.degenerate_upper,
                r.degenerate_lower, r.raw_upper, r.raw_lower)])


def _cmd_moran(spec, p, out):
    ks = np.arange(1, p["k"] + 1)
    s = moran_exponents(spec, ks, p["tol"])
    out.table("moran", ["k", "s_k"], zip(ks.tolist(), s.tolist()))
    lo, hi = moran_limits(spec, p["k"], p["window"], p["tol"])
    out.table("moran_limits", ["liminf_est", "limsup_est"], [(lo, hi)])


def _threads() -> Optional[int]:
    raw = os.environ.get("MORANSPEC_THREADS")
    if not raw:
        return None
    try:
        n = int(raw)
    except ValueError:
        raise ConfigError("bad-type", f"MORANSPEC_THREADS must be an integer, got {raw!r}") from None
    if n < 1:
        raise ConfigError("out-of-range", "MORANSPEC_THREADS must be >= 1")
    return n


def _cmd_spectrum(spec, p, out):
    schedule = DeltaSchedule.for_depths(spec, p["k_max"], p["window"], rho=p["rho"])
    curve = spectrum(spec, p["theta_grid"], p["tol"], schedule, k_max=p["k_max"],
                     window=p["window"], workers=_threads())
    delta_min = math.exp(curve.log_delta_min)
    rows = [(th, su, sl, delta_min, pt.k_delta_max, p["tol"], curve.log_delta_min)
            for (th, su, sl), pt in zip(curve.rows(), curve.points)]
    out.table("spectrum", ["theta", "s_upper", "s_lower", "delta_min", "k_delta_max", "tol",
                           "log_delta_min"], rows)
    out.table("spectrum_anchors", ["s_star", "s_lower_star", "hausdorff", "lipschitz",
                                   "flagged_steps"],
              [(curve.s_star, curve.s_lower_star, curve.hausdorff, curve.lipschitz,
                " ".join(str(i) for i in curve.flags))])
    if p["trace"]:
        for th, su, _ in curve.rows():
            tp = theta_pressure(spec, su, th, schedule)
            out.table(f"spectrum_trace_theta={th:g}", ["log_delta", "k_delta", "log_min_cost"],
                      tp.trace)


def _realization(spec, p):
    return realize_attractor(spec, p["depth"], placement=p.get("placement"),
                             gap_fraction=p.get("gap_fraction"))


def _cmd_realize(spec, p, out):
    r = _realization(spec, p)
    out.table("realize", ["left", "length"], zip(r.lefts.tolist(), r.lengths.tolist()))


def _cmd_boxdim(spec, p, out):
    r = _realization(spec, p)
    rng = None
    if p["scale_min"] is not None or p["scale_max"] is not None:
        rng = (p["scale_min"] or float(r.lengths.min()),
               p["scale_max"] or spec.ambient_diameter / 10)
    est = empirical_box_dim(r, rng, p["n_scales"])
    out.table("boxdim_counts", ["scale", "count"], zip(est.scales, est.counts))
    out.table("boxdim", ["slope", "stderr"], [(est.slope, est.stderr)])


def _cmd_massdim(spec, p, out):
    t = p["mass_t"]
    if t is None:
        t = jump_points(spec, p["k_max"], p["window"]).s_lower
    r = _realization(spec, p)
    m = mass_distribution(spec, p["depth"], t)
    radii = p["radii"]
    if radii is None:
        radii = np.geomspace(10 * float(r.lengths.min()), 0.1 * spec.ambient_diameter, 17)
    rows = local_exponent_scan(m, r, radii, p["samples"])
    out.table("massdim", ["radius", "min_exponent"], [(rad, e) for rad, e in rows])


def _cmd_truncate(spec, p, out):
    sub, plan = build_subsystem(spec, p["t_grid"], p["slacks"], p["block_length"],
                                p["eps_grid"], p["n_check"], p["window"])
    rows = []
    for k in range(1, p["k_max"] + 1):
        level = materialize_level(spec, k)
        rows.append((k, plan.cut_index(level, k), plan.slack(k), plan.defect_bound(k)))
    out.table("truncate", ["level", "cut_index", "slack", "defect_bound"], rows)
    out.table("truncate_coverage", ["level", "t", "log_full", "log_bound", "holds"],
              verify_coverage(spec, plan, p["k_max"]))
    out.document("subsystem.toml", dumps_spec(sub))


def _cmd_diagnose(spec, p, out):
    rep = condition_diagnostics(spec, p["k_max"], p["window"], p["hold_threshold"],
                                p["fail_threshold"])
    out.table("diagnose", ["k", "ratio_A", "ratio_B", "ratio_C", "ratio_D"], rep.rows())
    rows = []
    for cond, seq in CONDITIONS.items():
        summ = rep.summaries[seq] or {}
        rows.append((cond, seq, rep.verdicts[cond].value, summ.get("max"), summ.get("min"),
                     summ.get("last"), rep.hold_threshold, rep.fail_threshold))
    out.table("diagnose_verdicts", ["condition", "sequence", "verdict", "tail_max", "tail_min",
                                    "last", "hold_threshold", "fail_threshold"], rows)


_RUNNERS = {"pressure": _cmd_pressure, "jump": _cmd_jump, "moran": _cmd_moran,
            "spectrum": _cmd_spectrum, "realize": _cmd_realize, "boxdim": _cmd_boxdim,
            "massdim": _cmd_massdim, "truncate": _cmd_truncate, "diagnose": _cmd_diagnose}


def _fail(record: dict, status: int) -> int:
    sys.stderr.write(json.dumps(record, sort_keys=True) + "\n")
    return status


def run(config: RunConfig) -> int:
    """Execute one command; returns the exit status."""
    try:
        spec = config.load_spec()
    except ConfigError as exc:
        return _fail(exc.record(), EXIT_CONFIG)
    except (OSError, ValueError) as exc:
        return _fail({"error": "spec", "type": type(exc).__name__, "message": str(exc)},
                     EXIT_CONFIG)
    try:
        out = _Writer(config, spec)
        _RUNNERS[config.command](spec, config.params, out)
    except ConfigError as exc:
        return _fail(exc.record(), EXIT_CONFIG)
    except Exception as exc:  # computation errors are reported verbatim
        return _fail({"error": "computation", "type": type(exc).__name__,
                      "message": str(exc)}, EXIT_COMPUTE)
    return EXIT_OK


def write_report(directory) -> Path:
    """Summarise the artifacts of a directory from their sidecars (no recomputation)."""
    directory = Path(directory)
    metas = sorted(directory.glob("*.meta.json"))
    lines = ["# moranspec report", ""]
    for mp in metas:
        meta = json.loads(mp.read_text())
        path = directory / meta["file"]
        lines.append(f"## {meta['file']}")
        lines.append("")
        lines.append(f"- command: `{meta['command']}`; system: `{meta['spec']}` "
                     f"(hash `{meta['spec_hash'][:16]}`); version {meta['version']}")
        params = ", ".join(f"{k}={v}" for k, v in meta["params"].items() if v is not None)
        lines.append(f"- parameters: {params}")
        if not path.exists():
            lines.append("- file missing")
        elif hashlib.sha256(path.read_bytes()).hexdigest() != meta["sha256"]:
            lines.append("- file changed since it was written")
        if meta.get("columns") and path.exists():
            body = [ln for ln in path.read_text().splitlines() if not ln.startswith("#")]
            rows = body[1:] if meta["format"] == "csv" else body
            lines.append(f"- rows: {len(rows)}")
            if rows:
                lines.append("")
                lines.append("```")
                if meta["format"] == "csv":
                    lines.append(body[0])
                lines.extend(rows[:3])
                if len(rows) > 4:
                    lines.append("...")
                if len(rows) > 3:
                    lines.append(rows[-1])
                lines.append("```")
        lines.append("")
    out = directory / "report.md"
    out.write_text("\n".join(lines))
    return out


# ---------------------------------------------------------------------------
# Argument parsing
# ---------------------------------------------------------------------------

class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        sys.exit(_fail({"error": "usage", "message": message}, EXIT_CONFIG))


_FLAG_TYPES = {_int: int, _float: float, _bool: None, _str: str, _grid: str}


def _add_param_flags(sub, command):
    for name in _DEFAULTS[command]:
        conv = _PARAMS[name][0]
        flag = "--" + name.replace("_", "-")
        if conv is _bool:
            sub.add_argument(flag, dest=name, action="store_true", default=None)
        else:
            sub.add_argument(flag, dest=name, type=_FLAG_TYPES[conv], default=None,
                             help=f"default {_DEFAULTS[command][name]!r}")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="moranspec", description="Dimension estimates for Moran-type "
                                                   "non-autonomous iterated function systems")
    parser.add_argument("--version", action="version", version=__version__)
    subs = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    for command in COMMANDS:
        sub = subs.add_parser(command)
        src = sub.add_mutually_exclusive_group(required=True)
        src.add_argument("--preset", choices=None, help=f"one of {', '.join(PRESETS)}")
        src.add_argument("--spec", dest="spec_path", help="TOML system document")
        sub.add_argument("--out", dest="output_dir", default=".")
        sub.add_argument("--format", default="csv")
        sub.add_argument("--emit-config", action="store_true",
                         help="print the resolved configuration and exit")
        _add_param_flags(sub, command)
    run_p = subs.add_parser("run", help="run a TOML configuration document")
    run_p.add_argument("config")
    rep = subs.add_parser("report", help="summarise the artifacts of a directory")
    rep.add_argument("directory")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "report":
            print(write_report(args.directory))
            return EXIT_OK
        if args.command == "run":
            try:
                text = Path(args.config).read_text()
            except OSError as exc:
                return _fail({"error": "io", "message": str(exc)}, EXIT_CONFIG)
            config = parse_config(text)
        else:
            params = {name: getattr(args, name) for name in _DEFAULTS[args.command]
                      if getattr(args, name) is not None}
            for name, value in params.items():
                if _PARAMS[name][0] is _grid and isinstance(value, str) and ":" not in value:
                    try:
                        params[name] = [float(x) for x in value.split(",")]
                    except ValueError:
                        raise ConfigError("bad-type", f"{name}: cannot parse {value!r}") from None
            config = config_from_dict({"command": args.command, "preset": args.preset,
                                       "spec_path": args.spec_path,
                                       "output_dir": args.output_dir, "format": args.format,
                                       "params": params})
            if args.emit_config:
                sys.stdout.write(emit_config(config))
                return EXIT_OK
    except ConfigError as exc:
        return _fail(exc.record(), EXIT_CONFIG)
    return run(config)


if __name__ == "__main__":
    sys.exit(main())
