"""Command-line front end: correlators, measures, trajectories, scans, oracles.

Every subcommand reads its parameters from flags and, optionally, from a
JSON config file given with ``--config``; flags override the file.  All
values are validated before any computation starts.  Output is CSV (with
``#`` comment lines) or a single JSON object, written to stdout or
``--output``.

Exit codes: 0 success, 2 invalid input, 3 quadrature failure, 4 too few
p_sc values for a derivative, 5 oracle tolerance violated, 1 anything
else.  Failures print one JSON error record on stderr.
"""
from __future__ import annotations

import argparse
import itertools
import json
import logging
import math
import re
import sys
from typing import Any, Callable, Optional, Sequence

import numpy as np

from . import __version__, correlators, dynamics, measures, oracles
from .channels import ChannelKind
from .correlators import ModelKind, ModelPoint, QuadratureConfig
from .errors import (
    DiscordQPTError,
    InsufficientDataError,
    InvalidStateError,
    QuadratureError,
    SizeLimitError,
    TableParseError,
    UnclassifiableError,
    UnsupportedChannelError,
    UnsupportedModelError,
)
from .xstate import XState

log = logging.getLogger("discordqpt")

EXIT_OK, EXIT_OTHER, EXIT_INVALID, EXIT_QUADRATURE, EXIT_DATA, EXIT_ORACLE = 0, 1, 2, 3, 4, 5

_INVALID = (ValueError, TypeError, OSError, TableParseError, InvalidStateError,
            UnsupportedModelError, SizeLimitError, UnsupportedChannelError)


class CLIError(Exception):
    def __init__(self, message: str, code: int = EXIT_INVALID, kind: str = "invalid-input"):
        super().__init__(message)
        self.code = code
        self.kind = kind


def _emit_error(kind: str, message: str, code: int) -> None:
    record = {"error": kind, "exit_code": code, "message": " ".join(str(message).split())}
    sys.stderr.write(json.dumps(record) + "\n")


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        _emit_error("usage", message, EXIT_INVALID)
        raise SystemExit(EXIT_INVALID)


# --------------------------------------------------------------------------
# value parsing


def parse_grid(text: Any) -> list[float]:
    """``"start:stop:step"`` (stop included), ``"a,b,c"`` or a single number."""
    if isinstance(text, (int, float)) and not isinstance(text, bool):
        return [float(text)]
    if isinstance(text, (list, tuple)):
        return [float(v) for v in text]
    text = str(text).strip()
    if ":" in text:
        parts = text.split(":")
        if len(parts) != 3:
            raise ValueError(f"range must be start:stop:step, got {text!r}")
        start, stop, step = (float(v) for v in parts)
        if not step > 0 or stop < start:
            raise ValueError(f"range needs step > 0 and stop >= start, got {text!r}")
        n = int(math.floor((stop - start) / step + 1e-9)) + 1
        return [float(v) for v in np.round(start + step * np.arange(n), 12)]
    values = [float(v) for v in text.split(",") if v.strip()]
    if not values:
        raise ValueError("empty value list")
    return values


def _float(v: Any) -> float:
    out = float(v)
    if not math.isfinite(out):
        raise ValueError(f"expected a finite number, got {v!r}")
    return out


def _int(v: Any) -> int:
    if isinstance(v, float) and not v.is_integer():
        raise ValueError(f"expected an integer, got {v!r}")
    return int(v)


def _int_list(v: Any) -> list[int]:
    vals = parse_grid(v)
    if any(not x.is_integer() for x in vals):
        raise ValueError(f"expected integers, got {v!r}")
    return [int(x) for x in vals]


def _bool(v: Any) -> bool:
    if isinstance(v, bool):
        return v
    s = str(v).lower()
    if s in ("1", "true", "yes"):
        return True
    if s in ("0", "false", "no"):
        return False
    raise ValueError(f"expected a boolean, got {v!r}")


def _state(v: Any) -> XState:
    vals = parse_grid(v) if not isinstance(v, dict) else [v[k] for k in "abdzf"]
    if len(vals) != 5:
        raise ValueError("a state needs five values a,b,d,z,f")
    return XState(*(float(x) for x in vals)).validate()


def _choice(options: Sequence[str]) -> Callable[[Any], str]:
    def conv(v: Any) -> str:
        s = str(v)
        if s not in options:
            raise ValueError(f"expected one of {', '.join(options)}, got {s!r}")
        return s
    return conv


_CHANNELS = [c.value for c in ChannelKind]

# name -> (converter, default); a default of ... marks a required value
_COMMON = {
    "format": (_choice(["csv", "json"]), "csv"),
    "output": (str, None),
}
_QUAD = {
    "abs_tol": (_float, correlators.DEFAULT_QUAD.abs_tol),
    "rel_tol": (_float, correlators.DEFAULT_QUAD.rel_tol),
    "max_subdivisions": (_int, correlators.DEFAULT_QUAD.max_subdivisions),
}
_SOURCE = {
    "model": (_choice(["xy", "tim"]), "xy"),
    "lambda": (_float, None),
    "gamma": (_float, 1.0),
    "r": (_int, 1),
    "state": (_state, None),
    "table": (str, None),
    "delta": (_float, None),
}
OPTIONS: dict[str, dict[str, tuple]] = {
    "correlators": {
        **_COMMON, **_QUAD,
        "model": (_choice(["xy", "tim"]), "xy"),
        "lambda": (parse_grid, ...),
        "gamma": (parse_grid, [1.0]),
        "r": (_int_list, [1]),
    },
    "measures": {
        **_COMMON, **_QUAD, **_SOURCE,
        "channel": (_choice(_CHANNELS), None),
        "p": (_float, 0.0),
        "numeric": (_bool, False),
    },
    "trajectory": {
        **_COMMON, **_QUAD, **_SOURCE,
        "channel": (_choice(_CHANNELS), ...),
        "p_max": (_float, dynamics.DEFAULT_P_MAX),
        "points": (_int, dynamics.DEFAULT_P_POINTS),
    },
    "scan": {
        **_COMMON, **_QUAD,
        "param": (_choice(list(dynamics.CRITICAL_POINTS)), ...),
        "grid": (parse_grid, ...),
        "channel": (_choice(_CHANNELS), ...),
        "lambda": (_float, None),
        "gamma": (_float, None),
        "r": (_int, 1),
        "table": (str, None),
        "critical": (_float, None),
        "allow_critical": (_bool, False),
        "workers": (_int, 1),
    },
    "oracle": {
        **_COMMON,
        "seed": (_int, 0),
        "n_states": (_int, 1000),
    },
}


def resolve_config(command: str, file_values: dict, flag_values: dict) -> dict:
    """Merge defaults, config file and flags (in rising priority) and convert."""
    options = OPTIONS[command]
    unknown = sorted(set(file_values) - set(options))
    if unknown:
        raise CLIError(f"unknown config keys for {command}: {', '.join(unknown)}")
    merged = {}
    for name, (conv, default) in options.items():
        if name in flag_values:
            raw = flag_values[name]
        elif name in file_values:
            raw = file_values[name]
        elif default is ...:
            raise CLIError(f"missing required option --{name.replace('_', '-')}")
        else:
            merged[name] = default
            continue
        try:
            merged[name] = None if raw is None else conv(raw)
        except (ValueError, TypeError, InvalidStateError) as exc:
            raise CLIError(f"--{name.replace('_', '-')}: {exc}") from None
    return merged


def _load_config_file(path: Optional[str]) -> dict:
    if not path:
        return {}
    try:
        with open(path, encoding="utf-8") as fh:
            data = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise CLIError(f"cannot read config {path}: {exc}") from None
    if not isinstance(data, dict):
        raise CLIError("config file must hold a JSON object")
    return {str(k).replace("-", "_"): v for k, v in data.items()}


def _quad(cfg: dict) -> QuadratureConfig:
    return QuadratureConfig(cfg["abs_tol"], cfg["rel_tol"], cfg["max_subdivisions"])


def _source(cfg: dict):
    """Initial-state source from ``--state``, ``--table`` or a model point."""
    if cfg["state"] is not None:
        return cfg["state"]
    if cfg["table"] is not None:
        rows = correlators.load_correlator_table(cfg["table"])
        if cfg["delta"] is not None:
            match = [row for row in rows if row[0].kind is ModelKind.XXZ
                     and abs(row[0].delta - cfg["delta"]) < 1e-12 and row[0].r == cfg["r"]]
        elif cfg["lambda"] is not None:
            match = [row for row in rows if row[0].kind in (ModelKind.XY, ModelKind.TIM)
                     and abs(row[0].lam - cfg["lambda"]) < 1e-12
                     and abs(row[0].gamma - cfg["gamma"]) < 1e-12 and row[0].r == cfg["r"]]
        else:
            raise CLIError("--table needs --delta or --lambda to select a row")
        if not match:
            raise CLIError(f"no matching row in {cfg['table']}")
        dynamics.resolve_state(match[0])
        return match[0]
    if cfg["lambda"] is None:
        raise CLIError("give --lambda, --state or --table")
    if cfg["model"] == "tim":
        return ModelPoint(ModelKind.TIM, lam=cfg["lambda"], gamma=cfg["gamma"], r=cfg["r"])
    return ModelPoint.xy(cfg["lambda"], cfg["gamma"], cfg["r"])


# --------------------------------------------------------------------------
# output


class Result:
    def __init__(self, command: str, config: dict, columns: list[str], rows: list[list],
                 footer: Optional[dict] = None, code: int = EXIT_OK):
        self.command = command
        self.config = config
        self.columns = columns
        self.rows = rows
        self.footer = footer or {}
        self.code = code


def _csv_cell(v: Any) -> str:
    if v is None:
        return ""
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, (float, np.floating)):
        return format(float(v), ".17g")
    if hasattr(v, "value"):
        return str(v.value)
    return str(v)


def _json_value(v: Any) -> Any:
    if isinstance(v, dict):
        return {str(k): _json_value(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [_json_value(x) for x in v]
    if isinstance(v, XState):
        return dict(zip("abdzf", v.as_tuple()))
    if hasattr(v, "value"):
        return v.value
    if isinstance(v, (np.floating, float)):
        v = float(v)
        return v if math.isfinite(v) else str(v)
    if isinstance(v, np.integer):
        return int(v)
    return v


def render(result: Result, fmt: str) -> str:
    if fmt == "json":
        doc = {
            "command": result.command,
            "config": _json_value(result.config),
            "columns": result.columns,
            "rows": [dict(zip(result.columns, _json_value(r))) for r in result.rows],
            "footer": _json_value(result.footer),
        }
        return json.dumps(doc, indent=1) + "\n"
    lines = [f"# discordqpt {result.command}"]
    for key, value in result.config.items():
        lines.append(f"# {key}={json.dumps(_json_value(value))}")
    lines.append(",".join(result.columns))
    lines.extend(",".join(_csv_cell(v) for v in row) for row in result.rows)
    for key, value in result.footer.items():
        lines.append(f"# {key}: {json.dumps(_json_value(value))}")
    return "\n".join(lines) + "\n"


# --------------------------------------------------------------------------
# commands


def cmd_correlators(cfg: dict) -> Result:
    kind = ModelKind(cfg["model"])
    points = [
        ModelPoint(kind, lam=lam, gamma=gamma, r=r)
        for lam, gamma, r in itertools.product(cfg["lambda"], cfg["gamma"], cfg["r"])
    ]
    for pt in points:
        if pt.r > correlators.MAX_SEPARATION:
            raise SizeLimitError(f"r={pt.r} exceeds {correlators.MAX_SEPARATION}")
    quad = _quad(cfg)
    rows = []
    for pt in points:
        cs = correlators.correlator_set(pt, quad)
        rows.append([pt.kind.value, pt.lam, pt.gamma, pt.r, *cs.as_tuple()])
    columns = ["kind", "lambda", "gamma", "r", "mz", "sxx", "syy", "szz"]
    return Result("correlators", cfg, columns, rows)


def cmd_measures(cfg: dict) -> Result:
    source = _source(cfg)
    channel = cfg["channel"]
    if not 0.0 <= cfg["p"] <= 1.0:
        raise CLIError("--p must lie in [0, 1]")
    x0 = dynamics.resolve_state(source, _quad(cfg))
    x = dynamics.evolve(x0, ChannelKind(channel), cfg["p"]) if channel else x0
    t = measures.triple(x)
    branch = measures.discord_analytic(x).branch
    columns = ["a", "b", "d", "z", "f", "mutual", "classical", "discord", "branch"]
    row = [*x.as_tuple(), *t, branch]
    if cfg["numeric"]:
        columns.append("discord_numeric")
        row.append(measures.discord_numeric(x))
    return Result("measures", cfg, columns, [row])


def cmd_trajectory(cfg: dict) -> Result:
    if not 0.0 < cfg["p_max"] < 1.0:
        raise CLIError("--p-max must lie in (0, 1); p = 1 is reported in the footer")
    if cfg["points"] < 2:
        raise CLIError("--points must be at least 2")
    source = _source(cfg)
    channel = ChannelKind(cfg["channel"])
    quad = _quad(cfg)
    x0 = dynamics.resolve_state(source, quad)
    grid = np.linspace(0.0, cfg["p_max"], cfg["points"])
    traj = dynamics.trajectory(x0, channel, grid)
    rows = [[float(p), *t, b] for p, t, b in zip(grid, traj.triples, traj.branches)]

    footer: dict[str, Any] = {}
    if channel in dynamics.UNITAL:
        sc = dynamics.detect_p_sc(x0, channel)
        footer["p_sc"] = sc.p_sc
        footer["p_sc_method"] = sc.method
        footer["p_sc_axes"] = list(sc.axes) if sc.axes else None
    else:
        footer["p_sc"] = None
    try:
        footer["dynamics_type"] = dynamics.classify(traj) if len(grid) >= 50 else None
    except UnclassifiableError as exc:
        footer["dynamics_type"] = None
        footer["classification_note"] = str(exc)
    footer["discord_exceeds_classical"] = dynamics.q_exceeds_c_interval(traj)
    footer["limit_p1"] = dict(dynamics.limit_triple(x0, channel)._asdict())
    columns = ["p", "mutual", "classical", "discord", "branch"]
    return Result("trajectory", cfg, columns, rows, footer)


def cmd_scan(cfg: dict) -> Result:
    param = cfg["param"]
    channel = ChannelKind(cfg["channel"])
    if channel not in dynamics.UNITAL:
        raise CLIError("scans need a BF, PF or BPF channel")
    if cfg["workers"] < 1:
        raise CLIError("--workers must be >= 1")
    fixed, table = {}, None
    if param == "lambda":
        if cfg["gamma"] is None:
            raise CLIError("a lambda scan needs --gamma")
        fixed["gamma"] = cfg["gamma"]
        for v in cfg["grid"]:
            ModelPoint.xy(v, cfg["gamma"], cfg["r"])
    elif param == "gamma":
        if cfg["lambda"] is None:
            raise CLIError("a gamma scan needs --lambda")
        fixed["lambda"] = cfg["lambda"]
        for v in cfg["grid"]:
            ModelPoint.xy(cfg["lambda"], v, cfg["r"])
    else:
        if cfg["table"] is None:
            raise CLIError("a delta scan needs --table")
        table = correlators.load_correlator_table(cfg["table"])

    result = dynamics.scan(
        param, cfg["grid"], fixed, channel, r=cfg["r"], table=table, quad=_quad(cfg),
        allow_critical=cfg["allow_critical"], critical=cfg["critical"], workers=cfg["workers"],
    )
    rows = [[float(g), p, d] for g, p, d in zip(result.grid, result.p_sc, result.derivative)]
    ind = result.indicator
    footer: dict[str, Any] = {
        "divergence_indicator": None if ind is None else {
            "criterion": "finite-grid indicator: |dp_sc/d%s| nearest the critical value "
                         ">= 2x its value 10 grid steps away" % param,
            "critical": ind.critical,
            "near": ind.near,
            "far": ind.far,
            "ratio": ind.ratio,
            "fires": ind.fires,
            "monotone_tail": ind.monotone_tail,
        }
    }
    if ind is None:
        summary = {"divergence_indicator": None, "reason": "derivative missing near the critical value"}
    else:
        summary = {"divergence_indicator": "fires" if ind.fires else "quiet", "ratio": ind.ratio,
                   "near": ind.near, "far": ind.far, "monotone_tail": ind.monotone_tail}
    sys.stderr.write(json.dumps(_json_value(summary)) + "\n")
    columns = [param, "p_sc", f"dp_sc_d{param}"]
    return Result("scan", cfg, columns, rows, footer)


def cmd_oracle(cfg: dict) -> Result:
    if cfg["n_states"] < 1:
        raise CLIError("--n-states must be >= 1")
    results = oracles.run_all(cfg["seed"], cfg["n_states"], progress=lambda n: log.info("oracle: %s", n))
    rows = [[r.name, r.max_dev, r.median_dev, r.tolerance, r.passed, r.note] for r in results]
    failed = [r.name for r in results if not r.passed]
    footer = {"all_passed": not failed, "failed": failed}
    code = EXIT_ORACLE if failed else EXIT_OK
    columns = ["oracle", "max_dev", "median_dev", "tolerance", "passed", "note"]
    return Result("oracle", cfg, columns, rows, footer, code)


COMMANDS = {
    "correlators": cmd_correlators,
    "measures": cmd_measures,
    "trajectory": cmd_trajectory,
    "scan": cmd_scan,
    "oracle": cmd_oracle,
}


# --------------------------------------------------------------------------
# argument parsing


def _add_common(p: argparse.ArgumentParser, quad: bool = True) -> None:
    p.add_argument("--config", help="JSON file of option values; flags override it")
    p.add_argument("--format", help="csv (default) or json")
    p.add_argument("--output", "-o", help="output file (default stdout)")
    if quad:
        p.add_argument("--abs-tol", help="quadrature absolute tolerance (default 1e-10)")
        p.add_argument("--rel-tol", help="quadrature relative tolerance (default 1e-10)")
        p.add_argument("--max-subdivisions", help="quadrature subdivision budget (default 2**20)")


def _add_source(p: argparse.ArgumentParser) -> None:
    p.add_argument("--model", help="xy (default) or tim")
    p.add_argument("--lambda", help="inverse transverse field")
    p.add_argument("--gamma", help="anisotropy in [-1, 1] (default 1)")
    p.add_argument("--r", help="spin separation (default 1)")
    p.add_argument("--state", help="explicit X state as a,b,d,z,f")
    p.add_argument("--table", help="correlator table (CSV) to draw the state from")
    p.add_argument("--delta", help="XXZ anisotropy selecting a table row")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="discordqpt", description=__doc__.split("\n\n")[0],
                     argument_default=argparse.SUPPRESS)
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("--verbose", "-v", action="store_true", help="log progress to stderr")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("correlators", help="ground-state correlators of the XY chain",
                       argument_default=argparse.SUPPRESS)
    _add_common(p)
    p.add_argument("--model", help="xy (default) or tim")
    p.add_argument("--lambda", help="value, list a,b,c or range start:stop:step")
    p.add_argument("--gamma", help="value, list or range (default 1)")
    p.add_argument("--r", help="separation(s), value or list (default 1)")

    p = sub.add_parser("measures", help="I, C and Q of one state",
                       argument_default=argparse.SUPPRESS)
    _add_common(p)
    _add_source(p)
    p.add_argument("--channel", help="evolve first under AD, PF, BF or BPF")
    p.add_argument("--p", help="parametrized time for --channel (default 0)")
    p.add_argument("--numeric", action="store_const", const=True,
                   help="also report the brute-force discord")

    p = sub.add_parser("trajectory", help="I, C and Q along a decoherence channel",
                       argument_default=argparse.SUPPRESS)
    _add_common(p)
    _add_source(p)
    p.add_argument("--channel", help="AD, PF, BF or BPF")
    p.add_argument("--p-max", help="last grid point (default 0.999)")
    p.add_argument("--points", help="number of grid points (default 1001)")

    p = sub.add_parser("scan", help="p_sc and its derivative across a tuning parameter",
                       argument_default=argparse.SUPPRESS)
    _add_common(p)
    p.add_argument("--param", help="lambda, gamma or delta")
    p.add_argument("--grid", help="list a,b,c or range start:stop:step")
    p.add_argument("--channel", help="PF, BF or BPF")
    p.add_argument("--lambda", help="fixed lambda for gamma scans")
    p.add_argument("--gamma", help="fixed gamma for lambda scans")
    p.add_argument("--r", help="spin separation (default 1)")
    p.add_argument("--table", help="correlator table, required for delta scans")
    p.add_argument("--critical", help="critical value for the divergence indicator")
    p.add_argument("--allow-critical", action="store_const", const=True,
                   help="permit grid points on a critical value")
    p.add_argument("--workers", help="parallel worker processes (default 1)")

    p = sub.add_parser("oracle", help="cross-check closed forms against brute force",
                       argument_default=argparse.SUPPRESS)
    _add_common(p, quad=False)
    p.add_argument("--seed", help="random-state seed (default 0)")
    p.add_argument("--n-states", help="random states per oracle (default 1000)")
    return parser


def _exit_code_for(exc: BaseException) -> tuple[int, str]:
    if isinstance(exc, CLIError):
        return exc.code, exc.kind
    if isinstance(exc, QuadratureError):
        return EXIT_QUADRATURE, "quadrature"
    if isinstance(exc, InsufficientDataError):
        return EXIT_DATA, "insufficient-data"
    if isinstance(exc, _INVALID):
        return EXIT_INVALID, "invalid-input"
    if isinstance(exc, DiscordQPTError):
        return EXIT_OTHER, type(exc).__name__
    return EXIT_OTHER, "internal"


def _attach_negative_values(argv: Sequence[str]) -> list[str]:
    """Fold ``--flag -0.5:0.5:0.1`` into ``--flag=-0.5:0.5:0.1``.

    argparse only accepts plain negative numbers as option values.
    """
    out: list[str] = []
    i = 0
    while i < len(argv):
        tok = argv[i]
        if (tok.startswith("--") and "=" not in tok and i + 1 < len(argv)
                and re.match(r"^-[\d.]", argv[i + 1])):
            out.append(f"{tok}={argv[i + 1]}")
            i += 2
        else:
            out.append(tok)
            i += 1
    return out


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    argv = _attach_negative_values(sys.argv[1:] if argv is None else list(argv))
    try:
        ns = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    flags = vars(ns)
    command = flags.pop("command")
    logging.basicConfig(level=logging.INFO if flags.pop("verbose", False) else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s", stream=sys.stderr)
    try:
        file_values = _load_config_file(flags.pop("config", None))
        cfg = resolve_config(command, file_values, flags)
        result = COMMANDS[command](cfg)
        text = render(result, cfg["format"])
        if cfg["output"]:
            with open(cfg["output"], "w", encoding="utf-8", newline="") as fh:
                fh.write(text)
        else:
            sys.stdout.write(text)
    except Exception as exc:  # noqa: BLE001 - every failure maps to an exit code
        code, kind = _exit_code_for(exc)
        if code == EXIT_OTHER:
            log.debug("unhandled error", exc_info=True)
        _emit_error(kind, str(exc), code)
        return code
    if result.code == EXIT_ORACLE:
        _emit_error("oracle-failure", "failed: " + ", ".join(result.footer["failed"]), EXIT_ORACLE)
    return result.code


if __name__ == "__main__":
    sys.exit(main())
