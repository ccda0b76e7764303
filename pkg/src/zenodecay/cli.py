"""Command-line front end.

Subcommands emit survival curves, response breakdowns or the verification
report as CSV or JSON.  Parameters come from flags and, optionally, a flat
``key = value`` config file; flags win.

Exit status: 0 on success, 1 on usage or I/O errors, 2 when ``verify``
records a FLAG and ``--allow-flags`` is not given.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from dataclasses import asdict, dataclass, field

from . import pipeline, verify
from .errors import DomainError, PerturbationBreakdownError
from .response_first import QubitFieldParams, regulated_response, response_renormalized
from .response_second import (
    KERNELS,
    FieldState,
    response_second_renormalized,
    response_second_total,
    small_time_coeff_p,
    small_time_coeff_q,
)

COMMANDS = ("classical", "zeno-gaussian", "response-first", "response-second", "zeno-curve", "verify")

REAL_PARAMS = ("E", "a", "sigma", "tau_E", "tau_z", "T", "delta_tau", "epsilon", "tol")
COUNT_PARAMS = ("N", "points")
OPTION_KEYS = ("format", "output", "landau_peierls", "allow_flags", "kernel")

REQUIRED = {
    "classical": ("tau_E", "T", "points"),
    "zeno-gaussian": ("tau_z", "T", "N", "points"),
    "response-first": ("E", "delta_tau"),
    "response-second": ("E", "a", "delta_tau"),
    "zeno-curve": ("E", "a", "sigma", "T", "N", "points"),
    "verify": (),
}

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_FLAGS = 2


class UsageError(Exception):
    pass


@dataclass
class RunConfig:
    command: str
    params: dict = field(default_factory=dict)
    output_format: str = "csv"
    output_path: str | None = None
    landau_peierls: bool = False
    allow_flags: bool = False
    kernel: str = "closed_form"

    def meta(self) -> dict:
        d = asdict(self)
        d["params"] = {k: _json_value(v) for k, v in sorted(self.params.items())}
        return d


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _count(text: str) -> float:
    text = text.strip()
    if text.lower() in ("inf", "infinity"):
        return math.inf
    try:
        value = int(text)
    except ValueError:
        raise UsageError(f"expected an integer or 'inf', got {text!r}") from None
    return value


def _real(text: str) -> float:
    try:
        value = float(text)
    except ValueError:
        raise UsageError(f"malformed number {text!r}") from None
    if math.isnan(value):
        raise UsageError("NaN is not an accepted parameter value")
    return value


def _argtype(conv):
    def wrapped(text):
        try:
            return conv(text)
        except UsageError as exc:
            raise argparse.ArgumentTypeError(str(exc)) from None

    wrapped.__name__ = conv.__name__.lstrip("_")
    return wrapped


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False, allow_abbrev=False)
    for name in REAL_PARAMS:
        flag = "--" + name.replace("_", "-")
        common.add_argument(flag, dest=name, type=_argtype(_real), default=None, metavar="X")
    common.add_argument("--N", dest="N", type=_argtype(_count), default=None, metavar="N",
                        help="number of measurements, or inf")
    common.add_argument("--points", dest="points", type=_argtype(_count), default=None, metavar="K",
                        help="number of grid points on [0, T]")
    common.add_argument("--format", dest="format", choices=("csv", "json"), default=None)
    common.add_argument("--output", dest="output", default=None, metavar="PATH")
    common.add_argument("--landau-peierls", dest="landau_peierls", action="store_true", default=None,
                        help="cap N below T|E| and compare with the N = inf curve")
    common.add_argument("--allow-flags", dest="allow_flags", action="store_true", default=None,
                        help="exit 0 even when verification records FLAG entries")
    common.add_argument("--kernel", dest="kernel", choices=KERNELS, default=None,
                        help="flat-band kernel used by response-second")
    common.add_argument("--config", dest="config", default=None, metavar="PATH")

    parser = _Parser(prog="zenodecay", description="Zeno and exponential decay laws for a qubit.",
                     allow_abbrev=False)
    sub = parser.add_subparsers(dest="command", metavar="COMMAND")
    sub.required = True
    for name in COMMANDS:
        sub.add_parser(name, parents=[common], allow_abbrev=False)
    return parser


def read_config_file(path: str) -> dict:
    """Parse ``key = value`` lines; ``#`` starts a comment."""
    with open(path, encoding="utf-8") as fh:
        lines = fh.read().splitlines()
    values = {}
    for lineno, raw in enumerate(lines, 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise UsageError(f"{path}:{lineno}: expected 'key = value'")
        key, value = (s.strip() for s in line.split("=", 1))
        key = key.replace("-", "_")
        if key not in REAL_PARAMS + COUNT_PARAMS + OPTION_KEYS:
            raise UsageError(f"{path}:{lineno}: unknown key {key!r}")
        values[key] = value
    return values


def _coerce_config(raw: dict) -> dict:
    out = {}
    for key, text in raw.items():
        if key in REAL_PARAMS:
            out[key] = _real(text)
        elif key in COUNT_PARAMS:
            out[key] = _count(text)
        elif key in ("landau_peierls", "allow_flags"):
            lowered = text.lower()
            if lowered not in ("true", "false", "1", "0", "yes", "no"):
                raise UsageError(f"{key} must be a boolean, got {text!r}")
            out[key] = lowered in ("true", "1", "yes")
        else:
            out[key] = text
    return out


def parse_config(argv: list[str]) -> RunConfig:
    args = vars(build_parser().parse_args(argv))
    command = args.pop("command")
    config_path = args.pop("config")
    merged = {}
    if config_path is not None:
        try:
            merged.update(_coerce_config(read_config_file(config_path)))
        except OSError as exc:
            raise UsageError(f"cannot read config file: {exc}") from None
    merged.update({k: v for k, v in args.items() if v is not None})

    fmt = merged.pop("format", "csv")
    if fmt not in ("csv", "json"):
        raise UsageError(f"format must be csv or json, got {fmt!r}")
    kernel = merged.pop("kernel", "closed_form")
    if kernel not in KERNELS:
        raise UsageError(f"kernel must be one of {KERNELS}, got {kernel!r}")
    config = RunConfig(
        command=command,
        output_format=fmt,
        output_path=merged.pop("output", None),
        landau_peierls=bool(merged.pop("landau_peierls", False)),
        allow_flags=bool(merged.pop("allow_flags", False)),
        kernel=kernel,
        params=merged,
    )
    _validate(config)
    return config


def _validate(config: RunConfig) -> None:
    p = config.params
    missing = [k for k in REQUIRED[config.command] if k not in p]
    if missing:
        flags = ", ".join("--" + k.replace("_", "-") for k in missing)
        raise UsageError(f"{config.command} requires {flags}")
    if "E" in p and p["E"] == 0:
        raise UsageError("E = 0 is excluded")
    for key in ("tol", "epsilon", "tau_E", "tau_z", "a", "delta_tau"):
        if key in p and not p[key] > 0:
            raise UsageError(f"{key} must be positive")
    if "T" in p and not p["T"] > 0:
        raise UsageError("T must be positive")
    if "sigma" in p and not p["sigma"] >= 0:
        raise UsageError("sigma must be >= 0")
    for key in COUNT_PARAMS:
        if key in p and not p[key] >= 1:
            raise UsageError(f"{key} must be >= 1")
    if "points" in p:
        if p["points"] == math.inf:
            raise UsageError("points must be finite")
        if p["points"] < 2:
            raise UsageError("points must be >= 2")
    if config.landau_peierls and config.command != "zeno-curve":
        raise UsageError("--landau-peierls applies to zeno-curve only")


# ----------------------------------------------------------------- output


def _json_value(v):
    if isinstance(v, float) and not math.isfinite(v):
        return repr(v)
    return v


def _cell(v) -> str:
    if isinstance(v, float):
        return repr(v)
    return str(v)


def _render(config: RunConfig, header: tuple, rows: list[tuple], extra_meta: dict | None = None) -> str:
    if config.output_format == "csv":
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\r\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([_cell(v) for v in row])
        return buf.getvalue()
    meta = config.meta()
    if extra_meta:
        meta.update({k: _json_value(v) for k, v in extra_meta.items()})
    data = [{h: _json_value(v) for h, v in zip(header, row)} for row in rows]
    return json.dumps({"meta": meta, "data": data}, indent=2, allow_nan=False) + "\n"


def _curve_rows(curve: pipeline.SurvivalCurve) -> list[tuple]:
    return [(t, s) for t, s in curve.points]


# --------------------------------------------------------------- commands


def _cmd_classical(config: RunConfig):
    p = config.params
    curve = pipeline.make_survival_curve(pipeline.LawTag.CLASSICAL, p["T"], int(p["points"]), tau_E=p["tau_E"])
    return ("time", "survival"), _curve_rows(curve), None, EXIT_OK


def _cmd_zeno_gaussian(config: RunConfig):
    p = config.params
    curve = pipeline.make_survival_curve(
        pipeline.LawTag.GAUSSIAN_ZENO, p["T"], int(p["points"]), tau_z=p["tau_z"], N=p["N"]
    )
    return ("time", "survival"), _curve_rows(curve), None, EXIT_OK


def _cmd_response_first(config: RunConfig):
    p = config.params
    E, L = p["E"], p["delta_tau"]
    b = response_renormalized(E, L)
    header = ["E", "delta_tau", "piece1", "piece2", "renormalized", "linear_coeff", "quadratic_coeff"]
    row = [E, L, b.piece1, b.piece2, b.renormalized, b.linear_coeff, b.quadratic_coeff]
    if "epsilon" in p:
        header += ["epsilon", "regulated"]
        row += [p["epsilon"], regulated_response(E, L, p["epsilon"])]
    return tuple(header), [tuple(row)], None, EXIT_OK


def _cmd_response_second(config: RunConfig):
    p = config.params
    E, a, L = p["E"], p["a"], p["delta_tau"]
    header = ["E", "a", "delta_tau", "kernel", "renormalized", "p", "q", "small_time"]
    pc, qc = small_time_coeff_p(E, a), small_time_coeff_q(E, a)
    row = [E, a, L, config.kernel, response_second_renormalized(E, a, L, config.kernel), pc, qc, pc * L + qc * L * L]
    if "epsilon" in p:
        b = response_second_total(E, FieldState.flat_band(a), L, p["epsilon"], config.kernel)
        header += ["epsilon", "base_vacuum", "vacuum_part", "shifted_plus", "shifted_minus", "pv_part", "total"]
        row += [p["epsilon"], b.base_vacuum, b.vacuum_part, b.shifted_plus, b.shifted_minus, b.pv_part, b.total]
    return tuple(header), [tuple(row)], None, EXIT_OK


def _cmd_zeno_curve(config: RunConfig):
    p = config.params
    params = QubitFieldParams(p["E"], p["sigma"])
    T, points = p["T"], int(p["points"])
    if config.landau_peierls:
        cmp = pipeline.landau_peierls_comparison(params, p["a"], T, points)
        rows = [
            (t, s, lim, abs(s - lim))
            for (t, s), (_, lim) in zip(cmp.capped.points, cmp.limit.points)
        ]
        extra = {"n_max": cmp.n_max, "max_abs_diff": cmp.max_abs_diff}
        return ("time", "survival", "limit_survival", "abs_diff"), rows, extra, EXIT_OK
    if p["N"] == math.inf:
        curve = pipeline.make_survival_curve(pipeline.LawTag.CONTINUOUS_LIMIT, T, points, params=params, a=p["a"])
    else:
        curve = pipeline.make_survival_curve(
            pipeline.LawTag.FLAT_BAND_SEQUENCE, T, points, N=p["N"], params=params, a=p["a"]
        )
    return ("time", "survival"), _curve_rows(curve), None, EXIT_OK


def _cmd_verify(config: RunConfig):
    report = verify.run_verification(config.params.get("tol"))
    rows = [e.as_row() for e in report.entries]
    status = EXIT_FLAGS if report.flags and not config.allow_flags else EXIT_OK
    extra = {"entries": len(report.entries), "flags": len(report.flags)}
    return verify.REPORT_HEADER, rows, extra, status


_HANDLERS = {
    "classical": _cmd_classical,
    "zeno-gaussian": _cmd_zeno_gaussian,
    "response-first": _cmd_response_first,
    "response-second": _cmd_response_second,
    "zeno-curve": _cmd_zeno_curve,
    "verify": _cmd_verify,
}


def run(config: RunConfig, stdout=None) -> int:
    stdout = sys.stdout if stdout is None else stdout
    header, rows, extra, status = _HANDLERS[config.command](config)
    text = _render(config, header, rows, extra)
    if config.output_path is None:
        stdout.write(text)
    else:
        with open(config.output_path, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    return status


def _diagnostic(message: str) -> None:
    # diagnostics are plain text, so NO_COLOR needs no special handling
    prefix = "zenodecay: error: "
    print(prefix + message, file=sys.stderr)


def main(argv: list[str] | None = None) -> int:
    argv = sys.argv[1:] if argv is None else argv
    try:
        config = parse_config(argv)
    except UsageError as exc:
        _diagnostic(str(exc))
        return EXIT_ERROR
    except SystemExit as exc:  # --help
        return int(exc.code or 0)
    try:
        return run(config)
    except (DomainError, PerturbationBreakdownError, ValueError) as exc:
        _diagnostic(str(exc))
        return EXIT_ERROR
    except OSError as exc:
        _diagnostic(f"cannot write output: {exc}")
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
