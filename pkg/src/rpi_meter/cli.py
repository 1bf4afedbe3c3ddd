"""Command-line front end: a thin client over the service handlers.

Subcommands mirror the HTTP endpoints (regime, probe, limit, map, engine,
sample) plus `serve`, which starts the HTTP service.  Values may come from a
flat key=value config file (--config); explicit flags win.  Every run is a
pure function of (config, seed): identical inputs produce byte-identical
output.

Exit codes: 0 success, 1 usage/parse error, 2 physical-constraint violation,
3 numerical failure.
"""

from __future__ import annotations

import argparse
import math
import sys
from dataclasses import dataclass

from pydantic import ValidationError

from .errors import ConstraintError, NumericalError, RpiMeterError, UsageError
from .service import handlers, schemas

GLOBAL_KEYS = ("units", "alpha", "format", "out")


# ---------------------------------------------------------------------------
# number formatting: 9 significant digits, scientific outside [1e-3, 1e4)
# ---------------------------------------------------------------------------

def fmt(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, int):
        return str(value)
    if isinstance(value, str):
        return value
    x = float(value)
    if x == 0.0:
        return "0.00000000"
    ax = abs(x)
    if ax >= 1e4 or ax < 1e-3:
        return f"{x:.8e}"
    digits = 8 - math.floor(math.log10(ax))
    return f"{x:.{digits}f}"


def emit_text(pairs) -> str:
    return "".join(f"{k}={fmt(v)}\n" for k, v in pairs)


def emit_csv(header, rows) -> str:
    lines = [",".join(header)]
    lines.extend(",".join(fmt(v) for v in row) for row in rows)
    return "\n".join(lines) + "\n"


def emit(result, format: str = "text") -> str:
    """Render a handler response as text (key=value) or CSV."""
    pairs = _result_pairs(result)
    if format == "csv":
        if isinstance(result, schemas.LimitResponse):
            # single row under the map header
            return emit_csv(MAP_HEADER, [_limit_map_row(result)])
        return emit_csv([k for k, _ in pairs], [[v for _, v in pairs]])
    return emit_text(pairs)


def _result_pairs(result):
    if isinstance(result, schemas.RegimeResponse):
        return [("l", result.l), ("tau", result.tau),
                ("four_volume", result.four_volume),
                ("delta_E_out", result.delta_E_out),
                ("delta_H_out", result.delta_H_out),
                ("regime", result.regime),
                ("delta_opt", result.delta_opt),
                ("delta_min", result.delta_min)]
    if isinstance(result, schemas.ProbeResponse):
        return [("delta_x", result.delta_x), ("delta_F", result.delta_F),
                ("delta_E_mech", result.delta_E_mech)]
    if isinstance(result, schemas.LimitResponse):
        return [("regime", result.regime), ("delta_E_abs", result.delta_E_abs),
                ("Q_opt", result.Q_opt), ("delta_x_used", result.delta_x_used),
                ("E_meas", result.E_meas), ("lambda", result.lam),
                ("subregion_count", result.subregion_count), ("rho", result.rho)]
    raise UsageError(f"no text renderer for {type(result).__name__}")


MAP_HEADER = ["l", "tau", "rho", "regime", "delta_E_abs", "Q_opt", "lambda",
              "subregions"]


def _limit_map_row(r: schemas.LimitResponse):
    return [r.l, r.tau, r.rho, r.regime, r.delta_E_abs, r.Q_opt, r.lam,
            r.subregion_count]


def render_map(resp: schemas.MapResponse) -> str:
    rows = [[row.l, row.tau, row.rho, row.regime, row.delta_E_abs, row.Q_opt,
             row.lam, row.subregions] for row in resp.rows]
    return emit_csv(MAP_HEADER, rows)


def render_engine(resp: schemas.EngineResponse) -> str:
    body = emit_csv(["delta", "variance", "fit_C", "fit_p"],
                    [[p.delta, p.variance, resp.fit_C, resp.fit_p]
                     for p in resp.rows])
    summary = [("modes", resp.modes), ("steps", resp.steps),
               ("four_volume", resp.four_volume), ("delta_opt", resp.delta_opt),
               ("delta_min", resp.delta_min), ("fit_C", resp.fit_C),
               ("fit_p", resp.fit_p), ("fit_residual", resp.fit_residual)]
    return body + "".join(f"# {k}={fmt(v)}\n" for k, v in summary)


def render_sample(resp: schemas.SampleResponse, stats_only: bool) -> str:
    stats = resp.stats
    stat_pairs = [("n", stats.n),
                  ("per_component_sd", stats.per_component_sd),
                  ("norm_deviation_E", stats.norm_deviation_E),
                  ("norm_deviation_H", stats.norm_deviation_H),
                  ("delta_E_out", stats.delta_E_out),
                  ("delta_H_out", stats.delta_H_out)]
    if stats_only:
        return emit_text(stat_pairs)
    lines = ["sample,cell,Ex,Ey,Ez,Hx,Hy,Hz"]
    for i, (es, hs) in enumerate(zip(resp.samples_E, resp.samples_H)):
        for c, (e, h) in enumerate(zip(es, hs)):
            lines.append(",".join([str(i), str(c)] +
                                  [fmt(v) for v in (*e, *h)]))
    out = "\n".join(lines) + "\n"
    out += "".join(f"# {k}={fmt(v)}\n" for k, v in stat_pairs)
    for c, (e, h) in enumerate(zip(stats.mean_E, stats.mean_H)):
        out += "# mean," + ",".join([str(c)] + [fmt(v) for v in (*e, *h)]) + "\n"
    return out


# ---------------------------------------------------------------------------
# argument and config handling
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Opt:
    flag: str
    type: type = float
    required: bool = False
    default: object = None
    help: str = ""
    choices: tuple = ()

    @property
    def dest(self) -> str:
        return self.flag.lstrip("-").replace("-", "_")


SUBCOMMANDS: dict[str, list[Opt]] = {
    "regime": [
        Opt("--l", required=True, help="box size"),
        Opt("--tau", required=True, help="duration"),
        Opt("--dE", required=True, help="device resolution, E channel"),
        Opt("--dH", help="device resolution, H channel (defaults to dE)"),
        Opt("--threshold", default=10.0, help="regime classification ratio"),
    ],
    "probe": [
        Opt("--m", required=True, help="probe mass"),
        Opt("--tau", required=True, help="duration"),
        Opt("--Omega", required=True, help="measured-motion frequency"),
        Opt("--omega", default=0.0, help="probe eigenfrequency (0 = free charge)"),
        Opt("--Q", required=True, help="probe charge"),
    ],
    "limit": [
        Opt("--l", required=True, help="box size"),
        Opt("--tau", required=True, help="duration"),
        Opt("--delta-x", help="position error override (downward only)"),
        Opt("--no-charge-quantization", type=bool,
            help="allow probe charges below e"),
    ],
    "map": [
        Opt("--l-min", required=True), Opt("--l-max", required=True),
        Opt("--tau-min", required=True), Opt("--tau-max", required=True),
        Opt("--grid", type=int, required=True, help="grid points per axis"),
    ],
    "engine": [
        Opt("--modes", type=int, default=4, help="mode shells to include"),
        Opt("--steps", type=int, default=64, help="time steps"),
        Opt("--l", required=True), Opt("--tau", required=True),
        Opt("--sweep", default=4.0, help="decades of width sweep"),
        Opt("--points", type=int, default=17, help="sweep points"),
    ],
    "sample": [
        Opt("--l", required=True), Opt("--tau", required=True),
        Opt("--dE", required=True), Opt("--dH"),
        Opt("--n", type=int, required=True, help="sample count"),
        Opt("--seed", type=int, default=0),
        Opt("--cells", type=int, default=1, help="coarse cells K"),
        Opt("--stats-only", type=bool, help="suppress raw samples"),
    ],
    "serve": [
        Opt("--host", type=str, default="127.0.0.1"),
        Opt("--port", type=int, default=8000),
    ],
}


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def build_parser() -> _Parser:
    parser = _Parser(prog="rpi-meter",
                     description="Quantum measurability limits for "
                                 "electromagnetic field measurement")
    sub = parser.add_subparsers(dest="subcommand", metavar="SUBCOMMAND")
    for name, opts in SUBCOMMANDS.items():
        p = sub.add_parser(name, prog=f"rpi-meter {name}")
        for opt in opts:
            if opt.type is bool:
                p.add_argument(opt.flag, dest=opt.dest, action="store_const",
                               const=True, default=None, help=opt.help)
            else:
                p.add_argument(opt.flag, dest=opt.dest, type=opt.type,
                               default=None, help=opt.help)
        p.add_argument("--units", choices=["natural", "cgs"], default=None,
                       help="unit system for inputs and outputs")
        p.add_argument("--alpha", choices=["paper", "codata"], default=None,
                       help="fine-structure-constant value")
        p.add_argument("--config", default=None, help="key=value config file")
        p.add_argument("--out", default=None, help="output file (default stdout)")
        p.add_argument("--format", choices=["text", "csv"], default=None)
    return parser


def load_config(path: str) -> dict[str, str]:
    """Flat key=value file; '#' starts a comment; keys mirror flag names."""
    try:
        with open(path, "r", encoding="utf-8") as fh:
            raw = fh.read()
    except OSError as exc:
        raise UsageError(f"cannot read config file {path}: {exc}")
    values: dict[str, str] = {}
    for lineno, line in enumerate(raw.splitlines(), start=1):
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        if "=" not in stripped:
            raise UsageError(f"{path}:{lineno}: expected key=value, got {line!r}")
        key, _, value = stripped.partition("=")
        key, value = key.strip(), value.strip()
        if not key or not value:
            raise UsageError(f"{path}:{lineno}: expected key=value, got {line!r}")
        values[key.replace("-", "_")] = value
    return values


def _coerce(opt: Opt, raw: str):
    if opt.type is bool:
        low = raw.lower()
        if low in ("true", "1", "yes"):
            return True
        if low in ("false", "0", "no"):
            return False
        raise UsageError(f"config key {opt.dest}: expected a boolean, got {raw!r}")
    try:
        return opt.type(raw)
    except ValueError:
        raise UsageError(
            f"config key {opt.dest}: expected {opt.type.__name__}, got {raw!r}")


def merge_config(args: argparse.Namespace, opts: list[Opt]) -> dict:
    """Flag value if given, else config-file value, else built-in default."""
    cfg = load_config(args.config) if args.config else {}
    allowed = {o.dest for o in opts} | set(GLOBAL_KEYS)
    for key in cfg:
        if key not in allowed:
            raise UsageError(f"unknown config key {key!r} for this subcommand")
    merged = {}
    for opt in opts:
        value = getattr(args, opt.dest)
        if value is None and opt.dest in cfg:
            value = _coerce(opt, cfg[opt.dest])
        if value is None:
            value = opt.default
        if value is None and opt.required:
            raise UsageError(f"missing required parameter {opt.flag}")
        merged[opt.dest] = value
    for key in GLOBAL_KEYS:
        value = getattr(args, key)
        if value is None and key in cfg:
            value = cfg[key]
        merged[key] = value
    merged["units"] = merged["units"] or "natural"
    merged["alpha"] = merged["alpha"] or "paper"
    merged["format"] = merged["format"] or "text"
    return merged


# ---------------------------------------------------------------------------
# subcommand runners
# ---------------------------------------------------------------------------

def _units_kwargs(v: dict) -> dict:
    return {"units": v["units"], "alpha": v["alpha"]}


def _run_subcommand(name: str, v: dict) -> str:
    if name == "regime":
        resp = handlers.run_regime(schemas.RegimeRequest(
            l=v["l"], tau=v["tau"], dE=v["dE"], dH=v["dH"],
            threshold=v["threshold"], **_units_kwargs(v)))
        return emit(resp, v["format"])
    if name == "probe":
        resp = handlers.run_probe(schemas.ProbeRequest(
            m=v["m"], tau=v["tau"], Omega=v["Omega"], omega=v["omega"],
            Q=v["Q"], **_units_kwargs(v)))
        return emit(resp, v["format"])
    if name == "limit":
        resp = handlers.run_limit(schemas.LimitRequest(
            l=v["l"], tau=v["tau"], delta_x=v["delta_x"],
            enforce_charge_quantization=not v["no_charge_quantization"],
            **_units_kwargs(v)))
        return emit(resp, v["format"])
    if name == "map":
        resp = handlers.run_map(schemas.MapRequest(
            l_min=v["l_min"], l_max=v["l_max"], tau_min=v["tau_min"],
            tau_max=v["tau_max"], grid=v["grid"], **_units_kwargs(v)))
        return render_map(resp)
    if name == "engine":
        resp = handlers.run_engine(schemas.EngineRequest(
            modes=v["modes"], steps=v["steps"], l=v["l"], tau=v["tau"],
            sweep_decades=v["sweep"], points=v["points"], **_units_kwargs(v)))
        return render_engine(resp)
    if name == "sample":
        stats_only = bool(v["stats_only"])
        resp = handlers.run_sample(schemas.SampleRequest(
            l=v["l"], tau=v["tau"], dE=v["dE"], dH=v["dH"], n=v["n"],
            seed=v["seed"], cells=v["cells"], stats_only=stats_only,
            **_units_kwargs(v)))
        return render_sample(resp, stats_only)
    raise UsageError(f"unknown subcommand {name!r}")


def _write_output(text: str, out_path: str | None) -> None:
    if out_path is None:
        sys.stdout.write(text)
        return
    try:
        with open(out_path, "w", encoding="utf-8") as fh:
            fh.write(text)
    except OSError as exc:
        raise UsageError(f"cannot write output file {out_path}: {exc}")


def run(argv) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.subcommand is None:
        raise UsageError("a subcommand is required "
                         f"(one of: {', '.join(SUBCOMMANDS)})")
    if args.subcommand == "serve":
        v = merge_config(args, SUBCOMMANDS["serve"])
        import uvicorn

        from .service.app import app
        uvicorn.run(app, host=v["host"], port=int(v["port"]))
        return 0
    v = merge_config(args, SUBCOMMANDS[args.subcommand])
    try:
        text = _run_subcommand(args.subcommand, v)
    except ValidationError as exc:
        first = exc.errors()[0]
        loc = ".".join(str(p) for p in first["loc"])
        raise UsageError(f"invalid value for {loc}: {first['msg']}")
    _write_output(text, v["out"])
    return 0


def main(argv=None) -> int:
    try:
        return run(sys.argv[1:] if argv is None else argv)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except ConstraintError as exc:
        print(f"constraint violation: {exc}", file=sys.stderr)
        return 2
    except NumericalError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 3
    except RpiMeterError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
