"""Command-line front end.

    realdivisor <command> [curve] [options]

Commands: periods, jacobian, bergman, bounds, simulate, report.
Exit codes: 0 success, 2 configuration error, 3 numerical failure (a
diagnostic JSON object is written to stderr), 4 simulation budget exceeded.
"""

from __future__ import annotations

import argparse
import datetime
import json
import math
import platform
import sys
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import __version__
from .bergman import (SamplingError, abel_jacobi_real_polyline, ell_integral, orthonormal_frame,
                      polylines_to_csv, real_locus_length)
from .bounds import add_simulation, curve_bounds
from .curves import (CurveError, Family, RealHyperellipticCurve, eps_of, family_a_eps,
                     make_family_a, make_m_curve)
from .jacobian import vol_real
from .numerics import NumericsError, QuadratureSpec
from .periods import PeriodError, compute_periods
from .plotting import polylines_svg
from .torus_sim import (SimulationBudgetError, UnsupportedDimensionError, bracket_to_dict,
                        grid_to_pgm, min_cover_m, rasterize)

COMMANDS = ("periods", "jacobian", "bergman", "bounds", "simulate", "report")
FORMATS = {
    "periods": ("json", "text"),
    "jacobian": ("json", "text"),
    "bergman": ("json", "csv", "svg", "text"),
    "bounds": ("json", "text"),
    "simulate": ("json", "text"),
    "report": ("json",),
}
DEFAULTS = {"tol": 1e-10, "max_levels": 12, "grid": 512, "samples": 1024, "format": "json",
            "no_meta": False, "simulate": False, "m_max": None, "out": None, "pgm_dir": None}

EXIT_OK, EXIT_CONFIG, EXIT_NUMERIC, EXIT_BUDGET = 0, 2, 3, 4


class ConfigError(ValueError):
    pass


@dataclass
class RunConfig:
    command: str
    curve: RealHyperellipticCurve
    quadrature: QuadratureSpec = field(default_factory=QuadratureSpec)
    grid_n: int = 512
    n_samples: int = 1024
    out: Path | None = None
    format: str = "json"
    meta: bool = True
    simulate: bool = False
    eps: float | None = None
    m_max: int | None = None
    pgm_dir: Path | None = None

    def __post_init__(self):
        if self.command not in COMMANDS:
            raise ConfigError(f"unknown command {self.command!r}")
        if self.format not in FORMATS[self.command]:
            raise ConfigError(f"format {self.format!r} is not available for {self.command!r}; "
                              f"choose from {', '.join(FORMATS[self.command])}")
        if self.grid_n < 64:
            raise ConfigError("--grid must be at least 64")
        if self.n_samples < 64:
            raise ConfigError("--samples must be at least 64")


def _floats(text: str) -> list[float]:
    try:
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError as exc:
        raise ConfigError(f"expected comma-separated numbers, got {text!r}") from exc


def _curve_from_options(opts: dict) -> RealHyperellipticCurve:
    given = [k for k in ("family_a_eps", "family_a", "m_curve", "curve") if opts.get(k) is not None]
    if len(given) > 1:
        raise ConfigError(f"choose one curve source, got {', '.join(given)}")
    if not given:
        if opts.get("eps") is not None:
            return family_a_eps(float(opts["eps"]))
        raise ConfigError("no curve given; use --family-a-eps, --family-a, --m-curve or --curve")
    key = given[0]
    value = opts[key]
    if key == "family_a_eps":
        return family_a_eps(float(value))
    if key == "family_a":
        params = value if isinstance(value, list) else _floats(value)
        if len(params) != 3:
            raise ConfigError("--family-a takes exactly three values c1,c2,c3")
        return make_family_a(*params)
    if key == "m_curve":
        return make_m_curve(value if isinstance(value, list) else _floats(value))
    if isinstance(value, dict):
        return RealHyperellipticCurve.from_dict(value)
    path = Path(value)
    text = path.read_text() if not value.lstrip().startswith("{") and path.exists() else value
    return RealHyperellipticCurve.from_json(text)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="realdivisor", description=__doc__.split("\n\n")[0])
    parser.add_argument("--version", action="version", version=f"realdivisor {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        p = sub.add_parser(name)
        src = p.add_argument_group("curve")
        src.add_argument("--family-a-eps", type=float, help="X_eps with c = ((1-eps)^2, 1, (1+eps)^2)")
        src.add_argument("--family-a", help="c1,c2,c3 for w^2 = (c1+z^2)(c2+z^2)(c3+z^2)")
        src.add_argument("--m-curve", help="sorted real roots r1,...,r_{2g+2}")
        src.add_argument("--curve", help='curve JSON file or inline {"family": ..., "params": [...]}')
        src.add_argument("--eps", type=float, help="identify the curve as X_eps (bounds)")
        p.add_argument("--config", help="JSON file with option defaults")
        p.add_argument("--tol", type=float, help="absolute and relative quadrature tolerance")
        p.add_argument("--max-levels", type=int, help="tanh-sinh refinement levels")
        p.add_argument("--grid", type=int, help="torus grid resolution per axis")
        p.add_argument("--samples", type=int, help="samples per oval for polylines")
        p.add_argument("--m-max", type=int, help="sumset budget (default 4 * grid)")
        p.add_argument("--out", help="output path (default stdout)")
        p.add_argument("--format", choices=("json", "csv", "svg", "text"))
        p.add_argument("--no-meta", action="store_true", default=None,
                       help="omit timestamp and platform fields")
        p.add_argument("--pgm-dir", help="simulate: write one PGM per component layer here")
        if name == "report":
            p.add_argument("--simulate", action="store_true", default=None,
                           help="also run the sumset simulation")
    return parser


def config_from_args(args: argparse.Namespace) -> RunConfig:
    """Merge flags over the config file over built-in defaults."""
    flags = {k: v for k, v in vars(args).items() if v is not None}
    file_opts: dict = {}
    if flags.get("config"):
        try:
            file_opts = json.loads(Path(flags["config"]).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read config file: {exc}") from exc
        if not isinstance(file_opts, dict):
            raise ConfigError("config file must hold a JSON object")
        file_opts = {k.replace("-", "_"): v for k, v in file_opts.items()}
    curve_keys = ("family_a_eps", "family_a", "m_curve", "curve")
    if any(k in flags for k in curve_keys):
        file_opts = {k: v for k, v in file_opts.items() if k not in curve_keys}
    opts = {**DEFAULTS, **file_opts, **flags}
    curve = _curve_from_options(opts)
    eps = opts.get("eps")
    if eps is not None:
        known = eps_of(curve)
        if known is None or abs(known - eps) > 1e-9:
            raise ConfigError(f"--eps {eps} does not match the curve {curve.curve_id()}")
    tol = float(opts["tol"])
    try:
        spec = QuadratureSpec(abs_tol=tol, rel_tol=tol, max_levels=int(opts["max_levels"]))
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    return RunConfig(
        command=opts["command"], curve=curve, quadrature=spec, grid_n=int(opts["grid"]),
        n_samples=int(opts["samples"]), out=Path(opts["out"]) if opts.get("out") else None,
        format=opts["format"], meta=not opts["no_meta"], simulate=bool(opts["simulate"]),
        eps=eps, m_max=opts.get("m_max"),
        pgm_dir=Path(opts["pgm_dir"]) if opts.get("pgm_dir") else None)


def _envelope(config: RunConfig, body: dict) -> dict:
    doc = {"tool": {"name": "realdivisor", "version": __version__},
           "command": config.command,
           "curve": config.curve.to_dict(),
           "quadrature": config.quadrature.to_dict()}
    doc.update(body)
    if config.meta:
        doc["meta"] = {"timestamp": datetime.datetime.now(datetime.timezone.utc).isoformat(),
                       "python": platform.python_version(), "numpy": np.__version__}
    return doc


def _clean(obj):
    if isinstance(obj, dict):
        return {str(k): _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _clean(obj.tolist())
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.floating, float)):
        v = float(obj)
        return v if math.isfinite(v) else None
    if isinstance(obj, np.bool_):
        return bool(obj)
    return obj


def dumps(doc: dict) -> str:
    return json.dumps(_clean(doc), indent=2) + "\n"


def _emit(config: RunConfig, text: str) -> None:
    if config.out is None:
        sys.stdout.write(text)
    else:
        config.out.parent.mkdir(parents=True, exist_ok=True)
        config.out.write_text(text)


def _matrix_text(name: str, A) -> str:
    rows = ["  [" + ", ".join(f"{v: .12g}" for v in row) + "]" for row in np.asarray(A)]
    return f"{name} =\n" + "\n".join(rows)


def _simulate(config: RunConfig, periods) -> tuple[dict, object]:
    if periods.g != 2:
        raise UnsupportedDimensionError(f"the sumset simulation supports g = 2 only (g = {periods.g})")
    n = config.grid_n
    polys = abel_jacobi_real_polyline(config.curve, periods, max(config.n_samples, 4 * n),
                                      config.quadrature)
    grid = rasterize(polys, n)
    r = config.curve.n_ovals
    m_lower, m_upper = min_cover_m(grid, r, config.m_max)
    return bracket_to_dict(m_lower, m_upper, n, grid), grid


def run(config: RunConfig) -> int:
    spec = config.quadrature
    curve = config.curve
    periods = compute_periods(curve, spec)
    cmd = config.command

    if cmd == "periods":
        if config.format == "text":
            _emit(config, f"{curve.curve_id()}  g = {periods.g}\n{_matrix_text('M', periods.M)}\n"
                          f"{_matrix_text('T', periods.T)}\nresiduals: {periods.residuals}\n")
        else:
            _emit(config, dumps(_envelope(config, {"periods": periods.to_dict()})))
        return EXIT_OK

    jac = vol_real(periods)
    if cmd == "jacobian":
        if config.format == "text":
            d = jac.to_dict()
            _emit(config, "\n".join(f"{k:22s} {v}" for k, v in d.items()) + "\n")
        else:
            _emit(config, dumps(_envelope(config, {"jacobian": jac.to_dict()})))
        return EXIT_OK

    length = real_locus_length(curve, periods, spec)
    if cmd == "bergman":
        polys = abel_jacobi_real_polyline(curve, periods, config.n_samples, spec)
        if config.format == "csv":
            _emit(config, polylines_to_csv(polys))
        elif config.format == "svg":
            _emit(config, polylines_svg(polys, periods.T, curve.curve_id()))
        else:
            body = {"length": length, "frame": orthonormal_frame(periods.T),
                    "polylines": [{"oval_id": p.oval_id, "component_label": list(p.component_label),
                                   "n_points": len(p.points), "closure_defect": p.closure_defect,
                                   "advance": list(p.advance)} for p in polys]}
            eps = eps_of(curve)
            if eps is not None:
                body["ell"] = ell_integral(eps, spec)
            if config.format == "text":
                _emit(config, f"length {length:.12g}\n" + "".join(
                    f"oval {p['oval_id']}: label {p['component_label']} advance {p['advance']} "
                    f"closure defect {p['closure_defect']:.2e}\n" for p in body["polylines"]))
            else:
                _emit(config, dumps(_envelope(config, {"bergman": body})))
        return EXIT_OK

    if cmd == "simulate":
        result, grid = _simulate(config, periods)
        if config.pgm_dir is not None:
            config.pgm_dir.mkdir(parents=True, exist_ok=True)
            for lab in grid.labels:
                tag = "".join(map(str, lab)) or "0"
                (config.pgm_dir / f"layer_{tag}.pgm").write_bytes(grid_to_pgm(grid.cells[lab]))
        if config.format == "text":
            _emit(config, f"N(X) bracket on a {config.grid_n}^2 grid: "
                          f"[{result['m_lower']}, {result['m_upper']}]\n")
        else:
            _emit(config, dumps(_envelope(config, {"simulation": result})))
        return EXIT_OK

    polyline = None
    if curve.family is Family.FAMILY_A:
        polyline = abel_jacobi_real_polyline(curve, periods, config.n_samples, spec)[0]
    report = curve_bounds(curve, spec, periods, jac, length, config.eps, polyline)
    if cmd == "bounds":
        if config.format == "text":
            _emit(config, report.to_table() + "\n")
        else:
            _emit(config, dumps(_envelope(config, {"bounds": report.to_dict()})))
            if config.out is None:
                sys.stderr.write(report.to_table() + "\n")
        return EXIT_OK

    # report
    body = {"topological_type": list(curve.topo_type), "periods": periods.to_dict(),
            "jacobian": jac.to_dict(), "length": length}
    eps = eps_of(curve)
    if eps is not None:
        body["ell"] = ell_integral(eps, spec)
    if config.simulate:
        result, _ = _simulate(config, periods)
        body["simulation"] = result
        add_simulation(report, result["m_lower"], result["m_upper"], config.grid_n)
    body["bounds"] = report.to_dict()
    body["sandwich_consistent"] = report.sandwich_consistent()
    if periods.g == 2 and config.out is not None:
        polys = abel_jacobi_real_polyline(curve, periods, config.n_samples, spec)
        svg_path = config.out.with_suffix(".svg")
        svg_path.parent.mkdir(parents=True, exist_ok=True)
        svg_path.write_text(polylines_svg(polys, periods.T, curve.curve_id()))
        body["figure"] = svg_path.name
    _emit(config, dumps(_envelope(config, {"report": body})))
    return EXIT_OK


def _diagnostic(exc: Exception, **extra) -> None:
    doc = {"error": type(exc).__name__, "message": str(exc), **extra}
    sys.stderr.write(dumps(doc))


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        config = config_from_args(args)
    except (ConfigError, CurveError, OSError) as exc:
        sys.stderr.write(f"realdivisor: configuration error: {exc}\n")
        return EXIT_CONFIG
    try:
        return run(config)
    except UnsupportedDimensionError as exc:
        sys.stderr.write(f"realdivisor: configuration error: {exc}\n")
        return EXIT_CONFIG
    except SimulationBudgetError as exc:
        _diagnostic(exc, m_max=exc.m_max, coverage=exc.coverage)
        return EXIT_BUDGET
    except (NumericsError, PeriodError, SamplingError, ArithmeticError) as exc:
        extra = {}
        if hasattr(exc, "value"):
            extra = {"best_estimate": getattr(exc, "value"), "err_est": getattr(exc, "err_est", None)}
        _diagnostic(exc, **extra)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
