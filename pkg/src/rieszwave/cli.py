"""Command-line interface: ``rieszwave {eval,figure,nodes,compare,validity-map}``.

Exit codes: 0 success, 2 domain error, 3 non-convergence, 4 I/O error,
5 bracket error.  Defaults come from a ``key = value`` config file named by
``--config`` or ``RIESZWAVE_CONFIG``; flags override it.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
import tempfile
import warnings
from dataclasses import dataclass, field, fields
from pathlib import Path

import numpy as np

from . import __version__
from .analytic import (EvalPoint, PhysicalParams, Representation, SeriesControls,
                       scaled_argument, u_hseries)
from .compare import FIG1_T, FIG1_X0, GridSpec, compare_reps, records_to_csv, to_json, \
    validity_map
from .errors import (BracketError, ConvergenceError, DomainError, GridResolutionWarning,
                     RieszWaveError)
from .evaluators import evaluate, evaluate_grid, resolve
from .nodes import birth_time, default_x_floor, scan_nodes
from .quadrature import QuadratureControls

EXIT_OK, EXIT_DOMAIN, EXIT_CONVERGENCE, EXIT_IO, EXIT_BRACKET = 0, 2, 3, 4, 5

CONFIG_ENV = "RIESZWAVE_CONFIG"


# -- configuration -----------------------------------------------------------------

@dataclass
class RunConfig:
    mu: float = 1.0
    kappa: float = 1.0
    x0: float = 1.0
    term_tol: float = 1e-15
    max_terms: int = 400
    k_max: int = 200
    abs_tol: float = 1e-10
    rel_tol: float = 1e-10
    max_subdivisions: int = 2000
    out_dir: str = "."
    float_format: str = "repr"

    def params(self) -> PhysicalParams:
        return PhysicalParams(self.mu, self.kappa, self.x0)

    def series(self) -> SeriesControls:
        return SeriesControls(self.term_tol, self.max_terms, self.k_max)

    def quad(self) -> QuadratureControls:
        return QuadratureControls(self.abs_tol, self.rel_tol, self.max_subdivisions)

    def validate(self) -> None:
        self.params()
        self.series()
        self.quad()
        fmt_float(1.0, self.float_format)


def parse_config(text: str, source: str = "<config>") -> RunConfig:
    """Parse ``key = value`` lines; ``#`` starts a comment; unknown keys fail."""
    cfg = RunConfig()
    types = {f.name: f.type for f in fields(RunConfig)}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise DomainError(f"{source}:{lineno}: expected 'key = value'")
        key, value = (s.strip() for s in line.split("=", 1))
        if key not in types:
            raise DomainError(f"{source}:{lineno}: unknown key {key!r}")
        kind = types[key]
        try:
            if kind == "float":
                setattr(cfg, key, float(value))
            elif kind == "int":
                setattr(cfg, key, int(value))
            else:
                setattr(cfg, key, value)
        except ValueError:
            raise DomainError(f"{source}:{lineno}: bad value {value!r} for {key}") from None
    cfg.validate()
    return cfg


def load_config(path: str | None) -> RunConfig:
    path = path or os.environ.get(CONFIG_ENV)
    if not path:
        return RunConfig()
    return parse_config(Path(path).read_text(), path)


def fmt_float(v: float, spec: str = "repr") -> str:
    if spec == "repr":
        return repr(float(v))
    try:
        return format(float(v), spec)
    except ValueError:
        raise DomainError(f"invalid float_format {spec!r}") from None


def _floats(text: str, n: int | None = None) -> list[float]:
    try:
        vals = [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise DomainError(f"expected comma-separated numbers, got {text!r}") from None
    if n is not None and len(vals) != n:
        raise DomainError(f"expected {n} comma-separated numbers, got {text!r}")
    return vals


# -- output --------------------------------------------------------------------------

def atomic_write(path: Path, text: str) -> None:
    """Write via a temporary file in the same directory and rename."""
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(prefix=f".{path.name}.", dir=path.parent)
    try:
        with os.fdopen(fd, "w", newline="\n") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        try:
            os.unlink(tmp)
        except OSError:
            pass
        raise


def write_all(files: dict[Path, str]) -> None:
    """Write a batch of files; on failure remove the ones already written."""
    done = []
    try:
        for path, text in files.items():
            existed = path.exists()
            atomic_write(path, text)
            if not existed:
                done.append(path)
    except OSError:
        for p in done:
            try:
                p.unlink()
            except OSError:
                pass
        raise


def _emit(text: str, out: str | None) -> None:
    if out:
        atomic_write(Path(out), text)
    else:
        sys.stdout.write(text)


# -- commands ----------------------------------------------------------------------------

def _params_from(args, cfg: RunConfig) -> PhysicalParams:
    return PhysicalParams(cfg.mu if args.mu is None else args.mu,
                          cfg.kappa if args.kappa is None else args.kappa,
                          cfg.x0 if args.x0 is None else args.x0)


def cmd_eval(args, cfg: RunConfig) -> int:
    params = _params_from(args, cfg)
    rep = resolve(args.rep, params)
    point = EvalPoint(args.x, args.t)
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        if args.as_printed:
            if rep is not Representation.HSeries:
                raise DomainError("--as-printed only applies to --rep hseries")
            u = u_hseries(point, params, cfg.series(), as_printed=True)
        else:
            u = evaluate(rep, point, params, cfg.series(), cfg.quad())
    xi = scaled_argument(point, params) if point.x != 0.0 else math.nan
    names = sorted({w.category.__name__ for w in caught})
    print(f"u={fmt_float(u, cfg.float_format)} rep={rep.tag} "
          f"xi={fmt_float(xi, cfg.float_format)} warnings=[{','.join(names)}]")
    return EXIT_OK


def _x0_tag(x0: float) -> str:
    for label, val in (("1", 1.0), ("sqrt0.5", math.sqrt(0.5)), ("sqrt0.1", math.sqrt(0.1))):
        if x0 == val:
            return label
    return repr(x0)


def _t_tag(t: float) -> str:
    return repr(t).removesuffix(".0")


_GNUPLOT = """\
# x0 = {x0!r}, t = {t!r}, mu = kappa = 1
set datafile separator ','
set key off
set xlabel 'x'
set ylabel 'u(x,t)'
set title 'x0 = {x0_tag}, t = {t_tag}'
set xrange [{lo}:{hi}]
set xzeroaxis
plot '{csv}' using 1:2 every ::1 with lines
"""


def cmd_figure(args, cfg: RunConfig) -> int:
    if args.preset != "fig1":
        raise DomainError(f"unknown preset {args.preset!r}")
    out = Path(args.out or cfg.out_dir)
    n = args.points
    window = 15.0
    files: dict[Path, str] = {}
    panels = []
    for x0 in FIG1_X0:
        params = PhysicalParams(1.0, 1.0, x0)
        rep = resolve(args.rep, params)
        x_floor = default_x_floor(params)
        pos = np.linspace(x_floor, window, n)
        x = np.concatenate((-pos[::-1], pos))
        for t in FIG1_T:
            u_pos = evaluate_grid(rep, pos, t, params, cfg.series(), cfg.quad())
            u = np.concatenate((u_pos[::-1], u_pos))
            stem = f"fig1_x0={_x0_tag(x0)}_t={_t_tag(t)}"
            lines = ["x,u"] + [f"{fmt_float(a, cfg.float_format)},{fmt_float(b, cfg.float_format)}"
                               for a, b in zip(x, u)]
            files[out / f"{stem}.csv"] = "\n".join(lines) + "\n"
            files[out / f"{stem}.gp"] = _GNUPLOT.format(
                x0=x0, t=t, x0_tag=_x0_tag(x0), t_tag=_t_tag(t), lo=-window, hi=window,
                csv=f"{stem}.csv")
            with warnings.catch_warnings():
                warnings.simplefilter("ignore", GridResolutionWarning)
                report = scan_nodes(t, params, rep, window, series=cfg.series(), quad=cfg.quad())
            panels.append({"x0": x0, "x0_tag": _x0_tag(x0), "t": t, "csv": f"{stem}.csv",
                           "plot": f"{stem}.gp", "representation": rep.tag,
                           "node_count": report.count, "nodes": list(report.nodes),
                           "min_point": {"x": report.min_point[0], "u": report.min_point[1]},
                           "scan_grid_points": report.grid_points})
    manifest = {"preset": "fig1", "mu": 1.0, "kappa": 1.0, "window": [-window, window],
                "points_per_sign": n, "x_floor_rule": "max(1e-3, x0/100)",
                "version": __version__, "panels": panels}
    files[out / "fig1_manifest.json"] = to_json(manifest)
    write_all(files)
    print(f"wrote {len(panels)} panels to {out}")
    return EXIT_OK


def cmd_nodes(args, cfg: RunConfig) -> int:
    params = _params_from(args, cfg)
    if args.birth:
        if not args.t_bracket:
            raise DomainError("--birth needs --t-bracket lo,hi")
        bracket = _floats(args.t_bracket, 2)
        t_star = birth_time(params, args.rep, args.window, bracket, args.tol,
                            n_grid=args.n_grid, series=cfg.series(), quad=cfg.quad())
        doc = {"birth_time": t_star, "t_bracket": bracket, "tol": args.tol,
               "representation": resolve(args.rep, params).tag,
               "params": {"mu": params.mu, "kappa": params.kappa, "x0": params.x0}}
        _emit(to_json(doc), args.out)
        return EXIT_OK
    if args.t is None:
        raise DomainError("nodes needs --t or --birth")
    report = scan_nodes(args.t, params, args.rep, args.window, args.n_grid, args.xtol,
                        series=cfg.series(), quad=cfg.quad())
    _emit(to_json(report), args.out)
    return EXIT_OK


def _grid_from(args, cfg: RunConfig) -> GridSpec:
    if args.preset:
        if args.preset != "fig1-grid":
            raise DomainError(f"unknown preset {args.preset!r}")
        return GridSpec.fig1_lattice()
    if args.xi_range:
        lo, hi = _floats(args.xi_range, 2)
        x0s = _floats(args.x0_list) if args.x0_list else [0.0]
        return GridSpec.xi_range(lo, hi, args.n, kappa=cfg.kappa if args.kappa is None
                                 else args.kappa, x0_values=x0s)
    if args.x_list and args.t_list:
        x0s = _floats(args.x0_list) if args.x0_list else [cfg.x0]
        try:
            return GridSpec(_floats(args.x_list), _floats(args.t_list), x0s)
        except ValueError as exc:
            raise DomainError(str(exc)) from None
    raise DomainError("give --preset fig1-grid, --xi-range lo,hi, or --x-list with --t-list")


def _base_params(args, cfg: RunConfig) -> PhysicalParams:
    return PhysicalParams(cfg.mu if args.mu is None else args.mu,
                          cfg.kappa if args.kappa is None else args.kappa, 0.0)


def cmd_compare(args, cfg: RunConfig) -> int:
    reps = [r.strip() for r in (args.reps or "").split(",") if r.strip()]
    if len(reps) != 2:
        raise DomainError("--reps needs exactly two tags, e.g. lambda,doublesum")
    grid = _grid_from(args, cfg)
    base = _base_params(args, cfg)
    a, b = (Representation.from_tag(r) for r in reps)
    report = compare_reps(grid, base, a, b, cfg.series(), cfg.quad(), workers=args.workers)
    if args.out:
        out = Path(args.out)
        stem = f"compare_{a.tag}_{b.tag}"
        write_all({out / f"{stem}.json": to_json(report),
                   out / f"{stem}.csv": records_to_csv(report.records)})
    s = report.summary
    wp = s["worst_point"]
    worst = "none" if wp is None else f"(x={wp['x']!r},t={wp['t']!r},x0={wp['x0']!r})"
    print(f"reps={a.tag},{b.tag} n={s['n_points']} errors={s['n_errors']} "
          f"max_abs_dev={s['max_abs_dev']!r} max_rel_dev={s['max_rel_dev']!r} worst={worst}")
    return EXIT_OK


def cmd_validity_map(args, cfg: RunConfig) -> int:
    grid = _grid_from(args, cfg)
    base = _base_params(args, cfg)
    records = validity_map(grid, base, args.tol, cfg.series(), cfg.quad(),
                           series_rep=args.rep, workers=args.workers)
    if args.out:
        out = Path(args.out)
        write_all({out / "validity_map.json": to_json(records),
                   out / "validity_map.csv": records_to_csv(records)})
    far = [r for r in records if r.x0 == 0.0 or abs(r.x) >= 3.0 * r.x0]
    print(f"tol={args.tol!r} n={len(records)} passed={sum(r.passed for r in records)} "
          f"far_field(|x|>=3x0)={len(far)} far_passed={sum(r.passed for r in far)}")
    return EXIT_OK


# -- parser ----------------------------------------------------------------------------

def _add_params(p: argparse.ArgumentParser, with_x0: bool = True) -> None:
    if with_x0:
        p.add_argument("--x0", type=float, help="Gaussian width (default 1; 0 = delta pulse)")
    p.add_argument("--mu", type=float, help="pulse weight (default 1)")
    p.add_argument("--kappa", type=float, help="equation coefficient (default 1)")


def _add_grid(p: argparse.ArgumentParser) -> None:
    p.add_argument("--preset", help="fig1-grid: the 128 x 4 x 3 comparison lattice")
    p.add_argument("--xi-range", help="lo,hi: x values spanning this xi range at t = 1")
    p.add_argument("--n", type=int, default=64, help="points for --xi-range")
    p.add_argument("--x-list", help="comma-separated x values")
    p.add_argument("--t-list", help="comma-separated t values")
    p.add_argument("--x0-list", help="comma-separated widths")
    p.add_argument("--workers", type=int, default=None, help="worker processes")
    p.add_argument("--out", help="output directory for JSON/CSV reports")
    _add_params(p, with_x0=False)


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="rieszwave", description=__doc__.split("\n")[0])
    ap.add_argument("--config", help=f"config file (default ${CONFIG_ENV})")
    ap.add_argument("--version", action="version", version=__version__)
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("eval", help="evaluate u at one point")
    p.add_argument("--x", type=float, required=True)
    p.add_argument("--t", type=float, required=True)
    _add_params(p)
    p.add_argument("--rep", default="lambda", help="representation tag (or auto)")
    p.add_argument("--as-printed", action="store_true",
                   help="hseries only: expand theta_k in xi^l instead of (2 xi)^l")
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("figure", help="write the time-evolution panels")
    p.add_argument("--preset", default="fig1")
    p.add_argument("--out", help="output directory")
    p.add_argument("--rep", default="auto", help="representation (default: the oracle)")
    p.add_argument("--points", type=int, default=1024, help="samples per sign of x")
    p.set_defaults(func=cmd_figure)

    p = sub.add_parser("nodes", help="node report at one time, or the birth time")
    p.add_argument("--t", type=float)
    p.add_argument("--birth", action="store_true")
    p.add_argument("--t-bracket", help="lo,hi for --birth")
    p.add_argument("--tol", type=float, default=1e-6, help="birth-time tolerance")
    p.add_argument("--window", type=float, default=15.0, help="scan |x| <= window")
    p.add_argument("--n-grid", type=int, default=4096)
    p.add_argument("--xtol", type=float, default=1e-10)
    p.add_argument("--rep", default="auto")
    p.add_argument("--out", help="write the JSON here instead of stdout")
    _add_params(p)
    p.set_defaults(func=cmd_nodes)

    p = sub.add_parser("compare", help="compare two representations on a grid")
    p.add_argument("--reps", required=True, help="A,B")
    _add_grid(p)
    p.set_defaults(func=cmd_compare)

    p = sub.add_parser("validity-map", help="chart where the series matches the oracle")
    p.add_argument("--tol", type=float, default=1e-6)
    p.add_argument("--rep", default="lambda", help="series representation to test")
    _add_grid(p)
    p.set_defaults(func=cmd_validity_map)
    return ap


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = load_config(args.config)
        return args.func(args, cfg)
    except BracketError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_BRACKET
    except DomainError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DOMAIN
    except ConvergenceError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONVERGENCE
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    except RieszWaveError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DOMAIN


if __name__ == "__main__":
    sys.exit(main())
