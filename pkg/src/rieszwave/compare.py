"""Pointwise comparison of representations and the empirical validity map."""

from __future__ import annotations

import csv
import io
import json
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, fields
from typing import Sequence

import numpy as np

from .analytic import (EvalPoint, PhysicalParams, Representation, SeriesControls,
                       gaussian_remnant, scaled_argument)
from .errors import RieszWaveError
from .evaluators import RepLike, evaluate, oracle_for, resolve
from .quadrature import QuadratureControls

#: A point is "near a node" when both values are below this fraction of the
#: largest |u| in its (x0, t) slice; its rel_dev is kept but left out of the summary.
NEAR_NODE_LEVEL = 1e-8

FIG1_X0 = (1.0, math.sqrt(0.5), math.sqrt(0.1))
FIG1_T = (0.1, 1.7, 5.0, 6.5)


@dataclass(frozen=True)
class GridSpec:
    x_values: tuple[float, ...]
    t_values: tuple[float, ...]
    x0_values: tuple[float, ...]

    def __post_init__(self):
        for name in ("x_values", "t_values", "x0_values"):
            vals = tuple(float(v) for v in getattr(self, name))
            if not vals:
                raise ValueError(f"{name} must be nonempty")
            if not all(math.isfinite(v) for v in vals):
                raise ValueError(f"{name} must be finite")
            object.__setattr__(self, name, vals)
        if any(x == 0.0 for x in self.x_values):
            raise ValueError("x_values must exclude 0")
        if any(x0 < 0.0 for x0 in self.x0_values):
            raise ValueError("x0_values must be nonnegative")

    @classmethod
    def fig1_lattice(cls, n: int = 64) -> GridSpec:
        """x in +-linspace(0.2, 15, n), the four panel times and three widths."""
        pos = np.linspace(0.2, 15.0, n)
        x = np.concatenate((-pos[::-1], pos))
        return cls(tuple(x), FIG1_T, FIG1_X0)

    @classmethod
    def xi_range(cls, xi_lo: float, xi_hi: float, n: int = 64, t: float = 1.0,
                 kappa: float = 1.0, x0_values: Sequence[float] = (0.0,)) -> GridSpec:
        """Positive x placed so that xi = kappa t^2/x runs geometrically over [xi_lo, xi_hi]."""
        if not 0.0 < xi_lo < xi_hi:
            raise ValueError("need 0 < xi_lo < xi_hi")
        xi = np.geomspace(xi_lo, xi_hi, n)
        x = np.sort(kappa * t * t / xi)
        return cls(tuple(x), (t,), tuple(x0_values))

    def points(self):
        """(x0, t, x) in record order: x0 outer, t middle, x inner."""
        for x0 in self.x0_values:
            for t in self.t_values:
                for x in self.x_values:
                    yield x0, t, x


@dataclass(frozen=True)
class ComparisonRecord:
    x: float
    t: float
    x0: float
    uA: float
    uB: float
    abs_dev: float
    rel_dev: float
    gaussian_remnant: float
    near_node: bool = False
    error: str | None = None


@dataclass(frozen=True)
class ComparisonReport:
    repA: Representation
    repB: Representation
    records: tuple[ComparisonRecord, ...]
    summary: dict

    def as_dict(self) -> dict:
        return {"repA": self.repA.tag, "repB": self.repB.tag,
                "summary": self.summary,
                "records": [asdict(r) for r in self.records]}


def _eval_pair(args):
    repA, repB, x0, t, x, base, series, quad = args
    params = base.with_(x0=x0)
    point = EvalPoint(x, t)
    try:
        ua = evaluate(repA, point, params, series, quad)
        ub = evaluate(repB, point, params, series, quad)
        return ua, ub, None
    except RieszWaveError as exc:
        return math.nan, math.nan, f"{type(exc).__name__}: {exc}"


def _map(fn, jobs, workers):
    if workers and workers > 1:
        with ProcessPoolExecutor(workers) as ex:
            return list(ex.map(fn, jobs, chunksize=16))
    return [fn(j) for j in jobs]


def _summarize(records: Sequence[ComparisonRecord]) -> dict:
    ok = [r for r in records if r.error is None]
    if not ok:
        return {"max_abs_dev": math.nan, "max_rel_dev": math.nan, "max_rel_dev_all": math.nan,
                "worst_point": None, "n_points": len(records), "n_errors": len(records),
                "n_near_node": 0}
    worst = max(ok, key=lambda r: r.abs_dev)
    far = [r.rel_dev for r in ok if not r.near_node]
    return {
        "max_abs_dev": worst.abs_dev,
        "max_rel_dev": max(far) if far else math.nan,
        "max_rel_dev_all": max(r.rel_dev for r in ok),
        "worst_point": {"x": worst.x, "t": worst.t, "x0": worst.x0},
        "n_points": len(records),
        "n_errors": len(records) - len(ok),
        "n_near_node": sum(r.near_node for r in ok),
    }


def compare_reps(grid: GridSpec, params_base: PhysicalParams, repA: RepLike,
                 repB: RepLike, series: SeriesControls | None = None,
                 quad: QuadratureControls | None = None, *,
                 workers: int | None = None) -> ComparisonReport:
    """Evaluate both representations on every grid point.

    Evaluation errors are recorded per point (NaN values plus message), not
    raised.  With ``workers > 1`` points are farmed out to processes; the
    record order never depends on that.
    """
    A = resolve(repA, params_base)
    B = resolve(repB, params_base)
    jobs = [(A, B, x0, t, x, params_base, series, quad) for x0, t, x in grid.points()]
    values = _map(_eval_pair, jobs, workers)

    # slice scales for the near-node flag
    scale: dict = {}
    for (_, _, x0, t, *_), (ua, ub, err) in zip(jobs, values):
        if err is None:
            scale[(x0, t)] = max(scale.get((x0, t), 0.0), abs(ua), abs(ub))

    records = []
    for (_, _, x0, t, x, *_), (ua, ub, err) in zip(jobs, values):
        rem = gaussian_remnant(x, params_base.with_(x0=x0))
        if err is not None:
            records.append(ComparisonRecord(x, t, x0, ua, ub, math.nan, math.nan, rem,
                                            False, err))
            continue
        d = abs(ua - ub)
        rel = d / max(abs(ua), abs(ub), 1e-300)
        near = max(abs(ua), abs(ub)) < NEAR_NODE_LEVEL * scale[(x0, t)]
        records.append(ComparisonRecord(x, t, x0, ua, ub, d, rel, rem, near))
    return ComparisonReport(A, B, tuple(records), _summarize(records))


@dataclass(frozen=True)
class ValidityRecord:
    x: float
    t: float
    x0: float
    xi: float
    ratio_x_x0: float
    u_series: float
    u_oracle: float
    abs_dev: float
    allowance: float
    passed: bool
    error: str | None = None


def validity_map(grid: GridSpec, params_base: PhysicalParams, tol: float,
                 series: SeriesControls | None = None,
                 quad: QuadratureControls | None = None, *,
                 series_rep: RepLike = Representation.LambdaForm,
                 workers: int | None = None) -> list[ValidityRecord]:
    """Where does the series match the oracle?

    A point passes when ``|u_series - u_oracle| <= max(tol, 2 * remnant)``,
    with the remnant ``mu exp(-(x/x0)^2)/(x0 sqrt(pi))`` (0 for x0 = 0).  The
    oracle is the spectral integral for x0 > 0 and the closed form for x0 = 0.
    """
    S = resolve(series_rep, params_base)
    jobs = []
    for x0, t, x in grid.points():
        p = params_base.with_(x0=x0)
        jobs.append((S, oracle_for(p), x0, t, x, params_base, series, quad))
    values = _map(_eval_pair, jobs, workers)
    out = []
    for (_, _, x0, t, x, *_), (us, uo, err) in zip(jobs, values):
        p = params_base.with_(x0=x0)
        xi = scaled_argument(EvalPoint(x, t), p)
        ratio = abs(x) / x0 if x0 > 0 else math.inf
        allowance = max(tol, 2.0 * gaussian_remnant(x, p))
        if err is not None:
            out.append(ValidityRecord(x, t, x0, xi, ratio, us, uo, math.nan, allowance,
                                      False, err))
            continue
        d = abs(us - uo)
        out.append(ValidityRecord(x, t, x0, xi, ratio, us, uo, d, allowance, d <= allowance))
    return out


# -- serialization ----------------------------------------------------------------

def _clean(v):
    """JSON-safe copy: non-finite floats become null."""
    if isinstance(v, float):
        return v if math.isfinite(v) else None
    if isinstance(v, dict):
        return {k: _clean(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [_clean(x) for x in v]
    if isinstance(v, Representation):
        return v.tag
    return v


def to_json(obj) -> str:
    """Deterministic JSON (sorted keys, shortest round-trip floats, NaN as null)."""
    if hasattr(obj, "as_dict"):
        obj = obj.as_dict()
    elif isinstance(obj, list) and obj and hasattr(obj[0], "__dataclass_fields__"):
        obj = [asdict(r) for r in obj]
    return json.dumps(_clean(obj), sort_keys=True, indent=1, allow_nan=False) + "\n"


def format_float(v: float) -> str:
    """Shortest decimal that round-trips; empty for NaN."""
    v = float(v)
    return "" if math.isnan(v) else repr(v)


def _csv_cell(v) -> str:
    if v is None:
        return ""
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, (float, np.floating)):
        return format_float(float(v))
    return str(v)


def records_to_csv(records: Sequence) -> str:
    """CSV with one header line, ``,`` separators and ``\\n`` line ends."""
    if not records:
        return ""
    names = [f.name for f in fields(records[0])]
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(names)
    for r in records:
        w.writerow([_csv_cell(getattr(r, n)) for n in names])
    return buf.getvalue()
