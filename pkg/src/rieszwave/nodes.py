"""Zeros of the spatial profile u(., t): location, minima, birth times.

Profiles are even in x, so every scan runs over ``[x_floor, x_hi]`` and
mirrors the result.  ``x_floor = max(1e-3, x0/100)`` keeps the scan out
of the neighbourhood of the origin where the series forms are singular.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import minimize_scalar

from .analytic import PhysicalParams, Representation, SeriesControls
from .errors import BracketError, DomainError, GridResolutionWarning
from .evaluators import RepLike, evaluate_grid, resolve
from .quadrature import QuadratureControls

DEFAULT_GRID = 4096
DEFAULT_XTOL = 1e-10
#: Relative level below which a non-crossing extremum is called a tangency.
TANGENCY_LEVEL = 1e-9


def default_x_floor(params: PhysicalParams) -> float:
    return max(1e-3, params.x0 / 100.0)


def _window(window) -> tuple[float, float]:
    if np.ndim(window) == 0:
        w = abs(float(window))
        return -w, w
    lo, hi = (float(v) for v in window)
    if not lo < hi:
        raise DomainError(f"window must satisfy lo < hi, got {window!r}")
    return lo, hi


@dataclass(frozen=True)
class NodeReport:
    """Nodes of u(., t) inside ``window``.

    ``nodes`` are sorted and mirror-symmetric; ``degenerate`` lists grid
    positions (x > 0) of near-zero extrema without a sign change.
    """

    t: float
    params: PhysicalParams
    representation: Representation
    window: tuple[float, float]
    grid_points: int
    nodes: tuple[float, ...]
    min_point: tuple[float, float]
    x_floor: float
    xtol: float
    scale: float
    degenerate: tuple[float, ...] = ()
    warnings: tuple[str, ...] = ()

    @property
    def count(self) -> int:
        return len(self.nodes)

    def as_dict(self) -> dict:
        return {
            "t": self.t,
            "params": {"mu": self.params.mu, "kappa": self.params.kappa, "x0": self.params.x0},
            "representation": self.representation.tag,
            "window": list(self.window),
            "grid_points": self.grid_points,
            "x_floor": self.x_floor,
            "xtol": self.xtol,
            "nodes": list(self.nodes),
            "count": self.count,
            "min_point": {"x": self.min_point[0], "u": self.min_point[1]},
            "scale": self.scale,
            "degenerate": list(self.degenerate),
            "warnings": list(self.warnings),
        }


class _Profile:
    """u(., t) restricted to x > 0 with the grid evaluator of one representation."""

    def __init__(self, t, params, rep, series, quad):
        if not t > 0.0:
            raise DomainError(f"node scans need t > 0, got {t!r}")
        self.t, self.params, self.rep = t, params, rep
        self.series, self.quad = series, quad

    def grid(self, x):
        return evaluate_grid(self.rep, x, self.t, self.params, self.series, self.quad)

    def __call__(self, x: float) -> float:
        return float(self.grid(np.array([x]))[0])


def _bisect(f, lo: float, hi: float, f_lo: float, xtol: float) -> float:
    while hi - lo > xtol:
        mid = 0.5 * (lo + hi)
        f_mid = f(mid)
        if f_mid == 0.0:
            return mid
        if (f_mid > 0.0) == (f_lo > 0.0):
            lo, f_lo = mid, f_mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def _refine_min(f, xs: np.ndarray, us: np.ndarray) -> tuple[float, float]:
    i = int(np.argmin(us))
    if 0 < i < xs.size - 1:
        res = minimize_scalar(f, bracket=(xs[i - 1], xs[i], xs[i + 1]), method="golden",
                              tol=1e-10)
        if res.fun <= us[i] and xs[i - 1] <= res.x <= xs[i + 1]:
            return float(res.x), float(res.fun)
    return float(xs[i]), float(us[i])


def _scan_half(profile: _Profile, x_floor: float, x_hi: float, n_grid: int, xtol: float):
    xs = np.linspace(x_floor, x_hi, n_grid)
    us = profile.grid(xs)
    scale = float(np.max(np.abs(us)))
    sgn = np.sign(us)
    roots: list[float] = []
    notes: list[str] = []
    change = np.flatnonzero(sgn[:-1] * sgn[1:] < 0)
    for i in np.flatnonzero(sgn == 0):
        roots.append(float(xs[i]))
    for i in change:
        roots.append(_bisect(profile, float(xs[i]), float(xs[i + 1]), float(us[i]), xtol))
    if change.size > 1 and np.any(np.diff(change) == 1):
        msg = (f"t={profile.t}: sign changes in adjacent grid cells; "
               f"the {n_grid}-point grid may miss node pairs")
        warnings.warn(msg, GridResolutionWarning, stacklevel=3)
        notes.append(msg)
    # near-zero extrema of |u| without a crossing
    au = np.abs(us)
    interior = np.arange(1, n_grid - 1)
    is_ext = (au[interior] <= au[interior - 1]) & (au[interior] <= au[interior + 1])
    no_cross = (sgn[interior - 1] == sgn[interior]) & (sgn[interior] == sgn[interior + 1])
    tiny = au[interior] < TANGENCY_LEVEL * scale
    degenerate = [float(xs[i]) for i in interior[is_ext & no_cross & tiny]]
    return xs, us, scale, sorted(roots), degenerate, notes


def scan_nodes(t: float, params: PhysicalParams, rep: RepLike = "auto", window=15.0,
               n_grid: int = DEFAULT_GRID, xtol: float = DEFAULT_XTOL, *,
               x_floor: float | None = None, series: SeriesControls | None = None,
               quad: QuadratureControls | None = None) -> NodeReport:
    """Locate the nodes of u(., t) in ``window`` (a number means ``(-w, w)``)."""
    if n_grid < 64:
        raise DomainError(f"n_grid must be at least 64, got {n_grid!r}")
    rep = resolve(rep, params)
    lo, hi = _window(window)
    x_floor = default_x_floor(params) if x_floor is None else float(x_floor)
    x_hi = max(abs(lo), abs(hi))
    if x_hi <= x_floor:
        raise DomainError("window lies inside the excluded origin ball")
    profile = _Profile(t, params, rep, series, quad)
    xs, us, scale, roots, degenerate, notes = _scan_half(profile, x_floor, x_hi, n_grid, xtol)
    nodes = sorted([-z for z in roots if lo <= -z] + [z for z in roots if z <= hi])
    min_point = _refine_min(profile, xs, us)
    return NodeReport(t=t, params=params, representation=rep, window=(lo, hi),
                      grid_points=n_grid, nodes=tuple(nodes), min_point=min_point,
                      x_floor=x_floor, xtol=xtol, scale=scale,
                      degenerate=tuple(degenerate), warnings=tuple(notes))


def min_u(t: float, params: PhysicalParams, rep: RepLike = "auto", window=15.0,
          n_grid: int = DEFAULT_GRID, *, x_floor: float | None = None,
          series: SeriesControls | None = None,
          quad: QuadratureControls | None = None) -> tuple[float, float]:
    """Global minimum ``(x_min, u_min)`` of u(., t) over ``x_floor < x <= x_hi``."""
    rep = resolve(rep, params)
    lo, hi = _window(window)
    x_floor = default_x_floor(params) if x_floor is None else float(x_floor)
    profile = _Profile(t, params, rep, series, quad)
    xs = np.linspace(x_floor, max(abs(lo), abs(hi)), n_grid)
    return _refine_min(profile, xs, profile.grid(xs))


def birth_time(params: PhysicalParams, rep: RepLike = "auto", window=15.0,
               t_bracket=(0.5, 2.0), tol: float = 1e-6, *, n_grid: int = DEFAULT_GRID,
               series: SeriesControls | None = None,
               quad: QuadratureControls | None = None) -> float:
    """Time at which the minimum of u first touches zero, by bisection on t."""
    t_lo, t_hi = (float(v) for v in t_bracket)
    if not 0.0 < t_lo < t_hi:
        raise DomainError(f"t_bracket must satisfy 0 < lo < hi, got {t_bracket!r}")

    def g(t):
        return min_u(t, params, rep, window, n_grid, series=series, quad=quad)[1]

    g_lo, g_hi = g(t_lo), g(t_hi)
    if (g_lo > 0.0) == (g_hi > 0.0) or g_lo == 0.0 or g_hi == 0.0:
        raise BracketError(f"u_min has the same sign at t={t_lo} ({g_lo:.3g}) and "
                           f"t={t_hi} ({g_hi:.3g})")
    return _bisect(g, t_lo, t_hi, g_lo, tol)


@dataclass(frozen=True)
class NodeCount:
    """Node count at one time: inside the window and on a wider scan."""

    t: float
    count: int
    raw_count: int
    raw_extent: float


def node_count_curve(params: PhysicalParams, rep: RepLike = "auto", t_list=(),
                     window=15.0, *, n_grid: int = DEFAULT_GRID, raw_extent: float = 4.0,
                     series: SeriesControls | None = None,
                     quad: QuadratureControls | None = None) -> list[NodeCount]:
    """Node counts per time.

    ``raw_count`` scans ``raw_extent`` times further out, so nodes that
    drift out of the window still show up there.
    """
    lo, hi = _window(window)
    x_hi = max(abs(lo), abs(hi))
    out = []
    for t in t_list:
        rep_w = scan_nodes(t, params, rep, (lo, hi), n_grid, series=series, quad=quad)
        wide = raw_extent * x_hi
        n_wide = int(math.ceil(n_grid * raw_extent))
        rep_r = scan_nodes(t, params, rep, wide, n_wide, series=series, quad=quad)
        out.append(NodeCount(float(t), rep_w.count, rep_r.count, wide))
    return out
