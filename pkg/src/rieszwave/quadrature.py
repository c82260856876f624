"""Vectorized adaptive Gauss-Legendre quadrature.

Each panel is integrated with a 10-point and a 21-point Gauss-Legendre rule;
the 21-point value is kept and the difference bounds its error (it really
bounds the 10-point error, so the estimate is conservative).  All panels of
a refinement round are evaluated in a single integrand call, so ``f`` must
accept and return numpy arrays.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .errors import ConvergenceError, DomainError

_X10, _W10 = np.polynomial.legendre.leggauss(10)
_X21, _W21 = np.polynomial.legendre.leggauss(21)
_EPS = np.finfo(float).eps


@dataclass(frozen=True)
class QuadratureControls:
    abs_tol: float = 1e-10
    rel_tol: float = 1e-10
    max_subdivisions: int = 2000

    def __post_init__(self):
        for name in ("abs_tol", "rel_tol"):
            v = getattr(self, name)
            if not (v > 0.0 and math.isfinite(v)):
                raise DomainError(f"{name} must be positive, got {v!r}")
        if int(self.max_subdivisions) != self.max_subdivisions or self.max_subdivisions < 10:
            raise DomainError("max_subdivisions must be an integer >= 10, "
                              f"got {self.max_subdivisions!r}")

    def scaled(self, factor: float) -> QuadratureControls:
        """Controls for an integral that is later multiplied by ``factor``."""
        if factor <= 0.0 or not math.isfinite(factor):
            return self
        return QuadratureControls(self.abs_tol / factor, self.rel_tol, self.max_subdivisions)


DEFAULT_QUADRATURE = QuadratureControls()


def _panel_rules(lo: np.ndarray, hi: np.ndarray, f: Callable):
    half = 0.5 * (hi - lo)
    mid = lo + half
    n = lo.size
    pts = np.concatenate((mid[:, None] + half[:, None] * _X10[None, :],
                          mid[:, None] + half[:, None] * _X21[None, :]), axis=1)
    vals = np.asarray(f(pts.ravel()), dtype=float).reshape(n, 31)
    if not np.all(np.isfinite(vals)):
        raise DomainError("integrand returned a non-finite value")
    q10 = half * (vals[:, :10] @ _W10)
    q21 = half * (vals[:, 10:] @ _W21)
    mag = np.abs(half) * (np.abs(vals[:, 10:]) @ _W21)
    err = np.abs(q21 - q10) + 50.0 * _EPS * mag
    return q21, err


def quadrature(f: Callable[[np.ndarray], np.ndarray], a: float, b: float,
               controls: QuadratureControls | None = None, *,
               breakpoints: Sequence[float] = ()) -> tuple[float, float]:
    """Integrate ``f`` over ``[a, b]``; returns ``(value, error_estimate)``.

    ``breakpoints`` seed the initial panels (oscillation nodes, kinks) and do
    not count as subdivisions.  A panel is accepted once its error is below
    its share ``tol * width / (b - a)`` of the global tolerance.
    """
    controls = controls or DEFAULT_QUADRATURE
    a, b = float(a), float(b)
    if not (math.isfinite(a) and math.isfinite(b)) or not a < b:
        raise DomainError(f"need finite a < b, got ({a!r}, {b!r})")
    bp = np.asarray(breakpoints, dtype=float).ravel()
    edges = np.unique(np.concatenate(([a], bp[(bp > a) & (bp < b)], [b])))
    lo, hi = edges[:-1], edges[1:]
    length = b - a

    done_val: list[np.ndarray] = []
    done_err: list[np.ndarray] = []
    splits = 0
    while True:
        q, e = _panel_rules(lo, hi, f)
        total = math.fsum(np.concatenate(done_val + [q]))
        err_total = math.fsum(np.concatenate(done_err + [e]))
        tol = max(controls.abs_tol, controls.rel_tol * abs(total))
        if err_total <= tol:
            return total, err_total
        ok = e <= tol * (hi - lo) / length
        done_val.append(q[ok])
        done_err.append(e[ok])
        lo, hi = lo[~ok], hi[~ok]
        splits += lo.size
        if splits > controls.max_subdivisions:
            raise ConvergenceError(f"quadrature on [{a}, {b}]: {splits} subdivisions "
                                   f"without reaching tolerance {tol:.3g} "
                                   f"(estimate {err_total:.3g})")
        mid = 0.5 * (lo + hi)
        lo, hi = np.concatenate((lo, mid)), np.concatenate((mid, hi))


def composite_rule(edges: np.ndarray, order: int = 20) -> tuple[np.ndarray, np.ndarray]:
    """Nodes and weights of composite Gauss-Legendre on the panels ``edges``."""
    x, w = np.polynomial.legendre.leggauss(order)
    edges = np.asarray(edges, dtype=float)
    lo, hi = edges[:-1], edges[1:]
    half = 0.5 * (hi - lo)
    nodes = (lo + half)[:, None] + half[:, None] * x[None, :]
    weights = half[:, None] * w[None, :]
    return nodes.ravel(), weights.ravel()
