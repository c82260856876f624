"""Series representations of the solution and its low-order approximants.

All evaluators share one convention: the position enters only through |x|
and x**2, time and the coefficient through kappa*t**2, and the pulse weight
``mu`` multiplies a dimensionless sum at the very end.  The alternating sums
are accumulated in log space by :mod:`rieszwave._series`, which switches to
extended precision when cancellation would otherwise eat the result (this
happens once ``xi = kappa t**2/|x|`` exceeds roughly 30).

Representations
---------------
``u_lambda``
    Sum over s of Gamma(2s+2)/Gamma(4s+3) * xi**(2s) * Lambda_s(q).
``u_doublesum``
    The same series before regrouping, summed diagonally in s = n + k.
``u_hseries``
    Outer sum over k of theta_k, each theta_k an infinite sum over odd l.
``u_delta``
    The x0 = 0 pulse, Lambda_s = (-1)**s.

The between-form identities are exact; only rounding separates them.
"""

from __future__ import annotations

import enum
import math
import warnings
from dataclasses import dataclass, replace
from itertools import count

import numpy as np
from scipy.special import gammaln

from . import specfun
from ._series import (NEG_INF, Accumulator, SignedSum, Term, Workspace, accumulate,
                      evaluate_adaptive)
from .errors import ConvergenceError, DomainError, ValidityWarning

_SQRT_PI = math.sqrt(math.pi)


class Representation(enum.Enum):
    """Closed set of evaluators; the value is the command-line tag."""

    HSeries = "hseries"
    DoubleSum = "doublesum"
    LambdaForm = "lambda"
    DeltaSeries = "delta"
    ApproxLeading = "approx0"
    ApproxNext = "approx1"
    SpectralOracle = "spectral"
    FresnelDelta = "fresnel"
    ConvolutionOracle = "convolution"

    @property
    def tag(self) -> str:
        return self.value

    @classmethod
    def from_tag(cls, tag: str) -> Representation:
        for rep in cls:
            if rep.value == tag or rep.name == tag:
                return rep
        raise DomainError(f"unknown representation {tag!r}; "
                          f"choose from {[r.value for r in cls]}")

    @property
    def is_series(self) -> bool:
        return self in _SERIES_REPS


_SERIES_REPS = frozenset({Representation.HSeries, Representation.DoubleSum,
                          Representation.LambdaForm, Representation.DeltaSeries,
                          Representation.ApproxLeading, Representation.ApproxNext})


def _require_finite(name: str, value: float) -> float:
    value = float(value)
    if not math.isfinite(value):
        raise DomainError(f"{name} must be finite, got {value!r}")
    return value


@dataclass(frozen=True)
class PhysicalParams:
    """Pulse weight ``mu``, coefficient ``kappa > 0`` and Gaussian width ``x0 >= 0``."""

    mu: float = 1.0
    kappa: float = 1.0
    x0: float = 1.0

    def __post_init__(self):
        object.__setattr__(self, "mu", _require_finite("mu", self.mu))
        object.__setattr__(self, "kappa", _require_finite("kappa", self.kappa))
        object.__setattr__(self, "x0", _require_finite("x0", self.x0))
        if self.kappa <= 0.0:
            raise DomainError(f"kappa must be positive, got {self.kappa!r}")
        if self.x0 < 0.0:
            raise DomainError(f"x0 must be nonnegative, got {self.x0!r}")

    @property
    def is_delta(self) -> bool:
        return self.x0 == 0.0

    def with_(self, **changes) -> PhysicalParams:
        return replace(self, **changes)


@dataclass(frozen=True)
class EvalPoint:
    """Space-time point; ``x = 0`` is allowed here but rejected by the series."""

    x: float
    t: float

    def __post_init__(self):
        object.__setattr__(self, "x", _require_finite("x", self.x))
        object.__setattr__(self, "t", _require_finite("t", self.t))
        if self.t < 0.0:
            raise DomainError(f"t must be nonnegative, got {self.t!r}")


@dataclass(frozen=True)
class SeriesControls:
    """Truncation policy.

    ``term_tol`` is the relative tail cutoff, ``max_terms`` caps every
    infinite sum and ``k_max`` caps the outer sum of :func:`u_hseries`.
    """

    term_tol: float = 1e-15
    max_terms: int = 400
    k_max: int = 200

    def __post_init__(self):
        if not (self.term_tol > 0.0 and math.isfinite(self.term_tol)):
            raise DomainError(f"term_tol must be positive, got {self.term_tol!r}")
        if int(self.max_terms) != self.max_terms or self.max_terms < 8:
            raise DomainError(f"max_terms must be an integer >= 8, got {self.max_terms!r}")
        if int(self.k_max) != self.k_max or self.k_max < 1:
            raise DomainError(f"k_max must be an integer >= 1, got {self.k_max!r}")


DEFAULT_CONTROLS = SeriesControls()


# -- simple closed forms ------------------------------------------------------

def gaussian_ic(x: float, params: PhysicalParams) -> float:
    """Initial profile ``mu exp(-(x/x0)^2) / (x0 sqrt(pi))``."""
    if params.x0 <= 0.0:
        raise DomainError("the delta pulse (x0 = 0) has no pointwise initial value")
    return params.mu * math.exp(-(x / params.x0) ** 2) / (params.x0 * _SQRT_PI)


def gaussian_remnant(x: float, params: PhysicalParams) -> float:
    """Same as :func:`gaussian_ic` but 0 for the delta pulse."""
    if params.x0 == 0.0:
        return 0.0
    return gaussian_ic(x, params)


def scaled_argument(point: EvalPoint, params: PhysicalParams) -> float:
    """``xi = kappa t^2 / |x|``."""
    if point.x == 0.0:
        raise DomainError("xi is undefined at x = 0")
    return params.kappa * point.t * point.t / abs(point.x)


def _check_series_point(point: EvalPoint, what: str) -> bool:
    """Validate a series evaluation point; True means t = 0 (result is 0)."""
    if point.x == 0.0:
        raise DomainError(f"{what} is undefined at x = 0")
    if point.t == 0.0:
        warnings.warn(f"{what} at t = 0 returns 0, not the initial profile",
                      ValidityWarning, stacklevel=3)
        return True
    return False


def _sign_pow(n: int) -> int:
    return -1 if n & 1 else 1


# -- coefficients ----------------------------------------------------------------

def lambda_nk(n: int, k: int) -> float:
    """``Gamma(1+s) / (Gamma(3+4s) Gamma(-1/2-s))`` with ``s = n + k``."""
    n, k = _nonneg_int("n", n), _nonneg_int("k", k)
    s = n + k
    rg = specfun.log_recip_gamma(-0.5 - s)
    return specfun.SignedLogValue(
        specfun.log_gamma(1 + s) - specfun.log_gamma(3 + 4 * s) + rg.log_magnitude,
        rg.sign).to_float()


def _nonneg_int(name: str, v) -> int:
    if isinstance(v, bool) or int(v) != v or v < 0:
        raise DomainError(f"{name} must be a nonnegative integer, got {v!r}")
    return int(v)


def _lam_partial_terms(ws: Workspace, s: int, lq2):
    """Terms of Lambda_s(q) = sum_k (-1)^(s-k) q^(2k)/k!."""
    for k in range(s + 1):
        g = ws.lgamma(k + 1)
        p = k * lq2
        yield ws.term(p - g, _sign_pow(s - k), abs(float(p)) + abs(float(g)) + 2 * k)


def big_lambda(s: int, q: float) -> float:
    """The polynomial ``Lambda_s(q) = sum_{k<=s} (-1)^(s-k) q^(2k) / k!``."""
    s = _nonneg_int("s", s)
    q = _require_finite("q", q)
    if q < 0.0:
        raise DomainError(f"q must be nonnegative, got {q!r}")
    if q == 0.0:
        return float(_sign_pow(s))

    def build(ws):
        return accumulate(ws, _lam_partial_terms(ws, s, 2 * ws.log(ws.num(q))))

    return evaluate_adaptive(build).value


# -- delta profile ---------------------------------------------------------------

def _delta_profile_sum(ws: Workspace, xi, controls: SeriesControls) -> SignedSum:
    if xi == 0:
        return SignedSum(ws.log(ws.num(0.5)), 1, NEG_INF)
    lxi = ws.log(xi)

    def terms():
        for s in count():
            a = ws.lgamma(2 * s + 2)
            b = ws.lgamma(4 * s + 3)
            p = 2 * s * lxi
            yield ws.term(a - b + p, _sign_pow(s),
                          abs(float(a)) + abs(float(b)) + abs(float(p)) + 2 * s)

    return accumulate(ws, terms(), tol=ws.scaled_tol(controls.term_tol),
                      max_terms=controls.max_terms, what="delta profile series")


def u_delta_profile(xi: float, controls: SeriesControls | None = None) -> float:
    """``f(xi) = sum_s (-1)^s Gamma(2s+2)/Gamma(4s+3) xi^(2s)``."""
    controls = controls or DEFAULT_CONTROLS
    xi = _require_finite("xi", xi)
    if xi < 0.0:
        raise DomainError(f"xi must be nonnegative, got {xi!r}")
    return evaluate_adaptive(lambda ws: _delta_profile_sum(ws, ws.num(xi), controls)).value


def _shift(res: SignedSum, log_factor) -> SignedSum:
    """Multiply a sum by ``exp(log_factor)``."""
    if res.sign == 0:
        return SignedSum(NEG_INF, 0, res.log_error + float(log_factor))
    return SignedSum(res.log_magnitude + log_factor, res.sign,
                     res.log_error + float(log_factor))


def _inputs(ws: Workspace, point: EvalPoint, params: PhysicalParams):
    X = ws.num(abs(point.x))
    T = ws.num(point.t)
    T2 = ws.num(params.kappa) * T * T
    return X, T2, ws.num(params.x0)


def _log_pi(ws: Workspace):
    return math.log(math.pi) if ws.ctx is None else ws.ctx.log(ws.ctx.pi)


def u_delta(point: EvalPoint, params: PhysicalParams,
            controls: SeriesControls | None = None) -> float:
    """Delta-pulse solution ``(mu/pi)(kappa t^2/x^2) f(xi)``; ``params.x0`` is ignored."""
    controls = controls or DEFAULT_CONTROLS
    if _check_series_point(point, "u_delta"):
        return 0.0

    def build(ws):
        X, T2, _ = _inputs(ws, point, params)
        f = _delta_profile_sum(ws, T2 / X, controls)
        return _shift(f, ws.log(T2) - 2 * ws.log(X) - _log_pi(ws))

    return params.mu * evaluate_adaptive(build).value


# -- Lambda form ---------------------------------------------------------------------

def _lambda_sum(ws: Workspace, X, T2, x0, controls: SeriesControls) -> SignedSum:
    lxi = ws.log(T2) - ws.log(X)
    lq2 = 2 * (ws.log(x0) - ws.log(2 * T2))

    def terms():
        partial = Accumulator(ws)  # P_s = sum_{k<=s} (-1)^k q^(2k)/k!, Lambda_s = (-1)^s P_s
        for s in count():
            g = ws.lgamma(s + 1)
            p = s * lq2
            partial.add(*ws.term(p - g, _sign_pow(s), abs(float(p)) + abs(float(g)) + 2 * s))
            lam = partial.result()
            a = ws.lgamma(2 * s + 2)
            b = ws.lgamma(4 * s + 3)
            pw = 2 * s * lxi
            lc = a - b + pw
            comps = abs(float(a)) + abs(float(b)) + abs(float(pw)) + 2 * s
            if lam.sign == 0:
                yield Term(NEG_INF, 0, float(lc) + lam.log_error)
            else:
                yield ws.term(lc + lam.log_magnitude, lam.sign * _sign_pow(s), comps,
                              lam.log_error, lc)

    return accumulate(ws, terms(), tol=ws.scaled_tol(controls.term_tol),
                      max_terms=controls.max_terms, what="Lambda-form series")


def u_lambda(point: EvalPoint, params: PhysicalParams,
             controls: SeriesControls | None = None) -> float:
    """Lambda-form series ``(mu/pi)(kappa t^2/x^2) sum_s c_s xi^(2s) Lambda_s(q)``."""
    controls = controls or DEFAULT_CONTROLS
    if _check_series_point(point, "u_lambda"):
        return 0.0
    if params.x0 == 0.0:
        return u_delta(point, params, controls)

    def build(ws):
        X, T2, x0 = _inputs(ws, point, params)
        return _shift(_lambda_sum(ws, X, T2, x0, controls),
                      ws.log(T2) - 2 * ws.log(X) - _log_pi(ws))

    return params.mu * evaluate_adaptive(build).value


# -- diagonal double sum -------------------------------------------------------------

def _doublesum_sum(ws: Workspace, X, T2, x0, controls: SeriesControls) -> SignedSum:
    lr2 = 2 * (ws.log(x0) - ws.log(X))
    lw = ws.log(2 * T2) - ws.log(X)
    q2 = float(x0 / (2 * T2)) ** 2

    def terms():
        for s in count():
            ln = ws.lgamma(1 + s)
            ld = ws.lgamma(3 + 4 * s)
            lrg, sg = ws.log_rgamma(-0.5 - s)
            llam = ln - ld + lrg
            lam_comps = abs(float(ln)) + abs(float(ld)) + abs(float(lrg))
            inner = Accumulator(ws)
            for k in range(s + 1):
                g = ws.lgamma(k + 1)
                a = k * lr2
                b = (2 * (s - k) + 1) * lw
                mag = inner.add(*ws.term(a + b - g, -_sign_pow(k),
                                         abs(float(a)) + abs(float(b)) + abs(float(g))
                                         + 2 * s + 1))
                # past k ~ q^2 the terms fall geometrically; drop a negligible tail
                if k > 2.0 * q2 + 1.0 and mag < 1e-3 * ws.eps * inner.abs_total:
                    break
            res = inner.result()
            if res.sign == 0:
                yield Term(NEG_INF, 0, float(llam) + res.log_error)
            else:
                yield ws.term(llam + res.log_magnitude, sg * res.sign, lam_comps,
                              res.log_error, llam)

    return accumulate(ws, terms(), tol=ws.scaled_tol(controls.term_tol),
                      max_terms=controls.max_terms, what="double series")


def u_doublesum(point: EvalPoint, params: PhysicalParams,
                controls: SeriesControls | None = None) -> float:
    """Double series in (x0/x)^(2k) (2 kappa t^2/|x|)^(2n+1), summed by s = n + k."""
    controls = controls or DEFAULT_CONTROLS
    if _check_series_point(point, "u_doublesum"):
        return 0.0
    if params.x0 == 0.0:
        return u_delta(point, params, controls)

    def build(ws):
        X, T2, x0 = _inputs(ws, point, params)
        return _shift(_doublesum_sum(ws, X, T2, x0, controls),
                      -0.5 * _log_pi(ws) - ws.log(X))

    return params.mu * evaluate_adaptive(build).value


# -- H-series --------------------------------------------------------------------------

def _theta_sum(ws: Workspace, k: int, xi, controls: SeriesControls,
               as_printed: bool) -> SignedSum:
    """theta_k = 4^k/sqrt(pi) xi^(1+2k) sum_{l odd} (-1)^l C(2k+l) (2 xi)^l."""
    lxi = ws.log(xi)
    lz = lxi if as_printed else ws.log(2 * xi)

    def terms():
        for j in count():
            l = 2 * j + 1
            m = 2 * k + l
            a = ws.lgamma((1 + m) // 2)  # m is odd, so (1+m)/2 is an integer
            b = ws.lgamma(1 + 2 * m)
            lrg, sg = ws.log_rgamma(-m / 2)
            p = l * lz
            yield ws.term(a - b + lrg + p, -sg,
                          abs(float(a)) + abs(float(b)) + abs(float(lrg)) + abs(float(p)) + l)

    inner = accumulate(ws, terms(), tol=ws.scaled_tol(controls.term_tol),
                       max_terms=controls.max_terms, what=f"theta_{k} series")
    return _shift(inner, k * ws.log(ws.num(4)) - 0.5 * _log_pi(ws) + (1 + 2 * k) * lxi)


def theta_k_series(k: int, xi: float, controls: SeriesControls | None = None, *,
                   as_printed: bool = False) -> float:
    """The coefficient function theta_k(xi) of the H-series.

    ``as_printed=True`` expands in ``xi**l`` instead of ``(2 xi)**l``; that
    variant is wrong by a factor 2**l and only exists for comparison.
    """
    controls = controls or DEFAULT_CONTROLS
    k = _nonneg_int("k", k)
    xi = _require_finite("xi", xi)
    if xi <= 0.0:
        raise DomainError(f"xi must be positive, got {xi!r}")
    return evaluate_adaptive(
        lambda ws: _theta_sum(ws, k, ws.num(xi), controls, as_printed)).value


def _hseries_sum(ws: Workspace, X, T2, x0, controls: SeriesControls,
                 as_printed: bool) -> SignedSum:
    xi = T2 / X
    lq2 = 2 * (ws.log(x0) - ws.log(2 * T2)) if x0 != 0 else None

    def terms():
        for k in count():
            if k > 0 and lq2 is None:
                return  # q = 0: only theta_0 survives
            th = _theta_sum(ws, k, xi, controls, as_printed)
            g = ws.lgamma(k + 1)
            lc = (k * lq2 - g) if k else -g
            comps = abs(float(g)) + (abs(float(k * lq2)) + 2 * k if k else 0.0)
            if th.sign == 0:
                yield Term(NEG_INF, 0, float(lc) + th.log_error)
            else:
                yield ws.term(lc + th.log_magnitude, _sign_pow(k) * th.sign, comps,
                              th.log_error, lc)

    if lq2 is None:
        return accumulate(ws, terms())
    return accumulate(ws, terms(), tol=ws.scaled_tol(controls.term_tol),
                      max_terms=controls.k_max, what="H-series outer sum")


def u_hseries(point: EvalPoint, params: PhysicalParams,
              controls: SeriesControls | None = None, *, as_printed: bool = False) -> float:
    """H-series ``mu/(kappa t^2) sum_k (-1)^k/k! q^(2k) theta_k(xi)``."""
    controls = controls or DEFAULT_CONTROLS
    if _check_series_point(point, "u_hseries"):
        return 0.0
    if params.x0 == 0.0 and not as_printed:
        return u_delta(point, params, controls)

    def build(ws):
        X, T2, x0 = _inputs(ws, point, params)
        return _shift(_hseries_sum(ws, X, T2, x0, controls, as_printed), -ws.log(T2))

    return params.mu * evaluate_adaptive(build).value


# -- approximants -------------------------------------------------------------------------

def u_approx_leading(point: EvalPoint, params: PhysicalParams) -> float:
    """Leading algebraic tail ``mu kappa t^2 / (2 pi x^2)``."""
    if _check_series_point(point, "u_approx_leading"):
        return 0.0
    return params.mu * (params.kappa * (point.t / point.x) ** 2 / (2.0 * math.pi))


def u_approx_next(point: EvalPoint, params: PhysicalParams) -> float:
    """Partial sum s <= 1 of the Lambda form: bracket ``1/2 + xi^2 Lambda_1(q)/120``."""
    if _check_series_point(point, "u_approx_next"):
        return 0.0
    ax = abs(point.x)
    xi = params.kappa * point.t * point.t / ax
    xq = params.x0 / (2.0 * ax)  # xi * q
    bracket = 0.5 + (xq * xq - xi * xi) / 120.0
    pref = params.kappa * point.t * point.t / (math.pi * ax * ax)
    return params.mu * (pref * bracket)


# -- resummed Lambda form for grids --------------------------------------------------------

_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(24)


def _moment_integrals(c: float, k_count: int) -> np.ndarray:
    """``I_k = int_0^1 cos(c (1 - v^2)) v^(4k) dv`` for k < k_count.

    Composite Gauss-Legendre with panel edges where the phase crosses
    multiples of pi/2, so each panel holds at most a quarter period.
    """
    n_edges = int(c / (0.5 * math.pi))
    inner = 1.0 - np.arange(1, n_edges + 1) * (0.5 * math.pi) / c if c > 0 else np.empty(0)
    edges = np.concatenate(([0.0], np.sqrt(inner[::-1]), [1.0])) if n_edges else np.array([0.0, 1.0])
    # the square-root map crowds panels near v=1; split the first panel a few times
    edges = np.unique(np.concatenate((edges, np.linspace(0.0, edges[1], 5))))
    lo, hi = edges[:-1], edges[1:]
    half = 0.5 * (hi - lo)
    v = (lo + half)[:, None] + half[:, None] * _GL_NODES[None, :]
    w = half[:, None] * _GL_WEIGHTS[None, :]
    v = v.ravel()
    wc = (w.ravel()) * np.cos(c * (1.0 - v * v))
    v4 = v ** 4
    out = np.empty(k_count)
    powk = np.ones_like(v)
    for k in range(k_count):
        out[k] = wc @ powk
        powk = powk * v4
    return out


def u_lambda_grid(x_values, t: float, params: PhysicalParams) -> np.ndarray:
    """Lambda form on many points via its Fresnel-moment resummation.

    Regrouping by powers of q gives
    ``u = (mu/pi)(kappa t^2/x^2) sum_k (x0/(2|x|))^(2k)/k! F_k(xi)`` with
    ``F_k(xi) = sqrt(pi)/(2 16^k Gamma(2k+1/2)) int_0^1 cos((xi/4)(1-v^2)) v^(4k) dv``.
    The moments are bounded by 1, so unlike the power series nothing grows
    like exp(xi/4) and plain doubles suffice; it agrees with :func:`u_lambda`
    to about 1e-14 relative away from its zeros.
    """
    x = np.abs(np.asarray(x_values, dtype=float))
    if np.any(x == 0.0):
        raise DomainError("the Lambda form is undefined at x = 0")
    T2 = params.kappa * t * t
    out = np.empty_like(x)
    if T2 == 0.0:
        out[:] = 0.0
        return out
    for i, xa in enumerate(x.ravel()):
        xi = T2 / xa
        r2 = (params.x0 / (2.0 * xa)) ** 2
        k_count = _resummed_k_count(r2)
        mom = _moment_integrals(0.25 * xi, k_count)
        k = np.arange(k_count)
        # log of sqrt(pi)/2 * 16^-k / Gamma(2k+1/2) * r2^k / k!
        klr = k * math.log(r2) if r2 > 0 else np.zeros(k_count)
        logc = (0.5 * math.log(math.pi) - math.log(2.0) - k * math.log(16.0)
                - gammaln(2 * k + 0.5) - gammaln(k + 1.0) + klr)
        s = float(np.exp(logc) @ mom)
        out.flat[i] = T2 / (math.pi * xa * xa) * s
    return params.mu * out


def _resummed_k_count(r2: float) -> int:
    """Terms needed for ``sum_k r2^k / (16^k k! Gamma(2k+1/2))`` to reach 1e-17."""
    if r2 == 0.0:
        return 1
    a = r2 / 16.0
    logt, best, k = 0.0, 0.0, 0
    while True:
        k += 1
        logt += math.log(a) - math.log(k) - math.log((2 * k - 0.5) * (2 * k - 1.5))
        best = max(best, logt)
        if logt < best - 40.0 and k > 2:
            return k + 1
        if k > 5000:
            raise ConvergenceError("resummed Lambda form: too many moment terms")
