"""Log-space series accumulation with automatic precision escalation.

The solution series alternate with terms that grow like exp(xi/4) before
they decay, so in double precision the sum is destroyed by cancellation once
xi exceeds a few dozen.  Every series is therefore written once as a
generator of log-space terms over a :class:`Workspace`, first summed in
doubles, and re-summed in an mpmath context sized from the propagated error
estimate whenever the doubles cannot deliver the target accuracy.

Terms are triples ``(log_magnitude, sign, log_abs_error)``.  The first two
describe the term value; the third bounds (to first order) the absolute error
with which it was computed.  Errors are always hardware floats.
"""

from __future__ import annotations

import math
import sys
from typing import Callable, Iterable, NamedTuple

import mpmath

from . import specfun
from .errors import ConvergenceError

FLOAT_EPS = sys.float_info.epsilon
NEG_INF = -math.inf

#: Relative accuracy every adaptive evaluation aims for.
TARGET_REL_ERR = 1e-13
#: Hard cap on working precision (decimal digits); keeps eps a normal double.
MAX_DPS = 300

# rescale the running sum when a term exceeds the reference by e**_RESCALE
_RESCALE = 600.0


class Term(NamedTuple):
    log_magnitude: object
    sign: int
    log_error: float


class SignedSum(NamedTuple):
    """Value ``sign * exp(log_magnitude)`` with absolute error ``exp(log_error)``."""

    log_magnitude: object
    sign: int
    log_error: float

    def rel_error(self) -> float:
        if self.sign == 0:
            return 0.0 if self.log_error == NEG_INF else math.inf
        return math.exp(min(self.log_error - float(self.log_magnitude), 700.0))


def logaddexp(a: float, b: float) -> float:
    if a == NEG_INF:
        return b
    if b == NEG_INF:
        return a
    if a < b:
        a, b = b, a
    return a + math.log1p(math.exp(b - a))


def log_or_neginf(x: float) -> float:
    return math.log(x) if x > 0.0 else NEG_INF


class Workspace:
    """Arithmetic for a single evaluation.

    ``dps=None`` selects hardware doubles backed by :mod:`rieszwave.specfun`;
    an integer selects a private mpmath context with that many digits, so
    concurrent evaluations never share precision state.
    """

    def __init__(self, dps: int | None = None):
        self.dps = dps
        self._lgamma: dict = {}
        self._rgamma: dict = {}
        if dps is None:
            self.ctx = None
            self.eps = FLOAT_EPS
            self.num = float
            self.log = math.log
            self.exp = math.exp
        else:
            ctx = mpmath.MPContext()
            ctx.dps = dps
            self.ctx = ctx
            self.eps = float(ctx.eps)
            self.num = ctx.mpf
            self.log = ctx.log
            self.exp = ctx.exp

    @property
    def high_precision(self) -> bool:
        return self.ctx is not None

    def scaled_tol(self, term_tol: float) -> float:
        """Tail tolerance matched to the working precision."""
        return term_tol * (self.eps / FLOAT_EPS)

    def lgamma(self, x: float):
        """``log Gamma(x)`` for ``x > 0``; ``x`` is an exact integer or half-integer."""
        v = self._lgamma.get(x)
        if v is None:
            if self.ctx is None:
                v = specfun.log_gamma(x)
            else:
                v = self.ctx.loggamma(self.ctx.mpf(x))
            self._lgamma[x] = v
        return v

    def log_rgamma(self, x: float):
        """``1/Gamma(x)`` as ``(log|.|, sign)``; sign 0 at the poles."""
        v = self._rgamma.get(x)
        if v is None:
            if self.ctx is None:
                r = specfun.log_recip_gamma(x)
                v = (r.log_magnitude, r.sign)
            else:
                r = self.ctx.rgamma(self.ctx.mpf(x))
                v = (NEG_INF, 0) if r == 0 else (self.ctx.log(abs(r)), 1 if r > 0 else -1)
            self._rgamma[x] = v
        return v

    def to_float(self, value: SignedSum) -> float:
        if value.sign == 0:
            return 0.0
        try:
            return value.sign * float(self.exp(value.log_magnitude))
        except OverflowError:
            return math.copysign(math.inf, value.sign)

    def term(self, log_magnitude, sign: int, components: float,
             child_log_error: float = NEG_INF, child_log_scale=0.0) -> Term:
        """Build a term whose log magnitude was formed from parts whose
        magnitudes sum to ``components``.

        The log carries an absolute error of about ``eps * components``, i.e.
        a relative error of the same size in the term.  A term that multiplies
        an inexact inner sum adds that sum's error scaled by ``child_log_scale``.
        """
        if sign == 0:
            own = NEG_INF
        else:
            own = float(log_magnitude) + math.log(self.eps * (4.0 + components))
        err = own
        if child_log_error != NEG_INF:
            err = logaddexp(own, float(child_log_scale) + child_log_error)
        return Term(log_magnitude, sign, err)


class Accumulator:
    """Incremental log-space sum with Neumaier compensation in doubles.

    All running quantities are stored relative to ``exp(ref)``, the first
    nonzero term, and rescaled when a later term dwarfs it.
    """

    __slots__ = ("ws", "hp", "ref", "ref_f", "total", "comp", "abs_total",
                 "err_acc", "loose_err", "n")

    def __init__(self, ws: Workspace):
        self.ws = ws
        self.hp = ws.high_precision
        self.ref = None
        self.ref_f = 0.0
        self.total = ws.num(0)
        self.comp = 0.0
        self.abs_total = 0.0
        self.err_acc = 0.0
        self.loose_err = NEG_INF  # errors of zero terms seen before any nonzero term
        self.n = 0

    def add(self, log_mag, sign: int, log_err: float) -> float:
        """Add one term; returns its magnitude relative to the reference."""
        self.n += 1
        mag = 0.0
        if sign != 0:
            if self.ref is None:
                self.ref = log_mag
                self.ref_f = float(log_mag)
            d = log_mag - self.ref
            if d > _RESCALE:
                scale = self.ws.exp(-d)
                fs = float(scale)
                self.total *= scale
                self.comp *= fs
                self.abs_total *= fs
                self.err_acc *= fs
                self.ref = log_mag
                self.ref_f = float(log_mag)
                d = log_mag - self.ref
            v = self.ws.exp(d)
            sv = v if sign > 0 else -v
            if self.hp:
                self.total += sv
            else:
                total = self.total
                s_new = total + sv
                if abs(total) >= abs(sv):
                    self.comp += (total - s_new) + sv
                else:
                    self.comp += (sv - s_new) + total
                self.total = s_new
            mag = float(v)
            self.abs_total += mag
        if log_err != NEG_INF:
            if self.ref is None:
                self.loose_err = logaddexp(self.loose_err, log_err)
            else:
                self.err_acc += math.exp(min(log_err - self.ref_f, 700.0))
        return mag

    def partial(self) -> float:
        """Magnitude of the running sum relative to the reference."""
        return abs(float(self.total) + self.comp)

    def result(self, tail_tol: float | None = None) -> SignedSum:
        ws = self.ws
        if self.ref is None:
            return SignedSum(NEG_INF, 0, self.loose_err)
        total = self.total if self.hp else self.total + self.comp
        err = self.err_acc
        if self.loose_err != NEG_INF:
            err += math.exp(min(self.loose_err - self.ref_f, 700.0))
        if self.hp:
            err += self.n * ws.eps * self.abs_total
        else:
            err += 2.0 * ws.eps * abs(total) + self.n * ws.eps * ws.eps * self.abs_total
        if tail_tol is not None:
            err += tail_tol * abs(float(total))
        log_err = self.ref_f + log_or_neginf(err)
        if total == 0:
            return SignedSum(NEG_INF, 0, log_err)
        return SignedSum(self.ref + ws.log(abs(total)), 1 if total > 0 else -1, log_err)


def accumulate(ws: Workspace, terms: Iterable[Term], *, tol: float | None = None,
               max_terms: int | None = None, what: str = "series") -> SignedSum:
    """Sum log-space terms.

    With ``tol`` set, summation stops once two consecutive terms are at most
    ``tol`` times the running partial sum; the generator may then be infinite
    and ``max_terms`` caps it.  Without ``tol`` the generator must be finite.
    """
    acc = Accumulator(ws)
    if tol is None:
        for log_mag, sign, log_err in terms:
            acc.add(log_mag, sign, log_err)
        return acc.result()
    small_run = 0
    for log_mag, sign, log_err in terms:
        mag = acc.add(log_mag, sign, log_err)
        partial = acc.partial()
        if partial > 0.0 and mag <= tol * partial:
            small_run += 1
            if small_run >= 2:
                return acc.result(tol)
        else:
            small_run = 0
        if max_terms is not None and acc.n >= max_terms:
            break
    raise ConvergenceError(f"{what}: no convergence within {acc.n} terms")


class AdaptiveResult(NamedTuple):
    value: float
    rel_error: float
    dps: int | None


def evaluate_adaptive(build: Callable[[Workspace], SignedSum], *,
                      target: float = TARGET_REL_ERR) -> AdaptiveResult:
    """Run ``build`` in doubles, escalating precision until the propagated
    relative error is below ``target`` (or :data:`MAX_DPS` is reached)."""
    ws = Workspace()
    res = build(ws)
    rel = res.rel_error()
    if rel <= target:
        return AdaptiveResult(ws.to_float(res), rel, None)
    dps = 16 + _extra_digits(rel, target) + 6
    while True:
        dps = min(dps, MAX_DPS)
        ws = Workspace(dps)
        res = build(ws)
        rel = res.rel_error()
        if res.sign == 0:
            # exact cancellation that survives extended precision: a true zero
            return AdaptiveResult(0.0, rel, dps)
        if rel <= target or dps >= MAX_DPS:
            return AdaptiveResult(ws.to_float(res), rel, dps)
        dps = max(dps + 16, dps + _extra_digits(rel, target) + 6)


def _extra_digits(rel: float, target: float) -> int:
    if not math.isfinite(rel):
        return 40
    return max(1, math.ceil(math.log10(rel / target)))
