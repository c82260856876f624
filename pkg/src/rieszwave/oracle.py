"""Independent reference evaluators built from the Fourier symbol.

Transforming the equation in x turns it into ``u_tt = -kappa |omega| u``,
so for the Gaussian pulse

    u(x, t) = (mu/pi) int_0^inf exp(-(x0 w)^2/4) cos(t sqrt(kappa w)) cos(w x) dw,

which :func:`spectral_u` integrates after the substitution ``w = p^2`` (that
removes the square-root cusp at the origin).  The delta pulse reduces, after
Abel regularization of the same integral, to

    u(x, t) = mu kappa t^2 / (2 pi x^2) * G(kappa t^2 / (4 |x|)),
    G(c) = int_0^1 cos(c (v^2 - 1)) dv,

evaluated either by quadrature or through Fresnel integrals.  Convolving that
with the Gaussian gives a second route to the Gaussian-pulse solution,
:func:`convolution_u`.

Tolerances in :class:`QuadratureControls` always refer to the returned u.
"""

from __future__ import annotations

import math

import numpy as np
from scipy import special

from .analytic import EvalPoint, PhysicalParams, gaussian_ic
from .errors import DomainError
from .quadrature import (DEFAULT_QUADRATURE, QuadratureControls, composite_rule,
                         quadrature)

__all__ = ["QuadratureControls", "quadrature", "spectral_u", "spectral_u_with_error",
           "spectral_u_grid", "profile_G", "profile_G_with_error", "profile_G_fresnel",
           "fresnel_delta_u", "fresnel_delta_u_grid", "convolution_u",
           "convolution_u_with_error"]

_SQRT_PI = math.sqrt(math.pi)


# -- spectral integral ---------------------------------------------------------

def _spectral_setup(params: PhysicalParams, t: float, abs_tol: float):
    if params.x0 <= 0.0:
        raise DomainError("the spectral integral needs x0 > 0 (no damping for the delta pulse)")
    scale = abs(params.mu) / math.pi
    # envelope exp(-(x0 w)^2/4) < abs_tol/10, with abs_tol relative to u
    tol_env = abs_tol / max(scale, 1e-300) / 10.0
    w_max = (2.0 / params.x0) * math.sqrt(max(math.log(1.0 / tol_env), 1.0))
    a = t * math.sqrt(params.kappa)
    trunc = abs(params.mu) * math.exp(-(params.x0 * w_max) ** 2 / 4.0) * (2.0 / math.pi) * w_max
    return a, math.sqrt(w_max), trunc


def _phase_breaks(X: float, a: float, p_max: float, min_panels: int = 8) -> np.ndarray:
    """Points where ``X p^2 + a p`` crosses multiples of pi on (0, p_max)."""
    total = X * p_max * p_max + a * p_max
    j = np.arange(1, int(total / math.pi) + 1, dtype=float)
    if X > 0.0:
        p = (-a + np.sqrt(a * a + 4.0 * X * j * math.pi)) / (2.0 * X)
    elif a > 0.0:
        p = j * math.pi / a
    else:
        p = np.empty(0)
    return np.unique(np.concatenate((p, np.linspace(0.0, p_max, min_panels + 1))))


def spectral_u_with_error(point: EvalPoint, params: PhysicalParams,
                          controls: QuadratureControls | None = None) -> tuple[float, float]:
    """:func:`spectral_u` plus its error estimate (quadrature + truncation)."""
    controls = controls or DEFAULT_QUADRATURE
    a, p_max, trunc = _spectral_setup(params, point.t, controls.abs_tol)
    X = abs(point.x)
    c = params.mu / math.pi
    q = 0.25 * params.x0 * params.x0

    def f(p):
        p2 = p * p
        return (2.0 * c) * p * np.exp(-q * p2 * p2) * np.cos(a * p) * np.cos(X * p2)

    val, err = quadrature(f, 0.0, p_max, controls, breakpoints=_phase_breaks(X, a, p_max))
    return val, err + trunc


def spectral_u(point: EvalPoint, params: PhysicalParams,
               controls: QuadratureControls | None = None) -> float:
    """Gaussian-pulse solution from its Fourier integral; accepts x = 0 and t = 0."""
    return spectral_u_with_error(point, params, controls)[0]


def spectral_u_grid(x_values, t: float, params: PhysicalParams,
                    controls: QuadratureControls | None = None, *, order: int = 20,
                    chunk: int = 256) -> np.ndarray:
    """Fixed composite-rule version of :func:`spectral_u` for many x at once.

    Panels are cut for the largest |x| so every row is resolved; with
    20 nodes per half oscillation the rule error is far below 1e-12.
    """
    controls = controls or DEFAULT_QUADRATURE
    x = np.abs(np.asarray(x_values, dtype=float))
    a, p_max, _ = _spectral_setup(params, t, controls.abs_tol)
    X = float(x.max()) if x.size else 0.0
    p, w = composite_rule(_phase_breaks(X, a, p_max), order)
    p2 = p * p
    wf = w * (2.0 * params.mu / math.pi) * p * np.exp(-0.25 * params.x0 ** 2 * p2 * p2) \
        * np.cos(a * p)
    flat = x.ravel()
    out = np.empty_like(flat)
    for i in range(0, flat.size, chunk):
        out[i:i + chunk] = np.cos(np.outer(flat[i:i + chunk], p2)) @ wf
    return out.reshape(x.shape)


# -- delta pulse: the profile G ---------------------------------------------------

def _g_breaks(c: float) -> np.ndarray:
    if c <= math.pi:
        return np.empty(0)
    j = np.arange(1, int(c / math.pi) + 1, dtype=float)
    return np.sqrt(np.clip(1.0 - j * math.pi / c, 0.0, 1.0))


def profile_G_with_error(c: float, controls: QuadratureControls | None = None
                         ) -> tuple[float, float]:
    controls = controls or DEFAULT_QUADRATURE
    c = float(c)
    if not (c >= 0.0 and math.isfinite(c)):
        raise DomainError(f"c must be finite and nonnegative, got {c!r}")
    if c == 0.0:
        return 1.0, 0.0
    return quadrature(lambda v: np.cos(c * (v * v - 1.0)), 0.0, 1.0, controls,
                      breakpoints=_g_breaks(c))


def profile_G(c: float, controls: QuadratureControls | None = None) -> float:
    """``G(c) = int_0^1 cos(c (v^2 - 1)) dv`` by adaptive quadrature."""
    return profile_G_with_error(c, controls)[0]


def profile_G_fresnel(c):
    """``G(c)`` through Fresnel integrals; vectorized.

    ``G(c) = sqrt(pi/(2c)) [cos(c) C(z) + sin(c) S(z)]`` with ``z = sqrt(2c/pi)``.
    """
    c_arr = np.asarray(c, dtype=float)
    if np.any(c_arr < 0.0):
        raise DomainError("G is only used for c >= 0")
    small = c_arr < 1e-4
    cs = np.where(small, 1.0, c_arr)
    S, C = special.fresnel(np.sqrt(2.0 * cs / math.pi))
    big = np.sqrt(math.pi / (2.0 * cs)) * (np.cos(cs) * C + np.sin(cs) * S)
    # Taylor series for tiny c, where the Fresnel form loses digits
    out = np.where(small, _g_series(c_arr), big)
    return out if out.ndim else float(out)


def _g_series(c: np.ndarray) -> np.ndarray:
    """Maclaurin series of G to order c^4 (exact to rounding for c < 1e-4)."""
    # cos(c w) with w = 1 - v^2, termwise; int_0^1 w^m dv = 4^m (m!)^2 / (2m+1)!
    out = np.zeros_like(c)
    fact = 1.0
    for m in range(0, 6):
        if m:
            fact *= m
        moment = 4.0 ** m * math.factorial(m) ** 2 / math.factorial(2 * m + 1)
        if m % 2 == 0:
            out = out + (-1) ** (m // 2) * c ** m / fact * moment
    return out


def _delta_prefactor(point: EvalPoint, params: PhysicalParams) -> tuple[float, float]:
    if point.x == 0.0:
        raise DomainError("the delta-pulse closed form is singular at x = 0")
    T2 = params.kappa * point.t * point.t
    ax = abs(point.x)
    return T2 / (2.0 * math.pi * ax * ax), 0.25 * T2 / ax


def fresnel_delta_u(point: EvalPoint, params: PhysicalParams,
                    controls: QuadratureControls | None = None, *,
                    method: str = "quadrature") -> float:
    """Delta-pulse solution in closed form; ``params.x0`` is ignored.

    ``method="quadrature"`` integrates G with :func:`profile_G`,
    ``method="fresnel"`` uses :func:`profile_G_fresnel`.
    """
    controls = controls or DEFAULT_QUADRATURE
    pref, c = _delta_prefactor(point, params)
    if method == "quadrature":
        G = profile_G(c, controls.scaled(abs(params.mu) * pref))
    elif method == "fresnel":
        G = profile_G_fresnel(c)
    else:
        raise DomainError(f"unknown method {method!r}")
    return params.mu * (pref * G)


def fresnel_delta_u_grid(x_values, t: float, params: PhysicalParams) -> np.ndarray:
    x = np.abs(np.asarray(x_values, dtype=float))
    if np.any(x == 0.0):
        raise DomainError("the delta-pulse closed form is singular at x = 0")
    T2 = params.kappa * t * t
    return params.mu * (T2 / (2.0 * math.pi * x * x) * profile_G_fresnel(0.25 * T2 / x))


# -- convolution of the delta solution with the Gaussian ------------------------------

#: Upper bound on the oscillation count in the near-core tail integral.
MAX_CORE_PANELS = 50_000


def _core_radius(params: PhysicalParams, A: float, kt2: float, target: float) -> float:
    """Largest ``eta <= x0/4`` whose fourth-order Taylor remainder is below ``target``.

    The neglected part of the core integral is at most
    ``max|g''''|/12 * kt2/(2 pi) * eta^3/3 * min(1, sqrt(pi eta / A))``.
    """
    x0 = params.x0
    c4 = abs(params.mu) / (x0 ** 5 * _SQRT_PI) * kt2 / (2.0 * math.pi)
    if c4 == 0.0:
        return x0 / 4.0
    eta = (3.0 * target / c4) ** (1.0 / 3.0)
    if math.pi * eta / A < 1.0:
        eta = (3.0 * target / (c4 * math.sqrt(math.pi / A))) ** (1.0 / 3.5)
    eta = min(eta, x0 / 4.0)
    return max(eta, A / (math.pi * MAX_CORE_PANELS))


def _core_error(params: PhysicalParams, A: float, kt2: float, eta: float) -> float:
    c4 = abs(params.mu) / (params.x0 ** 5 * _SQRT_PI) * kt2 / (2.0 * math.pi)
    return c4 * eta ** 3 / 3.0 * min(1.0, math.sqrt(math.pi * eta / A))


def convolution_u_with_error(point: EvalPoint, params: PhysicalParams,
                             controls: QuadratureControls | None = None
                             ) -> tuple[float, float]:
    """Gaussian-pulse solution as the Gaussian smoothing of the delta solution.

    With ``B(y) = g(x-y) + g(x+y) - 2 g(x)`` and unit mass of the delta
    solution ``d``, ``u(x) = g(x) + int_0^inf B(y) d(y) dy``.  The integral is
    split at ``eta`` (see :func:`_core_radius`) and at ``Y = |x| + 10 x0``:

    * ``[0, eta]``: ``B ~ g''(x) y^2``, and ``int_0^eta y^2 d(y) dy`` has a
      closed inner form in terms of the sine integral, integrated over v;
    * ``[eta, Y]``: adaptive quadrature with the Fresnel form of ``d``;
    * ``[Y, inf)``: ``B = -2 g(x)`` up to exp(-100), and the tail mass of
      ``d`` is ``(2/pi) int_0^1 sin(C w)/w dv`` with ``C = A/Y``.
    """
    controls = controls or DEFAULT_QUADRATURE
    if params.x0 <= 0.0:
        raise DomainError("convolution needs a Gaussian width x0 > 0")
    x = abs(point.x)
    gx = gaussian_ic(x, params)
    kt2 = params.kappa * point.t * point.t
    if kt2 == 0.0:
        return gx, 0.0
    x0, mu = params.x0, params.mu
    A = 0.25 * kt2
    norm = mu / (x0 * _SQRT_PI)
    z = x / x0
    g2 = mu * (4.0 * z * z - 2.0) * math.exp(-z * z) / (x0 ** 3 * _SQRT_PI)
    part_tol = controls.abs_tol / 4.0

    eta = _core_radius(params, A, kt2, 0.1 * controls.abs_tol)
    e4 = _core_error(params, A, kt2, eta)

    # core: int_0^eta y^2 d(y) dy = kt2/(2 pi) int_0^1 [eta cos(b/eta) - b (pi/2 - Si(b/eta))] dv
    def core_integrand(v):
        b = A * (1.0 - v * v)
        si, _ = special.sici(b / eta)
        return eta * np.cos(b / eta) - b * (0.5 * math.pi - si)

    core_scale = abs(g2) * kt2 / (2.0 * math.pi)
    core_val, core_err = quadrature(core_integrand, 0.0, 1.0, controls.scaled(core_scale * 4.0),
                                    breakpoints=_g_breaks(A / eta))
    core = g2 * kt2 / (2.0 * math.pi) * core_val

    # tail: int_eta^Y B(y) d(y) dy
    Y = x + 10.0 * x0

    def tail_integrand(y):
        dm = (y - x) / x0
        dp = (y + x) / x0
        B = norm * (np.exp(-dm * dm) + np.exp(-dp * dp)) - 2.0 * gx
        d = kt2 / (2.0 * math.pi * y * y) * profile_G_fresnel(A / y)
        return B * d

    j = np.arange(1, int(A / (math.pi * eta)) + 1, dtype=float)
    breaks = np.concatenate((A / (j * math.pi), np.arange(eta, Y, 0.5 * x0)))
    n_panels = breaks.size + 1
    tail_controls = QuadratureControls(part_tol, controls.rel_tol,
                                       max(controls.max_subdivisions, 4 * n_panels))
    tail_val, tail_err = quadrature(tail_integrand, eta, Y, tail_controls, breakpoints=breaks)

    # far tail: -2 g(x) * (2/pi) int_0^1 sin(C w)/w dv
    C = A / Y

    def far_integrand(v):
        w = 1.0 - v * v
        return C * np.sinc(C * w / math.pi)

    far_val, far_err = quadrature(far_integrand, 0.0, 1.0,
                                  controls.scaled(max(4.0 * gx * 2.0 / math.pi, 1e-300)),
                                  breakpoints=_g_breaks(C))
    far = -2.0 * gx * (2.0 / math.pi) * far_val

    value = gx + core + tail_val + far
    err = (e4 + core_scale * core_err + tail_err
           + 2.0 * gx * (2.0 / math.pi) * far_err + abs(mu) * 1e-40)
    return value, err


def convolution_u(point: EvalPoint, params: PhysicalParams,
                  controls: QuadratureControls | None = None) -> float:
    """Gaussian-pulse solution by convolution; see :func:`convolution_u_with_error`."""
    return convolution_u_with_error(point, params, controls)[0]
