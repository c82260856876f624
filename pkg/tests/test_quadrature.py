import math

import numpy as np
import pytest
from scipy import integrate, special

from rieszwave.errors import ConvergenceError, DomainError
from rieszwave.quadrature import QuadratureControls, composite_rule, quadrature


def test_defaults():
    c = QuadratureControls()
    assert (c.abs_tol, c.rel_tol, c.max_subdivisions) == (1e-10, 1e-10, 2000)


@pytest.mark.parametrize("kw", [dict(abs_tol=0.0), dict(rel_tol=-1.0),
                                dict(abs_tol=math.inf), dict(max_subdivisions=9),
                                dict(max_subdivisions=10.5)])
def test_controls_reject(kw):
    with pytest.raises(DomainError):
        QuadratureControls(**kw)


def test_constant():
    val, err = quadrature(lambda x: np.ones_like(x), 0.0, 1.0)
    assert val == pytest.approx(1.0, abs=1e-15)
    assert err >= 0.0


def test_sine():
    val, err = quadrature(np.sin, 0.0, math.pi)
    assert abs(val - 2.0) <= max(err, 1e-14)


def test_fresnel_type_integral():
    # int_0^1 cos(40 (v^2 - 1)) dv in Fresnel form
    c = 40.0
    z = math.sqrt(2 * c / math.pi)
    S, C = special.fresnel(z)
    exact = math.sqrt(math.pi / (2 * c)) * (math.cos(c) * C + math.sin(c) * S)
    val, err = quadrature(lambda v: np.cos(c * (v * v - 1.0)), 0.0, 1.0)
    assert abs(val - exact) <= err + 1e-15
    assert abs(val - exact) < 1e-10


# corpus on which the error estimate must bound the true error
CORPUS = [
    (lambda x: np.exp(x), 0.0, 1.0, math.e - 1.0),
    (lambda x: np.sqrt(x), 0.0, 1.0, 2.0 / 3.0),
    (lambda x: 1.0 / (1.0 + 25.0 * x * x), -1.0, 1.0, 0.4 * math.atan(5.0)),
    (lambda x: np.cos(100.0 * x), 0.0, 1.0, math.sin(100.0) / 100.0),
    (lambda x: np.abs(x - 0.3), 0.0, 1.0, 0.5 * (0.09 + 0.49)),
    (lambda x: x ** 8, -2.0, 3.0, (3.0 ** 9 + 2.0 ** 9) / 9.0),
]


@pytest.mark.parametrize("f, a, b, exact", CORPUS)
def test_error_estimate_bounds_true_error(f, a, b, exact):
    val, err = quadrature(f, a, b, QuadratureControls(1e-12, 1e-12, 5000))
    assert abs(val - exact) <= err + 4 * np.finfo(float).eps * abs(exact)


def test_breakpoints_do_not_change_value():
    f = lambda x: np.cos(30.0 * x) * np.exp(-x)
    v1, _ = quadrature(f, 0.0, 5.0)
    v2, _ = quadrature(f, 0.0, 5.0, breakpoints=np.linspace(0, 5, 17))
    ref, _ = integrate.quad(lambda x: math.cos(30 * x) * math.exp(-x), 0, 5, limit=200)
    assert v1 == pytest.approx(ref, abs=1e-10)
    assert v2 == pytest.approx(ref, abs=1e-10)


def test_non_convergence():
    with pytest.raises(ConvergenceError):
        quadrature(lambda x: np.sin(1.0 / x), 1e-9, 1.0, QuadratureControls(1e-14, 1e-14, 10))


@pytest.mark.parametrize("a, b", [(1.0, 1.0), (1.0, 0.0), (0.0, math.inf)])
def test_bad_interval(a, b):
    with pytest.raises(DomainError):
        quadrature(np.sin, a, b)


def test_nonfinite_integrand():
    with pytest.raises(DomainError):
        quadrature(lambda x: np.where(x > 0.5, np.inf, 1.0), 0.0, 1.0)


def test_composite_rule_integrates_polynomials():
    x, w = composite_rule(np.array([0.0, 0.5, 2.0]), order=5)
    assert w.sum() == pytest.approx(2.0, rel=1e-15)
    assert np.dot(w, x ** 9) == pytest.approx(2.0 ** 10 / 10.0, rel=1e-14)


def test_scaled_controls():
    c = QuadratureControls(1e-10, 1e-9, 100).scaled(1e-3)
    assert c.abs_tol == pytest.approx(1e-7)
    assert c.rel_tol == 1e-9
    assert QuadratureControls().scaled(0.0) == QuadratureControls()
