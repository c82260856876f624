"""Gamma-family helpers with pole-safe reciprocals and signed log values.

Every series coefficient in :mod:`rieszwave.analytic` is a ratio of Gamma
functions, many with negative half-integer or integer arguments.  The helpers
here keep those ratios in log space so that high truncation orders neither
overflow nor underflow, and return an exact zero at the poles of Gamma.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import DomainError

#: Absolute distance to a nonpositive integer below which Gamma is treated as
#: having a pole.  Series arguments are exact integers or half-integers, so
#: this only absorbs float noise.
POLE_TOL = 1e-12

_LOG_PI = math.log(math.pi)


@dataclass(frozen=True)
class SignedLogValue:
    """A real number stored as ``sign * exp(log_magnitude)``.

    ``sign == 0`` represents an exact zero; ``log_magnitude`` is then ``-inf``
    by convention and otherwise ignored.
    """

    log_magnitude: float
    sign: int

    def __post_init__(self):
        if self.sign not in (-1, 0, 1):
            raise ValueError(f"sign must be -1, 0 or +1, got {self.sign!r}")

    @classmethod
    def zero(cls) -> SignedLogValue:
        return cls(-math.inf, 0)

    @classmethod
    def from_float(cls, value: float) -> SignedLogValue:
        if value == 0.0:
            return cls.zero()
        return cls(math.log(abs(value)), 1 if value > 0 else -1)

    def to_float(self) -> float:
        """Compose into a plain float; overflows to a signed infinity."""
        if self.sign == 0:
            return 0.0
        try:
            return self.sign * math.exp(self.log_magnitude)
        except OverflowError:
            return math.copysign(math.inf, self.sign)

    __float__ = to_float

    def __mul__(self, other: SignedLogValue) -> SignedLogValue:
        if self.sign == 0 or other.sign == 0:
            return SignedLogValue.zero()
        return SignedLogValue(self.log_magnitude + other.log_magnitude,
                              self.sign * other.sign)

    def __truediv__(self, other: SignedLogValue) -> SignedLogValue:
        if other.sign == 0:
            raise ZeroDivisionError("division by a SignedLogValue zero")
        if self.sign == 0:
            return SignedLogValue.zero()
        return SignedLogValue(self.log_magnitude - other.log_magnitude,
                              self.sign * other.sign)

    def __neg__(self) -> SignedLogValue:
        return SignedLogValue(self.log_magnitude, -self.sign)


def _check_finite(x: float, name: str = "x") -> None:
    if not math.isfinite(x):
        raise DomainError(f"{name} must be finite, got {x!r}")


def is_gamma_pole(x: float) -> bool:
    """True when ``x`` is within :data:`POLE_TOL` of an integer ``<= 0``."""
    if x > POLE_TOL:
        return False
    return abs(x - round(x)) <= POLE_TOL


def sinpi(x: float) -> float:
    """``sin(pi * x)`` with the argument reduced exactly before scaling."""
    n = round(x)
    r = x - n
    s = math.sin(math.pi * r)
    return -s if n % 2 else s


def log_gamma(x: float) -> float:
    """Natural log of Gamma for ``x > 0``."""
    _check_finite(x)
    if x <= 0.0:
        raise DomainError(f"log_gamma requires x > 0, got {x!r}")
    return math.lgamma(x)


def log_recip_gamma(x: float) -> SignedLogValue:
    """``1/Gamma(x)`` as a :class:`SignedLogValue`; exact zero at the poles."""
    _check_finite(x)
    if is_gamma_pole(x):
        return SignedLogValue.zero()
    if x > 0.0:
        return SignedLogValue(-math.lgamma(x), 1)
    # reflection: 1/Gamma(x) = sin(pi x) Gamma(1 - x) / pi
    s = sinpi(x)
    return SignedLogValue(math.log(abs(s)) + math.lgamma(1.0 - x) - _LOG_PI,
                          1 if s > 0 else -1)


def recip_gamma(x: float) -> float:
    """``1/Gamma(x)`` for any finite real; returns exactly 0.0 at the poles.

    Negative non-integer arguments go through the reflection identity, so the
    sign alternates correctly between consecutive poles.
    """
    _check_finite(x)
    if is_gamma_pole(x):
        return 0.0
    if 0.0 < x < 170.0:
        return 1.0 / math.gamma(x)
    if -170.0 < x < 0.0:
        return sinpi(x) * math.gamma(1.0 - x) / math.pi
    return log_recip_gamma(x).to_float()


def gamma_ratio(a: float, b: float) -> float:
    """``Gamma(a)/Gamma(b)`` for positive arguments, formed in log space."""
    _check_finite(a, "a")
    _check_finite(b, "b")
    if a <= 0.0 or b <= 0.0:
        raise DomainError(f"gamma_ratio requires a, b > 0, got ({a!r}, {b!r})")
    d = math.lgamma(a) - math.lgamma(b)
    # the ratio itself may leave the double range even though no step overflows
    return math.exp(d) if d < 709.78 else math.inf


def log_gamma_ratio(a: float, b: float) -> float:
    """``log(Gamma(a)/Gamma(b))`` for positive arguments."""
    return log_gamma(a) - log_gamma(b)
