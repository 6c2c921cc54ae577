"""Sign-aware log-gamma and the generalized falling factorial.

The falling factorial ``t^(v) = Gamma(t+1) / Gamma(t+1-v)`` is the kernel of
every discrete fractional operator in this package.  Ratios of Gamma values
overflow quickly, so all intermediates are carried as sign plus log-magnitude
(:class:`SignedLog`) and only the final ratio is exponentiated.

Convention: when the denominator ``Gamma(t+1-v)`` has a pole and the numerator
does not, the falling factorial is exactly 0.  A numerator-only pole (value
genuinely infinite) and a double pole (0/0 with no limit rule) both raise
:class:`~fracbvp.errors.UndefinedValue`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import InvalidArgument, PoleError, UndefinedValue

#: Absolute tolerance for deciding that an argument sits on a Gamma pole.
#: Inputs are small rationals combined by additions; drift stays far below this.
POLE_TOL = 1e-12


@dataclass(frozen=True)
class SignedLog:
    """A real number stored as sign and natural log of its magnitude.

    ``sign == 0`` represents exactly zero; ``log_abs`` is ignored in that case.
    """

    log_abs: float
    sign: int

    @classmethod
    def from_float(cls, x: float) -> "SignedLog":
        if x == 0.0:
            return cls(0.0, 0)
        return cls(math.log(abs(x)), 1 if x > 0 else -1)

    def to_float(self) -> float:
        if self.sign == 0:
            return 0.0
        return self.sign * math.exp(self.log_abs)

    def __mul__(self, other: "SignedLog") -> "SignedLog":
        if self.sign == 0 or other.sign == 0:
            return SignedLog(0.0, 0)
        return SignedLog(self.log_abs + other.log_abs, self.sign * other.sign)

    def __truediv__(self, other: "SignedLog") -> "SignedLog":
        if other.sign == 0:
            raise ZeroDivisionError("division by an exact SignedLog zero")
        if self.sign == 0:
            return SignedLog(0.0, 0)
        return SignedLog(self.log_abs - other.log_abs, self.sign * other.sign)


def is_gamma_pole(x: float, tol: float = POLE_TOL) -> bool:
    """True iff ``x`` lies within ``tol`` of a nonpositive integer."""
    if tol <= 0.0:
        raise InvalidArgument("tol must be positive")
    nearest = round(x)
    if nearest > 0:
        nearest = 0  # nearest nonpositive integer to a positive x
    return abs(x - nearest) <= tol


def log_gamma_signed(x: float) -> SignedLog:
    """Sign and log-magnitude of ``Gamma(x)`` for finite non-pole real ``x``.

    For ``x > 0`` the sign is +1.  For negative non-integer ``x`` the sign
    alternates per unit interval: ``(-1)**ceil(-x)`` on ``(-k-1, -k)``, which
    is the sign of ``sin(pi*x)`` delivered by the reflection identity.
    """
    if not math.isfinite(x):
        raise InvalidArgument(f"log_gamma_signed requires finite x, got {x!r}")
    if is_gamma_pole(x, POLE_TOL):
        raise PoleError(f"Gamma pole at x = {x!r}")
    if x > 0.0:
        return SignedLog(math.lgamma(x), 1)
    sign = 1 if math.floor(x) % 2 == 0 else -1
    return SignedLog(math.lgamma(x), sign)


def falling_factorial(t: float, v: float) -> float:
    """Generalized falling factorial ``t^(v) = Gamma(t+1) / Gamma(t+1-v)``.

    Returns exactly 0.0 when ``t+1-v`` is a Gamma pole and ``t+1`` is not.

    Raises:
        UndefinedValue: if ``t+1`` is a pole and ``t+1-v`` is not (the ratio is
            infinite), or if both are poles (0/0 has no convention here).
    """
    if not (math.isfinite(t) and math.isfinite(v)):
        raise InvalidArgument("falling_factorial requires finite arguments")
    num = t + 1.0
    den = t + 1.0 - v
    num_pole = is_gamma_pole(num, POLE_TOL)
    den_pole = is_gamma_pole(den, POLE_TOL)
    if den_pole and not num_pole:
        return 0.0
    if num_pole and not den_pole:
        raise UndefinedValue(
            f"falling_factorial({t!r}, {v!r}) is infinite: Gamma({num!r}) has a pole"
        )
    if num_pole and den_pole:
        raise UndefinedValue(
            f"falling_factorial({t!r}, {v!r}) is indeterminate: both Gamma arguments are poles"
        )
    return (log_gamma_signed(num) / log_gamma_signed(den)).to_float()
