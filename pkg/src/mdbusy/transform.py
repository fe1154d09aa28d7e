"""Laplace transform of the busy period.

``bbar`` evaluates the closed form in the rearranged shape

    B(s) = (s + lam) E / (s + lam E),   E = exp(-(s + lam) alpha),

which is algebraically identical to ``1 + (s - (s + lam) s / (lam E + s)) / lam``
but avoids subtracting two numbers close to 1 when |B(s)| is small.
``bbar_via_general`` takes the long way through the general infinite-server
formula, in extended precision, and serves as a cross-check.
"""

from __future__ import annotations

import cmath
import math

import mpmath
import numpy as np

from mdbusy.errors import RangeError, SingularityError, ValidationError
from mdbusy.model import QueueParams

__all__ = ["bbar", "bbar_array", "bbar_via_general", "pole_guard"]

_POLE_REL = 1e-13
_POLE_ABS = 1e-300


def pole_guard(s_abs, den_abs):
    """True where the denominator is too small to trust the quotient."""
    return den_abs < _POLE_REL * s_abs + _POLE_ABS


def bbar(params: QueueParams, s: complex) -> complex:
    """Busy-period transform at a single complex point."""
    s = complex(s)
    if not (math.isfinite(s.real) and math.isfinite(s.imag)):
        raise ValidationError(f"transform argument must be finite, got {s!r}")
    if s == 0:
        return 1.0 + 0.0j
    lam = params.lam
    try:
        e = cmath.exp(-(s + lam) * params.alpha)
    except OverflowError as exc:
        raise RangeError(f"exp overflow evaluating the transform at s = {s!r}") from exc
    den = s + lam * e
    if pole_guard(abs(s), abs(den)):
        raise SingularityError(f"s = {s!r} is numerically on a pole of the transform")
    return (s + lam) * e / den


def bbar_array(params: QueueParams, s: np.ndarray) -> np.ndarray:
    """Vectorised :func:`bbar`; raises if any point is on a pole."""
    s = np.asarray(s, dtype=complex)
    lam = params.lam
    with np.errstate(over="raise"):
        try:
            e = np.exp(-(s + lam) * params.alpha)
        except FloatingPointError as exc:
            raise RangeError("exp overflow evaluating the transform") from exc
    den = s + lam * e
    zero = s == 0
    bad = pole_guard(np.abs(s), np.abs(den)) & ~zero
    if np.any(bad):
        where = s[bad][0]
        raise SingularityError(f"s = {where!r} is numerically on a pole of the transform")
    out = np.empty_like(s)
    out[zero] = 1.0
    ok = ~zero
    out[ok] = (s[ok] + lam) * e[ok] / den[ok]
    return out


def bbar_via_general(params: QueueParams, s: complex, dps: int = 40) -> complex:
    """Evaluate ``1 + (s - 1/I(s)) / lam`` with the deterministic-service
    reduction of the inner integral

        I(s) = (1 - exp(-(s + lam) alpha)) / (s + lam) + exp(-rho) exp(-s alpha) / s.

    Requires Re(s) > -lam. The arithmetic runs at ``dps`` decimal digits so
    the cancellation in the outer formula does not reach double precision.
    """
    s = complex(s)
    if not (math.isfinite(s.real) and math.isfinite(s.imag)):
        raise ValidationError(f"transform argument must be finite, got {s!r}")
    if s.real <= -params.lam:
        raise ValidationError(f"Re(s) must exceed -lambda = {-params.lam!r}, got {s!r}")
    if s == 0:
        return 1.0 + 0.0j
    with mpmath.workdps(dps):
        z = mpmath.mpc(s.real, s.imag)
        lam = mpmath.mpf(params.lam)
        alpha = mpmath.mpf(params.alpha)
        shifted = z + lam
        first = (1 - mpmath.exp(-shifted * alpha)) / shifted
        inner = first + mpmath.exp(-lam * alpha) * mpmath.exp(-z * alpha) / z
        if abs(inner) == 0:
            raise SingularityError(f"s = {s!r} is a pole of the transform")
        value = 1 + (z - 1 / inner) / lam
        out = complex(value)
    if pole_guard(abs(s), abs(s + params.lam * cmath.exp(-(s + params.lam) * params.alpha))):
        raise SingularityError(f"s = {s!r} is numerically on a pole of the transform")
    return out
