"""Closed-form bounds and approximations for the busy-period distribution."""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Callable, Iterable

from mdbusy import moments
from mdbusy.errors import RangeError
from mdbusy.model import QueueParams, service_cdf

__all__ = [
    "BoundKind",
    "BoundValue",
    "EXP_APPROX_RHO",
    "chebyshev_lower",
    "envelope",
    "exp_approx",
    "kolmogorov_distance",
]

# Traffic intensity above which the exponential law is a good stand-in.
EXP_APPROX_RHO = 10.0


class BoundKind(str, enum.Enum):
    ENVELOPE_LOWER = "envelope_lower"
    ENVELOPE_UPPER = "envelope_upper"
    CHEBYSHEV_LOWER = "chebyshev_lower"
    EXP_APPROX = "exp_approx"


@dataclass(frozen=True)
class BoundValue:
    t: float
    value: float
    kind: BoundKind
    # False when the bound holds only trivially (negative, or t below the mean)
    valid: bool


def envelope(params: QueueParams, t: float) -> tuple[float, float]:
    """(e^{-rho} G(t), G(t))."""
    g = service_cdf(params, t)
    return math.exp(-params.rho) * g, g


def chebyshev_lower(params: QueueParams, t: float) -> BoundValue:
    """1 - Var[B] / (t - E[B])^2, written in scaled form as

        1 - (e^{2 rho} - 2 rho e^rho - 1) / (1 + lam t - e^rho)^2.
    """
    rho = params.rho
    if 2.0 * rho > 709.0:
        raise RangeError(f"Chebyshev bound overflows for rho = {rho:g}")
    scaled_var = moments.variance(params) * params.lam**2
    gap = 1.0 + params.lam * t - math.exp(rho)
    if gap == 0.0:
        return BoundValue(t, -math.inf, BoundKind.CHEBYSHEV_LOWER, False)
    value = 1.0 - scaled_var / gap**2
    valid = t > moments.mean(params) and value >= 0.0
    return BoundValue(t, value, BoundKind.CHEBYSHEV_LOWER, valid)


def exp_approx(params: QueueParams, t: float) -> float:
    """1 - exp(-lam e^{-rho} t), the large-rho exponential approximation."""
    if t <= 0.0:
        return 0.0
    return -math.expm1(-params.lam * math.exp(-params.rho) * t)


def kolmogorov_distance(
    f: Callable[[float], float], g: Callable[[float], float], ts: Iterable[float]
) -> float:
    """max |f(t) - g(t)| over the grid ``ts``."""
    return max(abs(f(t) - g(t)) for t in ts)
