"""Parameters, distribution records and the deterministic service law.

All distribution functions in this package are right-continuous: the value
at a jump point already includes the mass of the jump.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Callable

from mdbusy.errors import ValidationError

__all__ = [
    "CdfEstimate",
    "Method",
    "MixedCdf",
    "QueueParams",
    "ServiceCdf",
    "make_params",
    "service_cdf",
]


def _check_positive(name: str, value: float) -> float:
    try:
        value = float(value)
    except (TypeError, ValueError) as exc:
        raise ValidationError(f"{name} must be a real number, got {value!r}") from exc
    if not math.isfinite(value) or value <= 0.0:
        raise ValidationError(f"{name} must be positive and finite, got {value!r}")
    return value


@dataclass(frozen=True)
class QueueParams:
    """Arrival rate ``lam``, service time ``alpha`` and the derived traffic
    intensity ``rho = lam * alpha``."""

    lam: float
    alpha: float
    rho: float = field(init=False)

    def __post_init__(self) -> None:
        lam = _check_positive("lambda", self.lam)
        alpha = _check_positive("alpha", self.alpha)
        object.__setattr__(self, "lam", lam)
        object.__setattr__(self, "alpha", alpha)
        object.__setattr__(self, "rho", lam * alpha)


def make_params(lam: float, alpha: float) -> QueueParams:
    """Validate ``(lam, alpha)`` and return the parameter triple.

    >>> make_params(1, 3).rho
    3.0
    """
    return QueueParams(lam, alpha)


@dataclass(frozen=True)
class ServiceCdf:
    """Step distribution function of a service time fixed at ``alpha``."""

    alpha: float

    def __call__(self, t: float) -> float:
        return 0.0 if t < self.alpha else 1.0


def service_cdf(params: QueueParams, t: float) -> float:
    """G(t): 0 below the service time, 1 from the service time on."""
    return ServiceCdf(params.alpha)(t)


@dataclass(frozen=True)
class MixedCdf:
    """Distribution function with one atom plus an absolutely continuous part.

    ``continuous_part(t)`` must return the continuous mass accumulated up to
    ``t``; it is only consulted for ``t >= support_lower``.
    """

    atom_location: float
    atom_mass: float
    continuous_part: Callable[[float], float]
    support_lower: float
    truncation_error: float = 0.0

    def __call__(self, t: float) -> float:
        if t < self.support_lower:
            return 0.0
        value = self.continuous_part(t)
        if t >= self.atom_location:
            value += self.atom_mass
        return min(max(value, 0.0), 1.0)


class Method(str, enum.Enum):
    SERIES = "series"
    PAB = "pab"
    CHEBYSHEV_LOWER = "chebyshev_lower"
    ENVELOPE_LOWER = "envelope_lower"
    ENVELOPE_UPPER = "envelope_upper"
    EXP_APPROX = "exp_approx"
    SIMULATION = "simulation"


_BOUNDED_METHODS = frozenset(Method) - {Method.CHEBYSHEV_LOWER}


@dataclass(frozen=True)
class CdfEstimate:
    """One estimate of B(t).

    ``error_band`` is ``(below, above)``: the true value is claimed to lie in
    ``[value - below, value + above]``. ``math.inf`` marks a side without a
    guarantee.
    """

    t: float
    value: float
    method: Method
    error_band: tuple[float, float] = (math.inf, math.inf)

    def __post_init__(self) -> None:
        object.__setattr__(self, "method", Method(self.method))
        if self.method in _BOUNDED_METHODS and not (0.0 <= self.value <= 1.0):
            raise ValidationError(
                f"{self.method.value} estimate {self.value!r} is not a probability"
            )
