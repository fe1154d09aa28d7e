"""Exact busy-period moments and shape coefficients.

Raw moments come from the Leibniz-rule recursion on the busy-period
transform, fed by the derivatives of the auxiliary function C(s) at the
origin. Closed forms are used for the mean, variance and variation
coefficient, where they are cheaper and better conditioned.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

from scipy.special import gammainc

from mdbusy.errors import RangeError, ValidationError
from mdbusy.model import QueueParams, make_params

__all__ = [
    "ASYMPTOTIC_RHO",
    "CDerivatives",
    "DEFAULT_MAX_ORDER",
    "MAX_SAFE_ORDER",
    "MIN_SHAPE_RHO",
    "MomentReport",
    "beta1",
    "beta2",
    "c_derivatives",
    "central_moments",
    "is_asymptotic",
    "mean",
    "moment_report",
    "raw_moments",
    "variance",
    "variation_coeff",
]

DEFAULT_MAX_ORDER = 4
MAX_SAFE_ORDER = 10
# Above this traffic intensity the shape coefficients equal their exponential
# limits to double precision.
ASYMPTOTIC_RHO = 30.0
MIN_SHAPE_RHO = 1e-3
# e**x overflows a double just above 709.78.
_MAX_EXP = 709.0

_BELOW_ONE = math.nextafter(1.0, 0.0)


def _exp(x: float) -> float:
    if x > _MAX_EXP:
        raise RangeError(f"exp({x:g}) overflows double precision")
    return math.exp(x)


def _sinh_minus_x(x: float) -> float:
    """sinh(x) - x without cancellation for small x."""
    if abs(x) > 0.5:
        return math.sinh(x) - x
    term = x * x * x / 6.0
    total = term
    k = 1
    while abs(term) > 1e-18 * abs(total):
        term *= x * x / ((2 * k + 2) * (2 * k + 3))
        total += term
        k += 1
    return total


def _check_finite(values, what: str):
    for v in values:
        if not math.isfinite(v):
            raise RangeError(f"{what} overflowed double precision")
    return values


@dataclass(frozen=True)
class CDerivatives:
    """``values[n]`` holds C^(n)(0) for n = 0 .. max_order - 1."""

    values: tuple[float, ...]


def c_derivatives(params: QueueParams, max_order: int) -> CDerivatives:
    """Derivatives of C(s) at the origin.

    The forward recursion
    ``C^(n)(0) = -e^{-rho} (-alpha)^n - (n / lam) C^(n-1)(0)``
    is used while it is well conditioned (n <= rho). Past that point each
    step amplifies the previous rounding error by about n/rho, so the
    remaining entries are taken from the equivalent closed form
    ``(-1)^n n! lam^{-n} P(n + 1, rho)`` with P the regularised lower
    incomplete gamma function.
    """
    if int(max_order) != max_order or max_order < 1:
        raise ValidationError(f"max_order must be a positive integer, got {max_order!r}")
    max_order = int(max_order)
    lam, alpha, rho = params.lam, params.alpha, params.rho
    e_minus = math.exp(-rho)
    values = [-math.expm1(-rho)]
    for n in range(1, max_order):
        if n <= rho:
            values.append(-e_minus * (-alpha) ** n - (n / lam) * values[n - 1])
        else:
            values.append((-1) ** n * math.factorial(n) * lam**-n * float(gammainc(n + 1, rho)))
    return CDerivatives(tuple(values))


def raw_moments(
    params: QueueParams, max_order: int = DEFAULT_MAX_ORDER, *, allow_high_order: bool = False
) -> list[float]:
    """E[B^n] for n = 1 .. max_order, from the derivative recursion.

    Orders above ``MAX_SAFE_ORDER`` are refused unless ``allow_high_order``
    is set, because the alternating sum loses accuracy as n grows.
    """
    if int(max_order) != max_order or max_order < 1:
        raise ValidationError(f"max_order must be a positive integer, got {max_order!r}")
    max_order = int(max_order)
    if max_order > MAX_SAFE_ORDER:
        if not allow_high_order:
            raise ValidationError(
                f"max_order {max_order} > {MAX_SAFE_ORDER}: pass allow_high_order to force"
            )
        warnings.warn(
            f"moments of order > {MAX_SAFE_ORDER} suffer growing cancellation",
            RuntimeWarning,
            stacklevel=2,
        )
    e_rho = _exp(params.rho)
    c = c_derivatives(params, max_order).values
    lam = params.lam
    moments: list[float] = []
    for n in range(1, max_order + 1):
        inner = math.fsum(
            (-1) ** (n - p) * math.comb(n, p) * moments[n - p - 1] * c[p] for p in range(1, n)
        )
        value = (-1) ** (n + 1) * (e_rho / lam * n * c[n - 1] - e_rho * inner)
        moments.append(value)
    return _check_finite(moments, "raw moment")


def mean(params: QueueParams) -> float:
    """(e^rho - 1) / lam."""
    if params.rho > _MAX_EXP:
        raise RangeError(f"mean overflows for rho = {params.rho:g}")
    return _check_finite([math.expm1(params.rho) / params.lam], "mean")[0]


def variance(params: QueueParams) -> float:
    """(2 e^rho (e^rho - 1 - rho) - (e^rho - 1)^2) / lam^2.

    Evaluated as ``2 e^rho (sinh(rho) - rho) / lam^2``, the same quantity
    rearranged so that small rho does not cancel.
    """
    rho = params.rho
    if 2.0 * rho > _MAX_EXP:
        raise RangeError(f"variance overflows for rho = {rho:g}")
    value = 2.0 * math.exp(rho) * _sinh_minus_x(rho) / params.lam**2
    return _check_finite([value], "variance")[0]


def is_asymptotic(rho: float) -> bool:
    """True when shape coefficients are reported at their exponential limits."""
    return rho > ASYMPTOTIC_RHO


def _check_rho(rho: float) -> float:
    rho = float(rho)
    if not math.isfinite(rho) or rho <= 0.0:
        raise ValidationError(f"rho must be positive and finite, got {rho!r}")
    return rho


def variation_coeff(rho: float) -> float:
    """Standard deviation over mean; a function of rho only.

    For rho above ``ASYMPTOTIC_RHO`` the exact value rounds to 1, and the
    largest double below 1 is returned instead so the result stays
    strictly below its limit.
    """
    rho = _check_rho(rho)
    if is_asymptotic(rho):
        return _BELOW_ONE
    squared = 2.0 * math.exp(rho) * _sinh_minus_x(rho) / math.expm1(rho) ** 2
    return min(math.sqrt(squared), _BELOW_ONE)


def central_moments(raw: list[float]) -> tuple[float, float, float]:
    """Second to fourth central moments from the first four raw moments.

    Binomial expansions are summed with ``math.fsum``; at rho = 1 the third
    central moment (about 2) is the difference of terms of size 20.
    """
    m1, m2, m3, m4 = raw[:4]
    mu2 = math.fsum([m2, -m1 * m1])
    mu3 = math.fsum([m3, -3.0 * m1 * m2, 2.0 * m1**3])
    mu4 = math.fsum([m4, -4.0 * m1 * m3, 6.0 * m1 * m1 * m2, -3.0 * m1**4])
    return mu2, mu3, mu4


def _shape_moments(rho: float) -> tuple[float, float, float]:
    if rho < MIN_SHAPE_RHO:
        raise ValidationError(
            f"shape coefficients need rho >= {MIN_SHAPE_RHO:g} (cancellation), got {rho!r}"
        )
    return central_moments(raw_moments(make_params(1.0, rho), 4))


def beta1(rho: float) -> float:
    """Squared skewness mu3^2 / mu2^3; tends to 4."""
    rho = _check_rho(rho)
    if is_asymptotic(rho):
        return 4.0
    mu2, mu3, _ = _shape_moments(rho)
    return mu3 * mu3 / mu2**3


def beta2(rho: float) -> float:
    """Kurtosis mu4 / mu2^2; tends to 9."""
    rho = _check_rho(rho)
    if is_asymptotic(rho):
        return 9.0
    mu2, _, mu4 = _shape_moments(rho)
    return mu4 / (mu2 * mu2)


@dataclass(frozen=True)
class MomentReport:
    params: QueueParams
    raw: tuple[float, ...]
    mean: float
    variance: float
    variation_coeff: float
    beta1: float
    beta2: float
    asymptotic: bool


def moment_report(params: QueueParams, max_order: int = DEFAULT_MAX_ORDER, **kwargs) -> MomentReport:
    """Collect every moment quantity for one parameter set."""
    raw = raw_moments(params, max_order, **kwargs)
    return MomentReport(
        params=params,
        raw=tuple(raw),
        mean=mean(params),
        variance=variance(params),
        variation_coeff=variation_coeff(params.rho),
        beta1=beta1(params.rho),
        beta2=beta2(params.rho),
        asymptotic=is_asymptotic(params.rho),
    )
