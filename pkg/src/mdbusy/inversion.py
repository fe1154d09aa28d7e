"""Tail probabilities of the busy period from its transform.

Implements the Platzman-Ammons-Bartholdi approximation: the indicator of
(A, U + dA] is expanded in a Fourier series of period U - L + 2 dA, smoothed
by a Gaussian kernel of width D, and integrated against the law of B, which
only needs the transform at the N frequencies j * omega * n. For a
requested accuracy dA and precision dp the result tau satisfies

    P[B >= A + dA] - dp <= tau <= P[B > A - dA] + dp

provided almost all mass lies in [L, U]. L is the service time (no busy
period is shorter) and U comes from the Chebyshev inequality with a safety
factor 10^l.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable

import numpy as np

from mdbusy import moments, series
from mdbusy.errors import RangeError, ResourceError, SingularityError, ValidationError
from mdbusy.model import CdfEstimate, Method, QueueParams
from mdbusy.transform import bbar_array, pole_guard

__all__ = [
    "DAMPING_FLOOR",
    "PabConfig",
    "PabDerived",
    "TailResult",
    "cdf",
    "cdf_many",
    "contract_interval",
    "derive",
    "select_bracket",
    "tail",
    "tail_many",
    "tail_result",
]

DAMPING_FLOOR = 1e-300
DEFAULT_MAX_TERMS = 2_000_000


@dataclass(frozen=True)
class PabConfig:
    delta_a: float
    delta_p: float
    l: int = 3
    max_terms: int = DEFAULT_MAX_TERMS

    def __post_init__(self) -> None:
        if not (math.isfinite(self.delta_a) and self.delta_a > 0.0):
            raise ValidationError(f"delta_a must be positive, got {self.delta_a!r}")
        if not (0.0 < self.delta_p < 0.5):
            raise ValidationError(f"delta_p must lie in (0, 1/2), got {self.delta_p!r}")
        if int(self.l) != self.l or self.l < 1:
            raise ValidationError(f"l must be a positive integer, got {self.l!r}")
        if int(self.max_terms) != self.max_terms or self.max_terms < 1:
            raise ValidationError(f"max_terms must be a positive integer, got {self.max_terms!r}")


@dataclass(frozen=True)
class PabDerived:
    k_const: float
    d_const: float
    omega: float
    n_terms: int
    # Gaussian damping per squared harmonic, exp(-D^2 omega^2 / 2)
    damping_base: float
    upper: float
    lower: float


@dataclass(frozen=True)
class TailResult:
    t: float
    tau: float
    terms_summed: int
    stopped_early: bool


def select_bracket(params: QueueParams, config: PabConfig) -> tuple[float, float]:
    """(L, U) with P[B > U] <= 10^-l dp by Chebyshev."""
    rho = params.rho
    if 2.0 * rho > 709.0:
        raise RangeError(f"upper bracket overflows for rho = {rho:g}")
    scaled_var = moments.variance(params) * params.lam**2
    spread = math.sqrt(scaled_var / config.delta_p * 10.0**config.l)
    upper = (math.expm1(rho) + spread) / params.lam
    return params.alpha, upper


def derive(params: QueueParams, config: PabConfig) -> PabDerived:
    lower, upper = select_bracket(params, config)
    k_const = math.log(2.0 / config.delta_p)
    d_const = config.delta_a / math.sqrt(2.0 * k_const)
    omega = 2.0 * math.pi / (upper - lower + 2.0 * config.delta_a)
    n_terms = max(1, math.ceil(2.0 * k_const / (omega * config.delta_a)))
    if n_terms > config.max_terms:
        raise ResourceError(
            f"the requested accuracy needs N = {n_terms} transform evaluations "
            f"(max_terms = {config.max_terms})"
        )
    _check_low_harmonics(params, omega, n_terms)
    damping_base = math.exp(-0.5 * (d_const * omega) ** 2)
    return PabDerived(k_const, d_const, omega, n_terms, damping_base, upper, lower)


def _check_low_harmonics(params: QueueParams, omega: float, n_terms: int) -> None:
    # On the imaginary axis |iw + lam e^{-rho} e^{-iw alpha}| >= |w| - lam e^{-rho},
    # so only harmonics below lam e^{-rho} can come near a pole.
    n_low = min(n_terms, int(params.lam * math.exp(-params.rho) / omega))
    if n_low == 0:
        return
    s = 1j * omega * np.arange(1, n_low + 1)
    den = s + params.lam * np.exp(-(s + params.lam) * params.alpha)
    bad = pole_guard(np.abs(s), np.abs(den))
    if np.any(bad):
        raise SingularityError(f"harmonic s = {s[bad][0]!r} sits on a pole of the transform")


class _Kernel:
    """Everything in the sum that does not depend on the abscissa."""

    def __init__(self, params: QueueParams, config: PabConfig):
        self.config = config
        self.derived = d = derive(params, config)
        n = np.arange(1, d.n_terms + 1, dtype=float)
        damping = np.exp(-0.5 * (d.d_const * d.omega * n) ** 2)
        # underflowed terms contribute nothing
        live = damping >= DAMPING_FLOOR
        self.stopped_early = not bool(live.all())
        n = n[live]
        self.n = n
        self.freq = d.omega * n
        self.weight = damping[live] / (math.pi * n)
        self.transform = bbar_array(params, 1j * self.freq)
        self.beta_part = np.exp(1j * (d.upper + config.delta_a) * self.freq) * self.transform

    def tail(self, t: float) -> TailResult:
        d, da = self.derived, self.config.delta_a
        linear = (d.upper - t + da) / (d.upper - d.lower + 2.0 * da)
        gamma_part = np.exp(1j * t * self.freq) * self.transform
        terms = self.weight * np.imag(self.beta_part - gamma_part)
        tau = math.fsum([linear, *terms.tolist()])
        return TailResult(t, tau, int(self.n.size), self.stopped_early)


def _check_t(t: float) -> float:
    t = float(t)
    if not (math.isfinite(t) and t > 0.0):
        raise ValidationError(f"t must be positive and finite, got {t!r}")
    return t


def tail_result(params: QueueParams, config: PabConfig, t: float) -> TailResult:
    return _Kernel(params, config).tail(_check_t(t))


def tail(params: QueueParams, config: PabConfig, t: float) -> float:
    """Approximation of P[B > t]."""
    return tail_result(params, config, t).tau


def tail_many(params: QueueParams, config: PabConfig, ts: Iterable[float]) -> list[TailResult]:
    """Tail approximations sharing one set of transform evaluations."""
    ts = [_check_t(t) for t in ts]
    kernel = _Kernel(params, config)
    return [kernel.tail(t) for t in ts]


def _estimate(params: QueueParams, config: PabConfig, res: TailResult, oracle: bool) -> CdfEstimate:
    value = min(max(1.0 - res.tau, 0.0), 1.0)
    dp, da = config.delta_p, config.delta_a
    if oracle:
        at = series.busy_cdf(params, res.t).value
        ahead = series.busy_cdf(params, res.t + da).value
        behind = series.busy_cdf(params, res.t - da).value
        band = (dp + (ahead - at), dp + (at - behind))
    else:
        band = (dp, dp)
    return CdfEstimate(res.t, value, Method.PAB, band)


def cdf(params: QueueParams, config: PabConfig, t: float, oracle: bool = True) -> CdfEstimate:
    """B(t) as 1 - tau.

    With ``oracle`` the error band adds the series-evaluated change of B over
    one accuracy step on each side; without it the band is (dp, dp) and
    omits that smoothing slack.
    """
    return _estimate(params, config, tail_result(params, config, t), oracle)


def cdf_many(
    params: QueueParams, config: PabConfig, ts: Iterable[float], oracle: bool = True
) -> list[CdfEstimate]:
    return [_estimate(params, config, r, oracle) for r in tail_many(params, config, ts)]


def contract_interval(params: QueueParams, config: PabConfig, t: float) -> tuple[float, float]:
    """Interval that tau must fall in, evaluated with the series oracle:
    ``[P[B >= t + dA] - dp, P[B > t - dA] + dp]``."""
    da, dp = config.delta_a, config.delta_p
    ahead = t + da
    below_ahead = series.busy_cdf(params, ahead).value
    location, mass = series.busy_atom(params)
    if ahead == location:
        below_ahead -= mass
    behind = series.busy_cdf(params, t - da).value
    return (1.0 - below_ahead) - dp, (1.0 - behind) + dp
