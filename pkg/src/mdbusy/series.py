"""Busy-period distribution from its structural decomposition.

A busy period that serves n + 1 customers has length alpha + S_n, where S_n
is the sum of n independent inter-departure gaps, each exponential with
rate lam conditioned to be at most alpha. The number of customers is
geometric: n + 1 customers with probability e^{-rho} (1 - e^{-rho})^n.
So

    B(t) = sum_n e^{-rho} (1 - e^{-rho})^n P(S_n <= t - alpha).

Two evaluation paths for P(S_n <= x) are provided:

* ``exact``: S_n has density lam^n e^{-lam x} v_n(x) / q^n where v_n is the
  n-fold self-convolution of the indicator of [0, alpha] (an Irwin-Hall
  spline). Integrating term by term gives an alternating sum of regularised
  incomplete gamma functions.
* ``grid``: densities are convolved numerically on a uniform grid with the
  trapezoid rule (default step alpha / 1000).

The alternating sums cancel badly far in the tail, where their terms reach
(1 + e^{-rho})^n. The exact path tracks the sum of absolute terms and hands
over to the grid, whose terms are all positive, once the implied rounding
error would eat the quadrature half of ``tol``.

``busy_cdf_delay`` is a third, finite representation obtained by expanding
the transform in powers of exp(-s alpha); it needs no truncation in n and is
the only one that stays cheap at large rho.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Literal

import numpy as np
from scipy.signal import fftconvolve
from scipy.special import gammainc, gammaln

from mdbusy.errors import ResourceError, ValidationError
from mdbusy.model import MixedCdf, QueueParams

__all__ = [
    "DEFAULT_GRID_DIVISIONS",
    "DEFAULT_TOL",
    "SeriesResult",
    "TruncatedExpLaw",
    "busy_atom",
    "busy_cdf",
    "busy_cdf_delay",
    "busy_cdf_grid",
    "busy_pdf_continuous",
    "mixed_cdf",
    "n_customer_weight",
    "quantile",
    "sum_truncexp_cdf",
    "sum_truncexp_pdf",
    "terms_for_tol",
]

DEFAULT_TOL = 1e-6
DEFAULT_GRID_DIVISIONS = 1000
MAX_MIXTURE_TERMS = 200_000
# Relative error assumed per term of an alternating sum. Terms are built in
# log space from lgamma values near 1e4, so a few ulps of those logs show up
# here; 1e-13 covers what was observed with some margin.
_TERM_REL_ERROR = 1e-13


@dataclass(frozen=True)
class TruncatedExpLaw:
    """Exponential(lam) conditioned on [0, alpha]."""

    lam: float
    alpha: float

    @classmethod
    def from_params(cls, params: QueueParams) -> "TruncatedExpLaw":
        return cls(params.lam, params.alpha)

    @property
    def mass(self) -> float:
        """1 - e^{-rho}, the unconditioned probability of [0, alpha]."""
        return -math.expm1(-self.lam * self.alpha)

    def cdf(self, t: float) -> float:
        if t <= 0.0:
            return 0.0
        if t >= self.alpha:
            return 1.0
        return -math.expm1(-self.lam * t) / self.mass

    def pdf(self, t: float) -> float:
        if t < 0.0 or t > self.alpha:
            return 0.0
        return self.lam * math.exp(-self.lam * t) / self.mass


@dataclass(frozen=True)
class SeriesResult:
    value: float
    terms_used: int
    truncation_error: float
    # None for the exact path, which has no grid.
    grid_step: float | None = None
    # estimated cancellation error of the exact path
    rounding_error: float = 0.0


def _check_tol(tol: float) -> float:
    tol = float(tol)
    if not (tol > 0.0 and math.isfinite(tol)):
        raise ValidationError(f"tol must be positive, got {tol!r}")
    return tol


def n_customer_weight(rho: float, n: int) -> float:
    """Probability that the busy period serves exactly n + 1 customers."""
    if n < 0:
        raise ValidationError(f"n must be nonnegative, got {n!r}")
    return math.exp(-rho) * (-math.expm1(-rho)) ** n


def terms_for_tol(rho: float, tol: float) -> int:
    """Smallest N with (1 - e^{-rho})^(N + 1) <= tol / 2."""
    tol = _check_tol(tol)
    q = -math.expm1(-rho)
    if q <= 0.0:
        return 0
    log_q = math.log(q)
    if log_q == 0.0:
        raise ResourceError(f"rho = {rho:g} needs unboundedly many mixture terms")
    n = max(0, math.ceil(math.log(tol / 2.0) / log_q) - 1)
    # guard against rounding in the logarithms
    while q ** (n + 1) > tol / 2.0:
        n += 1
    while n > 0 and q**n <= tol / 2.0:
        n -= 1
    return n


def _log_comb(n: int, k: np.ndarray) -> np.ndarray:
    return gammaln(n + 1) - gammaln(k + 1) - gammaln(n - k + 1)


def _scaled_sum_cdf(lam: float, alpha: float, n: int, x: float) -> tuple[float, float]:
    """q^n P(S_n <= x) for 0 < x < n alpha, as a compensated alternating sum,
    together with the sum of the absolute terms."""
    rho = lam * alpha
    k = np.arange(0, min(n, int(x // alpha)) + 1)
    with np.errstate(divide="ignore"):
        log_cdf = np.log(gammainc(n, lam * np.maximum(x - k * alpha, 0.0)))
    size = np.exp(_log_comb(n, k) - k * rho + log_cdf)
    terms = np.where(k % 2 == 0, size, -size)
    return math.fsum(terms.tolist()), float(size.sum())


def sum_truncexp_cdf(law: TruncatedExpLaw, n: int, t: float) -> float:
    """P(S_n <= t) for the sum of n independent truncated exponentials."""
    if n < 1:
        raise ValidationError(f"n must be >= 1, got {n!r}")
    if t <= 0.0:
        return 0.0
    if t >= n * law.alpha:
        return 1.0
    value = _scaled_sum_cdf(law.lam, law.alpha, n, t)[0] / law.mass**n
    return min(max(value, 0.0), 1.0)


def _scaled_sum_pdf(lam: float, alpha: float, n: int, x: float) -> tuple[float, float]:
    """q^n f_{S_n}(x) for 0 < x < n alpha, and the sum of the absolute terms."""
    rho = lam * alpha
    k = np.arange(0, min(n, int(x // alpha)) + 1)
    y = np.maximum(x - k * alpha, 0.0)
    with np.errstate(divide="ignore"):
        log_gamma_pdf = np.where(
            y > 0, math.log(lam) + (n - 1) * np.log(lam * y) - lam * y - gammaln(n), -np.inf
        )
    size = np.exp(_log_comb(n, k) - k * rho + log_gamma_pdf)
    terms = np.where(k % 2 == 0, size, -size)
    return math.fsum(terms.tolist()), float(size.sum())


def sum_truncexp_pdf(law: TruncatedExpLaw, n: int, t: float) -> float:
    """Density of S_n at t (right limit at the jump points of n = 1)."""
    if n < 1:
        raise ValidationError(f"n must be >= 1, got {n!r}")
    if n == 1:
        return law.pdf(t) if t < law.alpha else 0.0
    if t <= 0.0 or t >= n * law.alpha:
        return 0.0
    return max(_scaled_sum_pdf(law.lam, law.alpha, n, t)[0] / law.mass**n, 0.0)


def busy_atom(params: QueueParams) -> tuple[float, float]:
    """Location and mass of the single-customer busy period."""
    return params.alpha, math.exp(-params.rho)


def _mixture_terms(params: QueueParams, tol: float) -> int:
    n = terms_for_tol(params.rho, tol)
    if n > MAX_MIXTURE_TERMS:
        raise ResourceError(
            f"rho = {params.rho:g} needs {n} mixture terms (cap {MAX_MIXTURE_TERMS}); "
            "use busy_cdf_delay"
        )
    return n


def _busy_cdf_exact(params: QueueParams, t: float, tol: float) -> SeriesResult:
    lam, alpha, rho = params.lam, params.alpha, params.rho
    n_max = _mixture_terms(params, tol)
    q = -math.expm1(-rho)
    truncation = q ** (n_max + 1)
    x = t - alpha
    if x < 0.0:
        return SeriesResult(0.0, n_max, truncation)
    e_minus = math.exp(-rho)
    # weight_n / q^n = e^{-rho}, so scaled sums need no further division
    parts = [e_minus]
    sizes = []
    for n in range(1, n_max + 1):
        if x >= n * alpha:
            parts.append(e_minus * q**n)
        elif x > 0.0:
            value, size = _scaled_sum_cdf(lam, alpha, n, x)
            parts.append(e_minus * value)
            sizes.append(size)
    value = min(max(math.fsum(parts), 0.0), 1.0)
    rounding = _TERM_REL_ERROR * e_minus * math.fsum(sizes)
    return SeriesResult(value, n_max, truncation, rounding_error=rounding)


def _density_grid(params: QueueParams, x_max: float, step: float, n_max: int) -> np.ndarray:
    """Continuous busy-period density beyond the atom, excluding the
    single-gap term, on the grid 0, step, ..., via trapezoid convolution.

    Jump points of the truncated density sit on grid nodes and carry the
    average of the one-sided limits, which keeps the composite rule second
    order across the jump.
    """
    lam, alpha, rho = params.lam, params.alpha, params.rho
    q = -math.expm1(-rho)
    m = int(math.ceil(x_max / step - 1e-9))
    x = np.arange(m + 1) * step
    jump = int(round(alpha / step))
    f1 = np.where(x < alpha, lam * np.exp(-lam * x) / q, 0.0)
    if jump <= m:
        f1[jump] = 0.5 * lam * math.exp(-rho) / q
    f1_support = f1[: min(jump, m) + 1]

    density = np.zeros(m + 1)
    fn = f1.copy()
    e_minus = math.exp(-rho)
    for n in range(2, n_max + 1):
        conv = fftconvolve(f1_support, fn)[: m + 1]
        if conv.size < m + 1:
            conv = np.pad(conv, (0, m + 1 - conv.size))
        fn = step * conv - 0.5 * step * (f1[0] * fn + f1 * fn[0])
        if jump <= m:
            fn[min(n * jump, m + 1) :] = 0.0
        np.maximum(fn, 0.0, out=fn)
        fn[0] = 0.0
        density += e_minus * q**n * fn
    return density


def _grid_values(params: QueueParams, xs: list[float], step: float, n_max: int) -> np.ndarray:
    """Continuous mass of S_n, n >= 2, accumulated up to each x (weighted)."""
    density = _density_grid(params, max(xs + [step]), step, n_max)
    cumulative = np.concatenate(([0.0], np.cumsum(0.5 * step * (density[1:] + density[:-1]))))
    out = np.zeros(len(xs))
    for i, x in enumerate(xs):
        if x <= 0.0:
            continue
        j = min(int(x // step), density.size - 1)
        frac = x - j * step
        if frac > 0.0 and j + 1 < density.size:
            right = density[j] + (density[j + 1] - density[j]) * frac / step
            out[i] = cumulative[j] + 0.5 * frac * (density[j] + right)
        else:
            out[i] = cumulative[j]
    return out


def busy_cdf_grid(
    params: QueueParams,
    ts: Iterable[float],
    tol: float = DEFAULT_TOL,
    step: float | None = None,
    extrapolate: bool = True,
) -> list[SeriesResult]:
    """B(t) for many t on one shared convolution grid.

    The one-gap term is integrated in closed form; all others are convolved
    numerically and integrated with the cumulative trapezoid rule. With
    ``extrapolate`` the grid is also run at half the step and the two
    second-order results are combined as ``(4 fine - coarse) / 3``.
    ``step`` must divide ``alpha``.
    """
    tol = _check_tol(tol)
    ts = [float(t) for t in ts]
    lam, alpha, rho = params.lam, params.alpha, params.rho
    if step is None:
        step = alpha / DEFAULT_GRID_DIVISIONS
    if not step > 0.0:
        raise ValidationError(f"grid step must be positive, got {step!r}")
    divisions = alpha / step
    if abs(divisions - round(divisions)) > 1e-9 * divisions:
        raise ValidationError(f"grid step {step!r} does not divide alpha = {alpha!r}")
    n_max = _mixture_terms(params, tol)
    q = -math.expm1(-rho)
    truncation = q ** (n_max + 1)
    e_minus = math.exp(-rho)
    xs = [t - alpha for t in ts]
    mass = _grid_values(params, xs, step, n_max)
    if extrapolate:
        fine = _grid_values(params, xs, 0.5 * step, n_max)
        mass = (4.0 * fine - mass) / 3.0

    results = []
    for x, extra in zip(xs, mass):
        if x < 0.0:
            value = 0.0
        else:
            one_gap = e_minus * -math.expm1(-lam * min(x, alpha)) if n_max >= 1 else 0.0
            value = math.fsum([e_minus, one_gap, float(extra)])
        results.append(SeriesResult(min(max(value, 0.0), 1.0), n_max, truncation, step))
    return results


def busy_cdf(
    params: QueueParams,
    t: float,
    tol: float = DEFAULT_TOL,
    method: Literal["exact", "grid"] = "exact",
    step: float | None = None,
    extrapolate: bool = True,
) -> SeriesResult:
    """B(t) from the geometric mixture, truncated so the neglected weight is
    at most tol / 2.

    When the estimated cancellation error of the exact path exceeds tol / 2
    it tries the delay expansion, and failing that the grid; a grid result
    carries a ``grid_step``.
    """
    tol = _check_tol(tol)
    t = float(t)
    if method == "exact":
        res = _busy_cdf_exact(params, t, tol)
        if res.rounding_error <= 0.5 * tol:
            return res
        value, size = _delay_sum(params, t)
        rounding = _TERM_REL_ERROR * size
        if rounding <= 0.5 * tol:
            return SeriesResult(min(max(value, 0.0), 1.0), res.terms_used, res.truncation_error, rounding_error=rounding)
        return busy_cdf_grid(params, [t], tol, step, extrapolate)[0]
    if method == "grid":
        return busy_cdf_grid(params, [t], tol, step, extrapolate)[0]
    raise ValidationError(f"unknown series method {method!r}")


def busy_pdf_continuous(params: QueueParams, t: float, tol: float = DEFAULT_TOL) -> SeriesResult:
    """Density of the continuous part of B at t (zero at and below alpha)."""
    tol = _check_tol(tol)
    lam, alpha, rho = params.lam, params.alpha, params.rho
    n_max = _mixture_terms(params, tol)
    q = -math.expm1(-rho)
    truncation = q ** (n_max + 1)
    x = t - alpha
    if x <= 0.0:
        return SeriesResult(0.0, n_max, truncation)
    e_minus = math.exp(-rho)
    one_gap = e_minus * lam * math.exp(-lam * x) if n_max >= 1 and x < alpha else 0.0
    parts = [one_gap]
    sizes = []
    for n in range(2, n_max + 1):
        if x < n * alpha:
            value, size = _scaled_sum_pdf(lam, alpha, n, x)
            parts.append(e_minus * value)
            sizes.append(size)
    rounding = _TERM_REL_ERROR * e_minus * math.fsum(sizes)
    if rounding <= 0.5 * tol:
        return SeriesResult(max(math.fsum(parts), 0.0), n_max, truncation, rounding_error=rounding)
    step = alpha / DEFAULT_GRID_DIVISIONS
    rest = (4.0 * _grid_density_at(params, x, 0.5 * step, n_max) - _grid_density_at(params, x, step, n_max)) / 3.0
    return SeriesResult(max(one_gap + rest, 0.0), n_max, truncation, grid_step=step)


def _grid_density_at(params: QueueParams, x: float, step: float, n_max: int) -> float:
    density = _density_grid(params, x + 2.0 * step, step, n_max)
    j = int(x // step)
    frac = x / step - j
    return float(density[j] + (density[j + 1] - density[j]) * frac)


def _delay_sum(params: QueueParams, t: float) -> tuple[float, float]:
    """Delay expansion at t >= alpha and the sum of its absolute terms."""
    lam, alpha, rho = params.lam, params.alpha, params.rho
    k_max = int(math.floor(t / alpha - 1.0))
    while k_max >= 0 and t - (k_max + 1) * alpha <= 0.0:
        k_max -= 1
    if k_max < 0:
        return math.exp(-rho), math.exp(-rho)
    k = np.arange(k_max + 1)
    ly = lam * (t - (k + 1) * alpha)
    size = np.exp(k * np.log(ly) - (k + 1) * rho - gammaln(k + 1) + np.log1p(ly / (k + 1)))
    terms = np.where(k % 2 == 0, size, -size)
    return math.fsum(terms.tolist()), float(size.sum())


def busy_cdf_delay(params: QueueParams, t: float) -> float:
    """B(t) from the finite delay expansion

        B(t) = sum_k (-lam)^k e^{-(k+1) rho}
               [y_k^k / k! + lam y_k^(k+1) / (k+1)!],   y_k = t - (k+1) alpha > 0,

    i.e. the transform expanded in powers of e^{-s alpha} and inverted term
    by term. The alternating sum loses about lam t e^{-rho} / ln(10) digits.
    """
    t = float(t)
    if t < params.alpha:
        return 0.0
    return min(max(_delay_sum(params, t)[0], 0.0), 1.0)


def mixed_cdf(params: QueueParams, tol: float = DEFAULT_TOL) -> MixedCdf:
    """The busy-period law as an atom plus a continuous part."""
    location, mass = busy_atom(params)
    n_max = _mixture_terms(params, tol)

    def continuous(t: float) -> float:
        return max(busy_cdf(params, t, tol).value - mass, 0.0) if t >= location else 0.0

    return MixedCdf(
        atom_location=location,
        atom_mass=mass,
        continuous_part=continuous,
        support_lower=location,
        truncation_error=(-math.expm1(-params.rho)) ** (n_max + 1),
    )


def quantile(params: QueueParams, p: float, tol: float = 1e-9) -> float:
    """Smallest t with B(t) >= p, by bisection on the exact series."""
    p = float(p)
    if not 0.0 < p < 1.0:
        raise ValidationError(f"p must lie in (0, 1), got {p!r}")
    tol = _check_tol(tol)
    alpha = params.alpha
    if p <= math.exp(-params.rho):
        return alpha
    series_tol = min(DEFAULT_TOL, tol)

    def cdf(t: float) -> float:
        return busy_cdf(params, t, series_tol).value

    lo, hi = alpha, 2.0 * alpha
    while cdf(hi) < p:
        lo, hi = hi, 2.0 * hi
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if cdf(mid) >= p:
            hi = mid
        else:
            lo = mid
    return hi
