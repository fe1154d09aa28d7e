"""Acceptance criteria, each checked at its stated tolerance.

Every criterion is one test; its sub-checks are all evaluated and the
failing ones are listed in the terminal summary, one PASS/FAIL line per
criterion. "k significant figures" means a relative error of at most
5 * 10^-k, "k decimal places" an absolute error of at most 5 * 10^-(k+1).
"""

import math
import time

import numpy as np
import pytest

from mdbusy import bounds, inversion, make_params, moments, reference, series, simulator
from mdbusy.transform import bbar, bbar_via_general


class Checks:
    def __init__(self):
        self.failures = []

    def check(self, ok: bool, label: str) -> None:
        if not ok:
            self.failures.append(label)

    def sig_figs(self, got: float, want: float, figures: int, label: str) -> None:
        rel = abs(got - want) / abs(want)
        self.check(rel <= 5 * 10.0**-figures, f"{label}: got {got!r}, want {want!r} (rel {rel:.2g})")

    def decimals(self, got: float, want: float, places: int, label: str) -> None:
        # a hair of slack for binary rounding of the printed decimal
        err = abs(got - want)
        self.check(err <= 5 * 10.0 ** -(places + 1) * (1 + 1e-9), f"{label}: got {got!r}, want {want!r} (abs {err:.2g})")

    def runtime(self, seconds: float, limit: float, label: str) -> None:
        self.check(seconds < limit, f"{label}: {seconds:.2f} s, limit {limit:g} s")


def finish(criterion, number, title, checks):
    criterion(number, title, checks.failures)
    assert not checks.failures, "; ".join(checks.failures)


def test_criterion_1_variation_coefficient(criterion):
    c = Checks()
    start = time.perf_counter()
    values = {rho: moments.variation_coeff(rho) for rho in reference.VARIATION_COEFF}
    c.runtime(time.perf_counter() - start, 1.0, "runtime")
    for rho in (0.5, 1.0, 10.0):
        c.sig_figs(values[rho], reference.VARIATION_COEFF[rho], 8, f"rho={rho:g}")
    for rho in (20.0, 50.0, 100.0):
        v = values[rho]
        c.check(0.99999999 <= v < 1.0, f"rho={rho:g}: got {v!r}, want >= .99999999 and < 1")
    finish(criterion, 1, "variation coefficient table", c)


def test_criterion_2_shape_coefficients(criterion):
    c = Checks()
    start = time.perf_counter()
    b1 = {rho: moments.beta1(rho) for rho in (0.5, 1.0, 10.0)}
    b2 = {rho: moments.beta2(rho) for rho in (0.5, 1.0, 10.0)}
    c.runtime(time.perf_counter() - start, 1.0, "runtime")
    for rho in (0.5, 1.0):
        c.sig_figs(b1[rho], reference.BETA1[rho], 7, f"beta1 rho={rho:g}")
        c.sig_figs(b2[rho], reference.BETA2[rho], 7, f"beta2 rho={rho:g}")
    c.check(abs(b1[10.0] - 4) <= 1e-6, f"beta1 rho=10: got {b1[10.0]!r}")
    c.check(abs(b2[10.0] - 9) <= 1e-6, f"beta2 rho=10: got {b2[10.0]!r}")
    finish(criterion, 2, "asymmetry and kurtosis tables", c)


def test_criterion_3_exact_mean_variance(criterion):
    c = Checks()
    for block in reference.CDF_BLOCKS:
        params = make_params(block.lam, block.alpha)
        c.sig_figs(moments.mean(params), block.exact_mean, 9, f"mean alpha={block.alpha:g}")
        c.sig_figs(moments.variance(params), block.exact_variance, 9, f"variance alpha={block.alpha:g}")
    finish(criterion, 3, "exact mean and variance", c)


def test_criterion_4_bound_columns(criterion):
    c = Checks()
    for block in reference.CDF_BLOCKS:
        params = make_params(block.lam, block.alpha)
        for row in block.rows:
            label = f"alpha={block.alpha:g} t={row.t:g}"
            c.decimals(bounds.chebyshev_lower(params, row.t).value, row.chebyshev_lower, 6, f"B1 {label}")
            c.decimals(bounds.envelope(params, row.t)[0], row.envelope_lower, 6, f"B2 {label}")
    finish(criterion, 4, "Chebyshev and envelope bound columns", c)


def test_criterion_5_inversion_contract(criterion):
    c = Checks()
    for block in reference.CDF_BLOCKS:
        params = make_params(block.lam, block.alpha)
        config = inversion.PabConfig(block.delta_a, block.delta_p, l=3)
        ts = [row.t for row in block.rows]
        results = inversion.tail_many(params, config, ts)
        for row, res in zip(block.rows, results):
            label = f"alpha={block.alpha:g} t={row.t:g}"
            lo, hi = inversion.contract_interval(params, config, row.t)
            c.check(lo <= res.tau <= hi, f"contract {label}: tau {res.tau:.7f} outside [{lo:.7f}, {hi:.7f}]")
            # both values carry the same slack, so they may differ by the width
            gap = abs((1.0 - res.tau) - row.pab)
            c.check(
                gap <= hi - lo,
                f"published B_c {label}: {row.pab} vs computed {1 - res.tau:.6f}, "
                f"gap {gap:.4g} exceeds band width {hi - lo:.4g}",
            )
    for alpha, da, dp in ((3.0, 0.5, 0.01), (1.0, 0.1, 0.001)):
        params = make_params(1.0, alpha)
        config = inversion.PabConfig(da, dp)
        start = time.perf_counter()
        res = inversion.tail_result(params, config, 2 * alpha)
        elapsed = time.perf_counter() - start
        c.check(1e4 <= res.terms_summed <= 3e4, f"alpha={alpha:g}: N = {res.terms_summed}")
        c.runtime(elapsed, 1.0, f"runtime per point alpha={alpha:g}")
    finish(criterion, 5, "inversion accuracy/precision contract", c)


@pytest.mark.slow
def test_criterion_6_simulation_consistency(criterion):
    c = Checks()
    start = time.perf_counter()
    n = 1_000_000
    for seed, rho in enumerate((0.5, 1.0, 3.0)):
        params = make_params(1.0, rho)
        summary = simulator.run(params, simulator.SimConfig(n, seed=1000 + seed))
        mean, sd = moments.mean(params), math.sqrt(moments.variance(params))
        grid = np.linspace(rho, mean + 4 * sd, 20)
        worst = max(abs(series.busy_cdf(params, t).value - summary.cdf(t)) for t in grid)
        c.check(worst <= 0.002, f"rho={rho:g}: max CDF gap {worst:.4g}")
        z = (summary.mean - math.expm1(rho)) / summary.std_error_mean
        c.check(abs(z) <= 4, f"rho={rho:g}: mean off by {z:.2f} SE")
        p = math.exp(-rho)
        z_atom = (summary.atom_fraction - p) / math.sqrt(p * (1 - p) / n)
        c.check(abs(z_atom) <= 3, f"rho={rho:g}: atom fraction off by {z_atom:.2f} SE")
    c.runtime(time.perf_counter() - start, 30.0, "runtime")
    finish(criterion, 6, "simulation against series and moments", c)


def test_criterion_7_transform_identities(criterion):
    c = Checks()
    for rho in (0.1, 1.0, 3.0):
        params = make_params(1.0, rho)
        c.check(bbar(params, 0) == 1, f"bbar(0) != 1 at rho={rho:g}")
        worst = 0.0
        for sigma in np.linspace(0.0, 5.0, 10):
            for omega in np.linspace(-100.0, 100.0, 100):
                s = complex(sigma, omega)
                a, b = bbar(params, s), bbar_via_general(params, s)
                worst = max(worst, abs(a - b) / abs(b))
        c.check(worst <= 1e-11, f"rho={rho:g}: general route differs by {worst:.2g} relative")
    params = make_params(1.0, 1.0)
    h = 1e-6
    slope = -(bbar(params, h) - bbar(params, 0)).real / h
    rel = abs(slope - moments.mean(params)) / moments.mean(params)
    c.check(rel <= 1e-5, f"finite-difference mean off by {rel:.2g} relative")
    finish(criterion, 7, "transform identities", c)


def test_criterion_8_structural_properties(criterion):
    c = Checks()
    tol = series.DEFAULT_TOL
    for rho in (0.5, 1.0, 3.0):
        params = make_params(1.0, rho)
        mean, sd = moments.mean(params), math.sqrt(moments.variance(params))
        ts = np.linspace(0.0, mean + 8 * sd, 200)
        values = [series.busy_cdf(params, t).value for t in ts]
        c.check(all(b >= a for a, b in zip(values, values[1:])), f"rho={rho:g}: CDF not monotone")
        at = series.busy_cdf(params, rho).value
        c.check(series.busy_cdf(params, rho * (1 + 1e-12)).value - at <= 1e-9, f"rho={rho:g}: not right-continuous at alpha")
        c.check(abs(at - series.busy_cdf(params, np.nextafter(rho, 0)).value - math.exp(-rho)) <= 1e-12, f"rho={rho:g}: atom jump")
        for t, v in zip(ts, values):
            lower, upper = bounds.envelope(params, t)
            c.check(lower <= v <= upper, f"rho={rho:g} t={t:g}: envelope violated")
            cheb = bounds.chebyshev_lower(params, t)
            if cheb.valid:
                c.check(cheb.value <= v, f"rho={rho:g} t={t:g}: Chebyshev bound above the CDF")
        for p in np.linspace(1e-6, math.exp(-rho), 25):
            c.check(series.quantile(params, p) == rho, f"rho={rho:g} p={p:g}: quantile is not alpha")
        grid_ts = np.linspace(rho, mean + 6 * sd, 40)
        coarse = series.busy_cdf_grid(params, grid_ts, step=rho / 1000)
        fine = series.busy_cdf_grid(params, grid_ts, step=rho / 2000)
        gap = max(abs(a.value - b.value) for a, b in zip(coarse, fine))
        c.check(gap < tol, f"rho={rho:g}: grid halving moves the CDF by {gap:.2g}")
    finish(criterion, 8, "structural properties of the series CDF", c)
