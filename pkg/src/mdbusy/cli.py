"""Command-line interface.

Usage:
    mdbusy moments --lambda 1 --alpha 1
    mdbusy cdf --lambda 1 --alpha 0.1 --t 0.11,0.15 --delta-a 0.001 --delta-p 0.001 --method all
    mdbusy table 4 --format csv
    mdbusy simulate --lambda 1 --alpha 1 --n 1000000 --seed 42

Exit codes: 0 success, 2 validation, 3 numeric range, 4 resource cap,
5 cross-method inconsistency.
"""

from __future__ import annotations

import argparse
import math
import sys
from typing import Sequence

import numpy as np
from scipy.integrate import trapezoid

from mdbusy import bounds, inversion, moments, reference, series, simulator
from mdbusy.errors import (
    ConsistencyError,
    RangeError,
    ResourceError,
    SingularityError,
    ValidationError,
)
from mdbusy.model import QueueParams, make_params
from mdbusy.records import FORMATS, quantize, render, uniform

__all__ = ["build_parser", "main"]

EXIT_OK = 0
EXIT_VALIDATION = 2
EXIT_RANGE = 3
EXIT_RESOURCE = 4
EXIT_INCONSISTENT = 5

SCHEMA = "mdbusy.{}.v1"


class _Usage(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # argparse would exit(2) itself
        raise _Usage(message)


def _t_list(text: str) -> list[float]:
    try:
        return [float(x) for x in text.split(",") if x.strip()]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"bad time list {text!r}") from exc


def _echo(params: QueueParams) -> dict:
    return {"lambda": params.lam, "alpha": params.alpha, "rho": params.rho}


# Quantities known to be strictly below 1; rounding must not lift them to 1.
_BELOW_ONE = ("variation_coeff",)


def _quantize_record(record: dict, digits: int) -> dict:
    out = {k: quantize(v, digits) for k, v in record.items()}
    for key, raw in record.items():
        capped = key in _BELOW_ONE or (key == "value" and record.get("quantity") in _BELOW_ONE)
        if capped and isinstance(raw, float) and raw < 1.0 <= out[key]:
            out[key] = float("0." + "9" * digits)
    return out


def _emit(records: list[dict], args) -> None:
    records = uniform([_quantize_record(r, args.digits) for r in records])
    sys.stdout.write(render(records, args.format, args.digits))


# -- moments ---------------------------------------------------------------


def _moment_records(params: QueueParams, max_order: int) -> list[dict]:
    rep_raw = moments.raw_moments(params, max_order, allow_high_order=True)
    base = {"schema": SCHEMA.format("moments"), **_echo(params)}
    asym = moments.is_asymptotic(params.rho)
    shape_method = "asymptotic" if asym else "recursion"
    rows = [
        ("mean", moments.mean(params), "closed_form"),
        ("variance", moments.variance(params), "closed_form"),
        ("variation_coeff", moments.variation_coeff(params.rho), "asymptotic" if asym else "closed_form"),
    ]
    for name, fn in (("beta1", moments.beta1), ("beta2", moments.beta2)):
        try:
            rows.append((name, fn(params.rho), shape_method))
        except ValidationError:
            rows.append((name, None, "unavailable"))
    rows += [(f"raw_{n}", v, "recursion") for n, v in enumerate(rep_raw, start=1)]
    return [{**base, "quantity": q, "value": v, "method": m} for q, v, m in rows]


def cmd_moments(args) -> int:
    params = make_params(args.lam, args.alpha)
    if args.max_order > moments.MAX_SAFE_ORDER and not args.allow_high_order:
        raise ValidationError(
            f"--max-order above {moments.MAX_SAFE_ORDER} needs --allow-high-order"
        )
    _emit(_moment_records(params, args.max_order), args)
    return EXIT_OK


# -- cdf -------------------------------------------------------------------


def _cdf_records(params: QueueParams, ts: list[float], method: str, config, tol: float):
    want_series = method in ("series", "all")
    want_pab = method in ("pab", "all")
    want_bounds = method in ("bounds", "all")
    rows = [{"schema": SCHEMA.format("cdf"), **_echo(params), "t": t} for t in ts]
    violations = []

    if want_series:
        for row, t in zip(rows, ts):
            res = series.busy_cdf(params, t, tol)
            row["series"] = res.value
            row["series_truncation"] = res.truncation_error

    if want_pab:
        pab_ts = [t for t in ts if t >= params.alpha]
        estimates = dict(zip(pab_ts, inversion.cdf_many(params, config, pab_ts, oracle=method == "all")))
        for row, t in zip(rows, ts):
            if t in estimates:
                est = estimates[t]
                row["pab"] = est.value
                row["pab_band_lower"], row["pab_band_upper"] = est.error_band
                row["pab_source"] = "pab"
            else:
                # below the support the series answer is exact
                row["pab"] = 0.0
                row["pab_band_lower"] = row["pab_band_upper"] = 0.0
                row["pab_source"] = "series"
            if method == "all" and t in estimates:
                lo, hi = inversion.contract_interval(params, config, t)
                tau = 1.0 - estimates[t].value
                ok = lo - 1e-12 <= tau <= hi + 1e-12
                row["contract_ok"] = ok
                if not ok:
                    violations.append(t)
            elif method == "all":
                row["contract_ok"] = True

    if want_bounds:
        for row, t in zip(rows, ts):
            cheb = bounds.chebyshev_lower(params, t)
            row["chebyshev_lower"] = cheb.value
            row["chebyshev_valid"] = cheb.valid
            row["envelope_lower"], row["envelope_upper"] = bounds.envelope(params, t)
            row["exp_approx"] = bounds.exp_approx(params, t)
    return rows, violations


def cmd_cdf(args) -> int:
    params = make_params(args.lam, args.alpha)
    ts = [t for chunk in args.t for t in chunk]
    if not ts:
        raise ValidationError("--t needs at least one time")
    for t in ts:
        if not math.isfinite(t):
            raise ValidationError(f"t must be finite, got {t!r}")
    config = None
    if args.method in ("pab", "all"):
        config = inversion.PabConfig(args.delta_a, args.delta_p, args.l, args.max_terms)
    rows, violations = _cdf_records(params, ts, args.method, config, args.tol)
    _emit(rows, args)
    if args.method in ("bounds", "all") and params.rho <= bounds.EXP_APPROX_RHO:
        print(
            f"note: exp_approx is reliable only for rho > {bounds.EXP_APPROX_RHO:g}",
            file=sys.stderr,
        )
    if violations:
        raise ConsistencyError(
            f"inversion result outside its accuracy/precision guarantee at t = {violations}"
        )
    return EXIT_OK


# -- table -----------------------------------------------------------------


def _shape_table(which: int) -> list[dict]:
    fn, ref, name = {
        1: (moments.variation_coeff, reference.VARIATION_COEFF, "variation_coeff"),
        2: (moments.beta1, reference.BETA1, "beta1"),
        3: (moments.beta2, reference.BETA2, "beta2"),
    }[which]
    return [
        {
            "schema": SCHEMA.format(f"table{which}"),
            "rho": rho,
            name: fn(rho),
            "method": "asymptotic" if moments.is_asymptotic(rho) else "exact",
            "reference": value,
        }
        for rho, value in ref.items()
    ]


def _moments_from_cdf(params: QueueParams, grid: np.ndarray, values: np.ndarray) -> tuple[float, float]:
    """Mean and variance of a law supported on [alpha, grid[-1]] from its
    distribution function on ``grid`` (which starts at alpha)."""
    survival = 1.0 - values
    alpha = params.alpha
    first = alpha + trapezoid(survival, grid)
    second = alpha * alpha + trapezoid(2.0 * grid * survival, grid)
    return float(first), float(second - first * first)


def _table4() -> list[dict]:
    records = []
    for block in reference.CDF_BLOCKS:
        params = make_params(block.lam, block.alpha)
        config = inversion.PabConfig(block.delta_a, block.delta_p)
        base = {
            "schema": SCHEMA.format("table4"),
            **_echo(params),
            "delta_a": block.delta_a,
            "delta_p": block.delta_p,
        }
        ts = [row.t for row in block.rows]
        estimates = inversion.cdf_many(params, config, ts)
        for row, est in zip(block.rows, estimates):
            cheb = bounds.chebyshev_lower(params, row.t)
            records.append({
                **base,
                "record": "row",
                "t": row.t,
                "t_listed": row.t_listed,
                "chebyshev_lower": cheb.value,
                "envelope_lower": bounds.envelope(params, row.t)[0],
                "pab": est.value,
                "pab_band_lower": est.error_band[0],
                "pab_band_upper": est.error_band[1],
                "series": series.busy_cdf(params, row.t).value,
                "reference_chebyshev_lower": row.chebyshev_lower,
                "reference_envelope_lower": row.envelope_lower,
                "reference_pab": row.pab,
            })

        # moments recovered from the inverted distribution function, with
        # the atom e^{-rho} placed at alpha
        mean, var = moments.mean(params), moments.variance(params)
        grid = np.linspace(params.alpha, mean + 12.0 * math.sqrt(var), 401)
        values = np.array([e.value for e in inversion.cdf_many(params, config, grid[1:], oracle=False)])
        values = np.concatenate(([math.exp(-params.rho)], values))
        pab_mean, pab_var = _moments_from_cdf(params, grid, values)
        for name, exact, computed, ref_computed in (
            ("mean", mean, pab_mean, block.computed_mean),
            ("variance", var, pab_var, block.computed_variance),
        ):
            records.append({
                **base,
                "record": "summary",
                "quantity": name,
                "closed_form": exact,
                "pab": computed,
                "pab_rel_error": abs(computed - exact) / exact,
                "reference_closed_form": block.exact_mean if name == "mean" else block.exact_variance,
                "reference_pab": ref_computed,
            })
    return records


def cmd_table(args) -> int:
    records = _shape_table(args.which) if args.which in (1, 2, 3) else _table4()
    _emit(records, args)
    return EXIT_OK


# -- simulate --------------------------------------------------------------


def cmd_simulate(args) -> int:
    params = make_params(args.lam, args.alpha)
    config = simulator.SimConfig(args.n, args.seed, args.workers)
    samples = simulator.sample(params, config)
    summary = simulator.summarize(params, samples)
    if args.dump:
        simulator.dump_samples(samples, args.dump)
    record = {
        "schema": SCHEMA.format("simulate"),
        **_echo(params),
        "method": "simulation",
        "n": summary.n,
        "seed": args.seed,
        "mean": summary.mean,
        "variance": summary.variance,
        "std_error_mean": summary.std_error_mean,
        "atom_fraction": summary.atom_fraction,
        "closed_form_mean": moments.mean(params),
        "closed_form_variance": moments.variance(params),
        "atom_mass": math.exp(-params.rho),
        "dump": args.dump,
    }
    _emit([record], args)
    return EXIT_OK


# -- wiring ----------------------------------------------------------------


def _add_common(p: argparse.ArgumentParser, params: bool = True) -> None:
    if params:
        p.add_argument("--lambda", dest="lam", type=float, required=True, help="arrival rate")
        p.add_argument("--alpha", type=float, required=True, help="service time")
    p.add_argument("--format", choices=FORMATS, default="pretty")
    p.add_argument("--digits", type=int, default=9, help="significant digits (0 = full)")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="mdbusy", description="M|D|infinity busy-period distribution")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("moments", help="exact moments and shape coefficients")
    _add_common(p)
    p.add_argument("--max-order", type=int, default=moments.DEFAULT_MAX_ORDER)
    p.add_argument("--allow-high-order", action="store_true")
    p.set_defaults(func=cmd_moments)

    p = sub.add_parser("cdf", help="distribution function by several methods")
    _add_common(p)
    p.add_argument("--t", type=_t_list, action="append", required=True, help="comma-separated times")
    p.add_argument("--method", choices=("pab", "series", "bounds", "all"), default="all")
    p.add_argument("--delta-a", type=float, default=0.1, help="accuracy (time units)")
    p.add_argument("--delta-p", type=float, default=0.001, help="precision (probability)")
    p.add_argument("--l", type=int, default=3, help="upper-bracket safety exponent")
    p.add_argument("--max-terms", type=int, default=inversion.DEFAULT_MAX_TERMS)
    p.add_argument("--tol", type=float, default=series.DEFAULT_TOL, help="series tolerance")
    p.set_defaults(func=cmd_cdf)

    p = sub.add_parser("table", help="regenerate a reference table")
    p.add_argument("which", type=int, choices=(1, 2, 3, 4))
    _add_common(p, params=False)
    p.set_defaults(func=cmd_table)

    p = sub.add_parser("simulate", help="Monte Carlo busy periods")
    _add_common(p)
    p.add_argument("--n", type=int, default=100_000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--dump", default=None, help="write raw samples, one per line")
    p.set_defaults(func=cmd_simulate)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return args.func(args)
    except _Usage as exc:
        parser.print_usage(sys.stderr)
        print(f"mdbusy: error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except ValidationError as exc:
        print(f"mdbusy: invalid input: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except (RangeError, SingularityError) as exc:
        print(f"mdbusy: numeric range: {exc}", file=sys.stderr)
        return EXIT_RANGE
    except ResourceError as exc:
        print(f"mdbusy: resource limit: {exc}", file=sys.stderr)
        return EXIT_RESOURCE
    except ConsistencyError as exc:
        print(f"mdbusy: inconsistent results: {exc}", file=sys.stderr)
        return EXIT_INCONSISTENT


if __name__ == "__main__":
    sys.exit(main())
