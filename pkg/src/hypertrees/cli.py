"""Command-line harness exposing every module as a subcommand.

All randomized subcommands take --seed and are bit-reproducible per
seed on a given build; the default seed is the fixed constant 1729.
Commands that loop over trials derive one child generator per trial
from (seed, trial index), so aggregation order cannot change results.

Output goes to stdout or --out, as JSON (default for reports) or CSV
(default for tables; only commands with row-shaped output accept it).
Exit codes: 0 success, 1 validation failure, 2 resource budget
exhausted, 3 acceptance criterion failed.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from typing import Sequence

import numpy as np

from . import acceptance, exact, laplace, model, spectral, threshold
from .errors import (
    BudgetExceededError,
    DomainError,
    HypertreesError,
    ParameterError,
    RejectionLimitError,
)

DEFAULT_SEED = 1729

EXIT_OK = 0
EXIT_VALIDATION = 1
EXIT_BUDGET = 2
EXIT_ACCEPTANCE = 3


class _Parser(argparse.ArgumentParser):
    """argparse exits with status 2 on bad flags; remap to the validation
    code so 2 stays reserved for budget exhaustion."""

    def error(self, message: str):
        self.print_usage(sys.stderr)
        raise _UsageError(message)


class _UsageError(ParameterError):
    pass


# ---------------------------------------------------------------------------
# output plumbing
# ---------------------------------------------------------------------------

def _write(text: str, out: str | None) -> None:
    if out is None:
        sys.stdout.write(text)
        if not text.endswith("\n"):
            sys.stdout.write("\n")
    else:
        with open(out, "w", encoding="utf-8") as handle:
            handle.write(text)


def _emit_json(payload, out: str | None) -> None:
    _write(json.dumps(payload, indent=2), out)


def _emit_rows(rows: list[dict], fmt: str, out: str | None) -> None:
    if fmt == "json":
        _emit_json(rows, out)
        return
    buffer = io.StringIO()
    writer = csv.DictWriter(buffer, fieldnames=list(rows[0].keys()))
    writer.writeheader()
    writer.writerows(rows)
    _write(buffer.getvalue(), out)


def read_rows(path: str, fmt: str) -> list[dict]:
    """Read back an emitted file; CSV values come back as strings."""
    with open(path, encoding="utf-8") as handle:
        if fmt == "json":
            return json.load(handle)
        return [dict(row) for row in csv.DictReader(handle)]


def _require_json_format(fmt: str, command: str) -> None:
    if fmt != "json":
        raise ParameterError(
            f"{command} emits a nested report; only json output is supported"
        )


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------

def _cmd_params(args) -> int:
    params = model.validate_params(args.r, args.s, args.n)
    row = {
        "r": params.r,
        "s": params.s,
        "n": params.n,
        **params.divisibility_report(),
        "admissible": params.admissible,
        "degenerate_pair": (params.r, params.s) == (2, 2),
    }
    _emit_rows([row], args.format, args.out)
    return EXIT_OK if params.admissible else EXIT_VALIDATION


def _cmd_sample(args) -> int:
    _require_json_format(args.format, "sample")
    params = model.validate_params(args.r, args.s, args.n)
    records = []
    for i in range(args.trials):
        rng = np.random.default_rng((args.seed, i))
        if args.simple:
            graph = model.sample_simple_hypergraph(params, rng=rng)
            records.append({"trial": i, **graph.to_json_dict(), "simple": True})
        else:
            config = model.sample_configuration(params, rng=rng)
            graph = model.project(config)
            records.append(
                {
                    "trial": i,
                    **config.to_json_dict(),
                    "edges": [list(e) for e in graph.edges],
                    "simple": model.is_simple(graph),
                }
            )
    payload = {"seed": args.seed, "trials": args.trials, "samples": records}
    _emit_json(payload, args.out)
    return EXIT_OK


def _cmd_census(args) -> int:
    params = model.validate_params(args.r, args.s, args.n)
    orders = range(1, args.jmax + 1)
    rows = []
    for i in range(args.trials):
        rng = np.random.default_rng((args.seed, i))
        config = model.sample_configuration(params, rng=rng)
        census = model.census_cycles(config, args.jmax)
        row = {"trial": i}
        for j in orders:
            row[f"count_{j}"] = census.counts[j]
        rows.append(row)
    if args.format == "csv":
        _emit_rows(rows, "csv", args.out)
        return EXIT_OK
    summary = {
        "r": params.r,
        "s": params.s,
        "n": params.n,
        "seed": args.seed,
        "trials": args.trials,
        "means": {},
        "standard_errors": {},
        "poisson_means": {},
        "rows": rows,
    }
    for j in orders:
        values = np.array([row[f"count_{j}"] for row in rows], dtype=float)
        summary["means"][str(j)] = float(values.mean())
        summary["standard_errors"][str(j)] = (
            float(values.std(ddof=1) / math.sqrt(len(values)))
            if len(values) > 1
            else None
        )
        summary["poisson_means"][str(j)] = float(
            spectral.spectral_pair(params.r, params.s, j).lam
        )
    _emit_json(summary, args.out)
    return EXIT_OK


def _fraction_fields(name: str, value) -> dict:
    return {
        name: f"{value.numerator}/{value.denominator}",
        f"{name}_float": float(value),
    }


def _cmd_exact(args) -> int:
    params = model.validate_params(args.r, args.s, args.n)
    row = {
        "r": params.r,
        "s": params.s,
        "n": params.n,
        "admissible": params.admissible,
        "uniform_trees": exact.count_uniform_trees(args.n, args.s),
    }
    if params.admissible:
        row.update(_fraction_fields("expected_trees", exact.expected_tree_count(params)))
    _emit_rows([row], args.format, args.out)
    return EXIT_OK


def _cmd_moments(args) -> int:
    params = model.validate_params(args.r, args.s, args.n)
    row: dict = {"r": params.r, "s": params.s, "n": params.n, "mode": args.mode}
    mean = exact.expected_tree_count(params)
    row.update(_fraction_fields("mean", mean))
    log_mean = exact.log_fraction(mean)
    if args.mode == "exact":
        second = exact.tree_count_second_moment(params)
        row.update(_fraction_fields("second_moment", second))
        log_second = exact.log_fraction(second)
    else:
        log_second = exact.log_tree_count_second_moment(params)
    row["log_mean"] = log_mean
    row["log_second_moment"] = log_second
    row["ratio"] = math.exp(log_second - 2 * log_mean)
    if threshold.classify(params.r, params.s) is threshold.Phase.SUPERCRITICAL:
        row["limit_ratio"] = spectral.second_moment_ratio(params.r, params.s)
    else:
        row["limit_ratio"] = None
    _emit_rows([row], args.format, args.out)
    return EXIT_OK


def _cmd_threshold(args) -> int:
    report = threshold.rho(args.s)
    if args.format == "csv":
        data = report.to_json_dict()
        bracket = data.pop("bracket")
        data["bracket_lo"], data["bracket_hi"] = bracket
        _emit_rows([data], "csv", args.out)
    else:
        _emit_json(report.to_json_dict(), args.out)
    return EXIT_OK


def _cmd_table(args) -> int:
    if args.signs:
        rows = threshold.sign_table_rows(args.lo, args.hi)
    else:
        rows = threshold.threshold_table_rows(args.lo, args.hi)
    _emit_rows(rows, args.format, args.out)
    return EXIT_OK


def _cmd_laplace(args) -> int:
    _require_json_format(args.format, "laplace")
    point = laplace.stationary_point(args.r, args.s)
    hess = laplace.hessian_phi(point, args.r, args.s)
    payload = {
        "r": args.r,
        "s": args.s,
        "alpha0": point.alpha,
        "beta0": point.beta,
        "phi0_closed": laplace.phi_at_max_closed(args.r, args.s),
        "phi0_direct": laplace.phi(point, args.r, args.s),
        "phi_origin": laplace.phi_at_origin(args.r, args.s),
        "detH0_closed": laplace.neg_hessian_det_closed(args.r, args.s),
        "detH0_numeric": hess[0][0] * hess[1][1] - hess[0][1] * hess[1][0],
        "trace_closed": laplace.hessian_trace_closed(args.r, args.s),
        "trace_numeric": hess[0][0] + hess[1][1],
        "psi_closed": laplace.psi_at_max_closed(args.r, args.s),
        "psi_direct": laplace.psi_weight(point, args.r, args.s),
        "ridge_roots": laplace.ridge_residual_sign_changes(args.r, args.s),
    }
    if args.n is not None:
        payload["prefactors"] = laplace.laplace_prefactors(
            args.r, args.s, args.n
        ).to_json_dict()
    _emit_json(payload, args.out)
    return EXIT_OK


def _cmd_ridge(args) -> int:
    if args.lo <= -1:
        raise ParameterError("ridge grid must start above -1")
    rows = []
    for x in np.linspace(args.lo, args.hi, args.points):
        point = laplace.ridge(float(x), args.r, args.s)
        grad = laplace.grad_phi(point, args.r, args.s)
        rows.append(
            {
                "x": float(x),
                "alpha": point.alpha,
                "beta": point.beta,
                "phi": laplace.phi(point, args.r, args.s),
                "grad_alpha": grad[0],
                "residual": laplace.ridge_equation_residual(float(x), args.r, args.s),
            }
        )
    _emit_rows(rows, args.format, args.out)
    return EXIT_OK


def _cmd_wdist(args) -> int:
    _require_json_format(args.format, "wdist")
    j_start = args.jstart
    j_max = args.jmax
    if j_max is None:
        j_max, _ = spectral.select_j_max(args.r, args.s)
    samples = spectral.sample_limit_batch(
        args.r, args.s, args.trials, j_start=j_start, j_max=j_max, seed=args.seed
    )
    squares = samples * samples
    payload = {
        "r": args.r,
        "s": args.s,
        "trials": args.trials,
        "seed": args.seed,
        "j_start": j_start,
        "j_max": j_max,
        "mean": float(samples.mean()),
        "second_moment": float(squares.mean()),
        "zero_fraction": float((samples == 0).mean()),
        "quantiles": {
            f"p{int(100 * q):02d}": float(np.quantile(samples, q))
            for q in (0.01, 0.1, 0.25, 0.5, 0.75, 0.9, 0.99)
        },
    }
    if j_start == 1:
        conditions = spectral.variance_sum_preconditions(args.r, args.s)
        if all(conditions.values()):
            payload["limit_second_moment"] = spectral.variance_sum(args.r, args.s).value
    _emit_json(payload, args.out)
    return EXIT_OK


def _mc_run(args, n: int, order_index: int) -> dict:
    params = model.validate_params(args.r, args.s, n)
    counts = {j: [] for j in range(1, args.jmax + 1)}
    simple = 0
    connected = 0
    with_tree = 0
    censored = 0
    decided = 0
    for i in range(args.trials):
        rng = np.random.default_rng((args.seed, order_index, i))
        config = model.sample_configuration(params, rng=rng)
        census = model.census_cycles(config, args.jmax)
        for j in counts:
            counts[j].append(census.counts[j])
        graph = model.project(config)
        connected += model.is_connected(graph)
        if model.is_simple(graph):
            simple += 1
            try:
                with_tree += model.has_spanning_tree(graph, budget=args.budget)
                decided += 1
            except BudgetExceededError:
                censored += 1
    summary = {
        "r": params.r,
        "s": params.s,
        "n": params.n,
        "seed": args.seed,
        "trials": args.trials,
        "cycle_means": {},
        "cycle_standard_errors": {},
        "simple_rate": simple / args.trials,
        "connected_rate": connected / args.trials,
        "spanning_tree_rate": (with_tree / decided) if decided else None,
        "spanning_tree_censored": censored,
    }
    for j, values in counts.items():
        arr = np.array(values, dtype=float)
        summary["cycle_means"][str(j)] = float(arr.mean())
        summary["cycle_standard_errors"][str(j)] = (
            float(arr.std(ddof=1) / math.sqrt(len(arr))) if len(arr) > 1 else None
        )
    return summary


def _cmd_mc(args) -> int:
    _require_json_format(args.format, "mc")
    if args.n is not None:
        orders = [args.n]
    else:
        orders = model.admissible_orders(args.r, args.s, 6)
    summaries = [_mc_run(args, n, k) for k, n in enumerate(orders)]
    _emit_json(summaries, args.out)
    return EXIT_OK


def _cmd_verify(args) -> int:
    records = acceptance.run_suite(args.suite)
    rows = [record.to_json_dict() for record in records]
    _emit_rows(rows, args.format, args.out)
    return EXIT_OK if all(record.passed for record in records) else EXIT_ACCEPTANCE


# ---------------------------------------------------------------------------
# parser
# ---------------------------------------------------------------------------

def _add_params_flags(parser, *, need_n: bool = True) -> None:
    parser.add_argument("--r", type=int, required=True, help="vertex degree")
    parser.add_argument("--s", type=int, required=True, help="edge size")
    if need_n:
        parser.add_argument("--n", type=int, required=True, help="vertex count")


def _add_output_flags(parser, default_format: str = "json") -> None:
    parser.add_argument(
        "--format", choices=("json", "csv"), default=default_format,
        help=f"output format (default {default_format})",
    )
    parser.add_argument("--out", help="write output to this path instead of stdout")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(
        prog="hypertrees",
        description=(
            "Spanning trees in random regular uniform hypergraphs: exact "
            "enumeration, simulation, threshold and second-moment tools."
        ),
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("params", help="divisibility report for (r, s, n)")
    _add_params_flags(p)
    _add_output_flags(p)
    p.set_defaults(handler=_cmd_params)

    p = sub.add_parser("sample", help="sample configurations or simple hypergraphs")
    _add_params_flags(p)
    p.add_argument("--seed", type=int, default=DEFAULT_SEED)
    p.add_argument("--trials", type=int, default=1)
    p.add_argument("--simple", action="store_true",
                   help="rejection-sample until the projection is simple")
    _add_output_flags(p)
    p.set_defaults(handler=_cmd_sample)

    p = sub.add_parser("census", help="cycle counts across sampled configurations")
    _add_params_flags(p)
    p.add_argument("--seed", type=int, default=DEFAULT_SEED)
    p.add_argument("--trials", type=int, default=100)
    p.add_argument("--jmax", type=int, default=3, help="largest cycle length")
    _add_output_flags(p)
    p.set_defaults(handler=_cmd_census)

    p = sub.add_parser("exact", help="closed-form tree counts for (r, s, n)")
    _add_params_flags(p)
    _add_output_flags(p)
    p.set_defaults(handler=_cmd_exact)

    p = sub.add_parser("moments", help="exact moments of the spanning-tree count")
    _add_params_flags(p)
    p.add_argument("--mode", choices=("exact", "logfloat"), default="exact",
                   help="exact rational second moment, or log-space floats")
    _add_output_flags(p)
    p.set_defaults(handler=_cmd_moments)

    p = sub.add_parser("threshold", help="solve for the phase boundary at s")
    p.add_argument("--s", type=int, required=True)
    _add_output_flags(p)
    p.set_defaults(handler=_cmd_threshold)

    p = sub.add_parser("table", help="threshold table over a range of s")
    p.add_argument("--lo", type=int, default=5)
    p.add_argument("--hi", type=int, default=12)
    p.add_argument("--signs", action="store_true",
                   help="emit L at the bracket endpoints instead of the roots")
    _add_output_flags(p, default_format="csv")
    p.set_defaults(handler=_cmd_table)

    p = sub.add_parser("laplace", help="stationary-point report for (r, s)")
    _add_params_flags(p, need_n=False)
    p.add_argument("--n", type=int, default=None,
                   help="also evaluate the n-dependent prefactors")
    _add_output_flags(p)
    p.set_defaults(handler=_cmd_laplace)

    p = sub.add_parser("ridge", help="plot-ready sweep along the ridge")
    _add_params_flags(p, need_n=False)
    p.add_argument("--lo", type=float, default=-0.9)
    p.add_argument("--hi", type=float, default=5.0)
    p.add_argument("--points", type=int, default=100)
    _add_output_flags(p, default_format="csv")
    p.set_defaults(handler=_cmd_ridge)

    p = sub.add_parser("wdist", help="sample the limiting tree-count ratio")
    _add_params_flags(p, need_n=False)
    p.add_argument("--seed", type=int, default=DEFAULT_SEED)
    p.add_argument("--trials", type=int, default=100_000)
    p.add_argument("--jstart", type=int, default=1)
    p.add_argument("--jmax", type=int, default=None,
                   help="truncation point; defaults to the tail rule")
    _add_output_flags(p)
    p.set_defaults(handler=_cmd_wdist)

    p = sub.add_parser("mc", help="simulation summary: cycles, simplicity, trees")
    _add_params_flags(p, need_n=False)
    p.add_argument("--n", type=int, default=None,
                   help="vertex count; default runs the six smallest admissible")
    p.add_argument("--seed", type=int, default=DEFAULT_SEED)
    p.add_argument("--trials", type=int, default=100)
    p.add_argument("--jmax", type=int, default=3)
    p.add_argument("--budget", type=int, default=model.DEFAULT_ENUMERATION_BUDGET,
                   help="search budget per spanning-tree decision")
    _add_output_flags(p)
    p.set_defaults(handler=_cmd_mc)

    p = sub.add_parser("verify", help="run an acceptance suite")
    p.add_argument(
        "--suite", default="all",
        help=f"one of {', '.join(acceptance.suite_names() + ['all'])}",
    )
    _add_output_flags(p)
    p.set_defaults(handler=_cmd_verify)

    return parser


def _validate_run_config(args) -> None:
    if getattr(args, "trials", 1) < 1:
        raise ParameterError("trials must be at least 1")
    if getattr(args, "jmax", None) is not None and args.jmax < 1:
        raise ParameterError("jmax must be at least 1")
    if getattr(args, "points", 2) < 2:
        raise ParameterError("a sweep needs at least 2 points")


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        _validate_run_config(args)
        return args.handler(args)
    except (BudgetExceededError, RejectionLimitError) as error:
        print(f"error: {error}", file=sys.stderr)
        return EXIT_BUDGET
    except HypertreesError as error:
        print(f"error: {error}", file=sys.stderr)
        return EXIT_VALIDATION
    except ValueError as error:
        print(f"error: {error}", file=sys.stderr)
        return EXIT_VALIDATION


if __name__ == "__main__":
    sys.exit(main())
