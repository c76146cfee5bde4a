"""Command-line front end.

Verbs: bound, filtered-bound, oracle, optimize-filter, threshold, sweep,
validate. Every report carries the seed and restart count it was produced
with, and pairs the singular-value bound with the direct oracle value plus a
``tight`` field, so an untight bound is never mistaken for a violation.

Exit codes: 0 success, 1 computation error (message on stderr), 2 usage
error.
"""

from __future__ import annotations

import argparse
import io
import json
import math
import sys
from pathlib import Path

import numpy as np

from . import correlation, filtering, oracle, qalg, states, thresholds

TIGHT_TOL = 1e-4


class UsageError(Exception):
    pass


def _fmt(x: float) -> str:
    return format(float(x), ".12g")


def _family_from_args(args) -> states.StateFamily:
    if args.state is None:
        raise UsageError("--state is required")
    if args.state == "file":
        if not args.path:
            raise UsageError("--state file requires --path")
        return states.StateFamily("file", path=args.path)
    if args.p is not None and args.gamma is not None:
        raise UsageError("give either --p or --gamma, not both")
    param = args.p if args.p is not None else args.gamma
    if args.state == "ghz":
        if param is not None:
            raise UsageError("ghz takes no parameter")
        return states.StateFamily("ghz")
    if param is None:
        raise UsageError(f"family {args.state!r} needs --p or --gamma")
    return states.StateFamily(args.state, param=float(param))


def _filters_from_args(args) -> filtering.FilterTriple:
    if args.filter and args.filter_file:
        raise UsageError("give either --filter or --filter-file, not both")
    if args.filter:
        parts = args.filter.split(",")
        if len(parts) != 3:
            raise UsageError("--filter wants three comma-separated values l,m,n")
        try:
            l, m, n = (float(p) for p in parts)
        except ValueError as exc:
            raise UsageError(f"--filter values must be numbers: {exc}") from exc
        return filtering.FilterTriple.diagonal(l, m, n)
    if args.filter_file:
        data = json.loads(Path(args.filter_file).read_text(encoding="utf-8"))
        if not isinstance(data, list) or len(data) != 3:
            raise ValueError("filter file must hold a list of three 2x2 matrices")
        mats = []
        for entry in data:
            if not isinstance(entry, dict) or entry.get("dim") != 2:
                raise ValueError('each filter entry must be an object with "dim": 2')
            rows = entry["matrix"]
            mats.append(
                np.array(
                    [[complex(c[0], c[1]) for c in row] for row in rows],
                    dtype=complex,
                )
            )
        return filtering.FilterTriple(*(filtering.filter_normal_form(m) for m in mats))
    raise UsageError("this verb needs --filter or --filter-file")


def _parse_range(text: str):
    parts = text.split(":")
    if len(parts) != 3:
        raise UsageError("--range wants lo:hi:step")
    try:
        lo, hi, step = (float(p) for p in parts)
    except ValueError as exc:
        raise UsageError(f"--range values must be numbers: {exc}") from exc
    return lo, hi, step


def _state_block(args) -> dict:
    family = _family_from_args(args)
    block = {"family": family.name}
    if family.param is not None:
        block["param"] = family.param
    if family.path is not None:
        block["path"] = family.path
    return block


def _settings_block(settings: oracle.MeasurementSettings) -> dict:
    return {
        name: [float(x) for x in vec]
        for name, vec in (
            ("a", settings.a),
            ("a_prime", settings.a_prime),
            ("b", settings.b),
            ("b_prime", settings.b_prime),
            ("c", settings.c),
            ("c_prime", settings.c_prime),
        )
    }


def _bound_oracle_fields(bound: float, oracle_value: float) -> dict:
    return {
        "oracle": oracle_value,
        "tight": bool(abs(bound - oracle_value) <= TIGHT_TOL),
        "violation": bool(thresholds.is_violation(oracle_value)),
    }


def _run_bound(args) -> dict:
    rho = states.build_state(_family_from_args(args))
    rho = qalg.validate_density(rho)
    triple = correlation.singular_triple(correlation.fold(correlation.correlation_tensor(rho)))
    pair = correlation.pair_from_triple(triple)
    bound = math.sqrt(8.0 * triple.gram[0])
    best = oracle.maximize_mermin(rho, seed=args.seed, restarts=args.restarts)
    report = {
        "verb": "bound",
        "seed": args.seed,
        "restarts": args.restarts,
        "state": _state_block(args),
        "singular_values": [float(v) for v in triple.values],
        "bound": bound,
        "pair_value": pair.value,
        "pair_is_max": pair.pair_is_max,
        "degeneracy_gap": pair.gap,
    }
    report.update(_bound_oracle_fields(bound, best.value))
    return report


def _run_filtered_bound(args) -> dict:
    rho = qalg.validate_density(states.build_state(_family_from_args(args)))
    filters = _filters_from_args(args)
    rep = filtering.filtered_bound(rho, filters)
    rho_prime, norm = filtering.apply_filters(rho, filters)
    best = oracle.maximize_mermin(rho_prime, seed=args.seed, restarts=args.restarts)
    report = {
        "verb": "filtered-bound",
        "seed": args.seed,
        "restarts": args.restarts,
        "state": _state_block(args),
        "filter_ratios": [float(v) for v in filters.ratios],
        "norm": norm,
        "singular_values": [float(v) for v in rep.singular_values],
        "bound": rep.bound,
        "pair_value": rep.pair_value,
        "pair_is_max": rep.pair_is_max,
        "degeneracy_gap": rep.degeneracy_gap,
    }
    report.update(_bound_oracle_fields(rep.bound, best.value))
    return report


def _run_oracle(args) -> dict:
    rho = qalg.validate_density(states.build_state(_family_from_args(args)))
    bound = correlation.mermin_bound(rho)
    best = oracle.maximize_mermin(rho, seed=args.seed, restarts=args.restarts)
    report = {
        "verb": "oracle",
        "seed": args.seed,
        "restarts": args.restarts,
        "state": _state_block(args),
        "bound": bound,
        "iterations": best.iterations,
        "restarts_used": best.restarts_used,
        "settings": _settings_block(best.settings),
    }
    report.update(_bound_oracle_fields(bound, best.value))
    return report


def _run_optimize_filter(args) -> dict:
    rho = qalg.validate_density(states.build_state(_family_from_args(args)))
    search = filtering.optimize_filters(
        rho,
        objective=args.objective,
        restarts=args.restarts,
        seed=args.seed,
        max_iters=args.max_iters,
        include_unitaries=args.include_unitaries,
    )
    rep = filtering.filtered_bound(rho, search.best)
    rho_prime, _ = filtering.apply_filters(rho, search.best)
    best = oracle.maximize_mermin(rho_prime, seed=args.seed, restarts=32)
    report = {
        "verb": "optimize-filter",
        "seed": args.seed,
        "restarts": args.restarts,
        "state": _state_block(args),
        "objective": args.objective,
        "include_unitaries": bool(args.include_unitaries),
        "filter_ratios": [float(v) for v in search.best.ratios],
        "filter_params": [float(v) for v in search.params],
        "search_value": search.value,
        "bound": rep.bound,
        "pair_value": rep.pair_value,
        "pair_is_max": rep.pair_is_max,
    }
    report.update(_bound_oracle_fields(rep.bound, best.value))
    return report


def _run_threshold(args) -> dict:
    result = thresholds.critical_param(
        args.state,
        mode=args.mode,
        tol=args.tol,
        certify=args.certify,
        seed=args.seed,
        oracle_restarts=args.restarts,
        include_unitaries=args.include_unitaries,
    )
    return {
        "verb": "threshold",
        "seed": args.seed,
        "restarts": args.restarts,
        "family": result.family,
        "mode": result.mode,
        "certify": result.certify,
        "critical": result.critical,
        "bracket": [result.bracket[0], result.bracket[1]],
        "evaluations": result.evaluations,
    }


def _run_validate(args) -> dict:
    rho = states.build_state(_family_from_args(args))
    rho = qalg.validate_density(rho)
    w = np.linalg.eigvalsh(rho)
    return {
        "verb": "validate",
        "seed": args.seed,
        "restarts": args.restarts,
        "state": _state_block(args),
        "valid": True,
        "hermiticity_deviation": qalg.hermiticity_deviation(rho),
        "trace": float(np.trace(rho).real),
        "min_eigenvalue": float(w[0]),
    }


def _report_text(report: dict) -> str:
    lines = [f"# seed: {report['seed']}", f"# restarts: {report['restarts']}"]
    for key, value in report.items():
        if key in ("seed", "restarts"):
            continue
        if isinstance(value, float):
            lines.append(f"{key}: {_fmt(value)}")
        elif isinstance(value, dict):
            inner = ", ".join(
                f"{k}={_fmt(v) if isinstance(v, float) else v}" for k, v in value.items()
            )
            lines.append(f"{key}: {inner}")
        elif isinstance(value, list):
            rendered = ", ".join(
                _fmt(v)
                if isinstance(v, float)
                else "(" + ", ".join(_fmt(x) for x in v) + ")"
                if isinstance(v, list)
                else str(v)
                for v in value
            )
            lines.append(f"{key}: [{rendered}]")
        else:
            lines.append(f"{key}: {value}")
    return "\n".join(lines) + "\n"


def _emit(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="tribell",
        description="Mermin bounds, local filtering and violation oracles for 3-qubit states",
    )
    sub = parser.add_subparsers(dest="verb", required=True)

    def add_common(p, with_mode=False):
        p.add_argument("--state", choices=states.FAMILY_NAMES)
        p.add_argument("--p", type=float, default=None, help="family parameter")
        p.add_argument("--gamma", type=float, default=None, help="damping rate")
        p.add_argument("--path", default=None, help="state file for --state file")
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--restarts", type=int, default=32)
        p.add_argument("--out", default=None, help="write the report to this path")
        p.add_argument("--format", choices=("text", "json", "csv"), default=None)
        if with_mode:
            p.add_argument("--mode", choices=("unfiltered", "filtered"), default="unfiltered")
            p.add_argument("--certify", choices=("bound", "oracle"), default="oracle")
            p.add_argument("--tol", type=float, default=1e-4)
        return p

    add_common(sub.add_parser("bound", help="singular-value bound plus oracle check"))
    pf = add_common(sub.add_parser("filtered-bound", help="bound after explicit filters"))
    pf.add_argument("--filter", default=None, help="diagonal filters l,m,n")
    pf.add_argument("--filter-file", default=None, help="JSON file with three 2x2 PSD matrices")
    add_common(sub.add_parser("oracle", help="direct Mermin maximization"))
    po = add_common(sub.add_parser("optimize-filter", help="search for the best filters"))
    po.add_argument("--objective", choices=("pair_bound", "oracle"), default="pair_bound")
    po.add_argument("--max-iters", type=int, default=400)
    po.add_argument("--include-unitaries", action="store_true")
    pt = add_common(sub.add_parser("threshold", help="bisect the critical parameter"), with_mode=True)
    pt.add_argument("--include-unitaries", action="store_true")
    ps = add_common(sub.add_parser("sweep", help="tabulate bounds over a parameter grid"))
    ps.add_argument("--range", default="0:1:0.05", help="grid as lo:hi:step")
    ps.add_argument("--include-unitaries", action="store_true")
    ps.add_argument("--jobs", type=int, default=1)
    add_common(sub.add_parser("validate", help="check a state file or family"))
    return parser


_RUNNERS = {
    "bound": _run_bound,
    "filtered-bound": _run_filtered_bound,
    "oracle": _run_oracle,
    "optimize-filter": _run_optimize_filter,
    "threshold": _run_threshold,
    "validate": _run_validate,
}


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        if args.verb == "sweep":
            lo, hi, step = _parse_range(args.range)
            rows = thresholds.sweep(
                args.state,
                (lo, hi),
                step,
                seed=args.seed,
                oracle_restarts=args.restarts,
                include_unitaries=args.include_unitaries,
                jobs=args.jobs,
            )
            fmt = args.format or "csv"
            if fmt == "csv":
                buf = io.StringIO()
                thresholds.write_csv(rows, buf)
                _emit(buf.getvalue(), args.out)
            elif fmt == "json":
                payload = {
                    "verb": "sweep",
                    "seed": args.seed,
                    "restarts": args.restarts,
                    "family": args.state,
                    "rows": [
                        {
                            "param": r.param,
                            "bound_unfiltered": r.bound_unfiltered,
                            "bound_filtered": r.bound_filtered,
                            "oracle_unfiltered": r.oracle_unfiltered,
                            "oracle_filtered": r.oracle_filtered,
                            "violation_unfiltered": r.violation_unfiltered,
                            "violation_filtered": r.violation_filtered,
                            "l": r.filter_ratios[0],
                            "m": r.filter_ratios[1],
                            "n": r.filter_ratios[2],
                        }
                        for r in rows
                    ],
                }
                _emit(json.dumps(payload, indent=2) + "\n", args.out)
            else:
                raise UsageError("sweep supports --format csv or json")
            return 0

        report = _RUNNERS[args.verb](args)
        fmt = args.format or "text"
        if fmt == "json":
            _emit(json.dumps(report, indent=2) + "\n", args.out)
        elif fmt == "text":
            _emit(_report_text(report), args.out)
        else:
            raise UsageError(f"--format csv is only valid for sweep")
        return 0
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 2
    except (
        qalg.DensityMatrixError,
        filtering.FilterError,
        thresholds.ThresholdError,
        ValueError,
        OSError,
    ) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
