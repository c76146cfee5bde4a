"""Critical-parameter search and parameter sweeps.

``critical_param`` locates the family parameter at which a violation
indicator flips, by bisection inside a bracket found on a validation
pre-sweep grid. The indicator must be monotone across the grid (exactly one
flip); anything else raises, because silently bisecting a non-monotone
indicator would return garbage. Violation verdicts default to the direct
oracle, never the bound alone: an untight bound above 2 says nothing.

``sweep`` tabulates bounds, oracle values and violation flags over a
parameter grid, with the filtered columns evaluated at filters found by
:func:`tribell.filtering.optimize_filters`. Rows can be emitted as CSV with
the fixed header ``param,bound_unfiltered,bound_filtered,oracle_unfiltered,
oracle_filtered,violation_unfiltered,violation_filtered,l,m,n``.
"""

from __future__ import annotations

import concurrent.futures
import math
from dataclasses import dataclass

import numpy as np

from . import correlation, filtering, oracle, states

VIOLATION_MARGIN = 1e-9
CLASSICAL_BOUND = 2.0

CSV_HEADER = (
    "param,bound_unfiltered,bound_filtered,oracle_unfiltered,oracle_filtered,"
    "violation_unfiltered,violation_filtered,l,m,n"
)

PARAMETERIZED_FAMILIES = ("noisy-ghz", "psi-pi8", "ad-ghz")


class ThresholdError(RuntimeError):
    """Base class for threshold search failures."""


class NonMonotoneIndicatorError(ThresholdError):
    """The violation indicator flipped more than once on the pre-sweep grid."""

    def __init__(self, params, flags):
        self.params = tuple(float(p) for p in params)
        self.flags = tuple(bool(f) for f in flags)
        super().__init__(
            "violation indicator is not monotone on the pre-sweep grid: "
            + ", ".join(f"{p:.4g}:{int(f)}" for p, f in zip(self.params, self.flags))
        )


class NoViolationAnywhereError(ThresholdError):
    """No grid point violates, so there is no threshold to bracket."""


@dataclass(frozen=True)
class ThresholdResult:
    """Outcome of a bisection run.

    ``bracket`` is ``(param_without_violation, param_with_violation)``; for
    families whose violation region sits at small parameters the second entry
    is numerically below the first. The two ends always differ by at most the
    requested tolerance and are re-checked after the search.
    """

    family: str
    mode: str
    certify: str
    critical: float
    bracket: tuple[float, float]
    evaluations: int


@dataclass(frozen=True)
class SweepRow:
    param: float
    bound_unfiltered: float
    bound_filtered: float
    oracle_unfiltered: float
    oracle_filtered: float
    violation_unfiltered: bool
    violation_filtered: bool
    filter_ratios: tuple[float, float, float]
    filter_angles: tuple


def is_violation(value: float) -> bool:
    return value > CLASSICAL_BOUND + VIOLATION_MARGIN


def _param_seed(seed: int, param: float) -> int:
    """Deterministic per-parameter seed, stable under probe reordering."""
    packed = int(np.float64(param).view(np.uint64))
    return int(np.random.SeedSequence([int(seed), packed]).generate_state(1)[0])


def _evaluate_point(
    family: str,
    param: float,
    mode: str,
    certify: str,
    seed: int,
    oracle_restarts: int,
    search_restarts: int,
    search_max_iters: int,
    include_unitaries: bool,
) -> float:
    """Certified violation figure for one (family, parameter) point."""
    rho = states.build_state(states.StateFamily(family, param=param))
    point_seed = _param_seed(seed, param)
    if mode == "filtered":
        search = filtering.optimize_filters(
            rho,
            objective="pair_bound",
            restarts=search_restarts,
            seed=point_seed,
            max_iters=search_max_iters,
            include_unitaries=include_unitaries,
        )
        if certify == "bound":
            return search.value
        try:
            rho_prime, _ = filtering.apply_filters(rho, search.best)
        except filtering.FilterAnnihilatesError:
            return 0.0
        return oracle.maximize_mermin(
            rho_prime, seed=point_seed, restarts=oracle_restarts
        ).value
    if certify == "bound":
        pair = correlation.pair_bound(rho)
        return pair.value if pair.pair_is_max else 0.0
    return oracle.maximize_mermin(rho, seed=point_seed, restarts=oracle_restarts).value


def bisect_threshold(indicator, lo: float, hi: float, tol: float, grid: int = 21):
    """Bracket and bisect the flip of a boolean ``indicator`` over [lo, hi].

    Returns ``(critical, (param_false, param_true), evaluations)``. The
    indicator must be monotone on the validation grid: exactly one flip.
    """
    if not lo < hi:
        raise ValueError(f"need lo < hi, got ({lo}, {hi})")
    if grid < 3:
        raise ValueError(f"pre-sweep grid must have at least 3 points, got {grid}")
    params = np.linspace(lo, hi, grid)
    flags = [bool(indicator(float(p))) for p in params]
    evaluations = len(flags)
    flips = [i for i in range(len(flags) - 1) if flags[i] != flags[i + 1]]
    if len(flips) > 1:
        raise NonMonotoneIndicatorError(params, flags)
    if not any(flags):
        raise NoViolationAnywhereError(
            f"indicator is false on all {grid} grid points in [{lo}, {hi}]"
        )
    if not flips:
        raise ThresholdError(
            f"indicator is true on all {grid} grid points in [{lo}, {hi}]; "
            "no crossing to bracket"
        )
    i = flips[0]
    if flags[i]:
        yes_end, no_end = float(params[i]), float(params[i + 1])
    else:
        no_end, yes_end = float(params[i]), float(params[i + 1])
    while abs(yes_end - no_end) > tol:
        mid = 0.5 * (yes_end + no_end)
        evaluations += 1
        if indicator(mid):
            yes_end = mid
        else:
            no_end = mid
    # Post-hoc re-check of both bracket ends.
    evaluations += 2
    if indicator(yes_end) is not True or indicator(no_end) is not False:
        raise ThresholdError("bracket ends failed the post-hoc re-check")
    return 0.5 * (yes_end + no_end), (no_end, yes_end), evaluations


def critical_param(
    family: str,
    mode: str = "unfiltered",
    tol: float = 1e-4,
    certify: str = "oracle",
    *,
    param_range: tuple[float, float] = (0.0, 1.0),
    grid: int = 21,
    seed: int = 0,
    oracle_restarts: int = 32,
    search_restarts: int = 12,
    search_max_iters: int = 400,
    include_unitaries: bool = False,
) -> ThresholdResult:
    """Critical family parameter at which Mermin violation appears.

    ``certify="oracle"`` accepts a point only when the direct maximization
    exceeds the classical bound 2; ``certify="bound"`` uses the
    degenerate-pair bound value (still gated on the pair topping the
    spectrum). ``mode="filtered"`` optimizes filters at every probe.
    """
    if family not in PARAMETERIZED_FAMILIES:
        raise ValueError(
            f"threshold search needs a parameterized family, got {family!r}"
        )
    if mode not in ("unfiltered", "filtered"):
        raise ValueError(f"unknown mode {mode!r}")
    if certify not in ("oracle", "bound"):
        raise ValueError(f"unknown certifier {certify!r}")

    def indicator(param: float) -> bool:
        value = _evaluate_point(
            family,
            param,
            mode,
            certify,
            seed,
            oracle_restarts,
            search_restarts,
            search_max_iters,
            include_unitaries,
        )
        return is_violation(value)

    critical, bracket, evaluations = bisect_threshold(
        indicator, param_range[0], param_range[1], tol, grid
    )
    return ThresholdResult(
        family=family,
        mode=mode,
        certify=certify,
        critical=critical,
        bracket=bracket,
        evaluations=evaluations,
    )


def _sweep_point(args) -> SweepRow:
    (
        family,
        param,
        seed,
        oracle_restarts,
        search_restarts,
        search_max_iters,
        include_unitaries,
    ) = args
    rho = states.build_state(states.StateFamily(family, param=param))
    point_seed = _param_seed(seed, param)
    bound_u = correlation.mermin_bound(rho)
    oracle_u = oracle.maximize_mermin(rho, seed=point_seed, restarts=oracle_restarts)

    search = filtering.optimize_filters(
        rho,
        objective="pair_bound",
        restarts=search_restarts,
        seed=point_seed,
        max_iters=search_max_iters,
        include_unitaries=include_unitaries,
    )
    report = filtering.filtered_bound(rho, search.best)
    rho_prime, _ = filtering.apply_filters(rho, search.best)
    oracle_f = oracle.maximize_mermin(
        rho_prime, seed=point_seed, restarts=oracle_restarts
    )
    angles = tuple(search.params[3:]) if include_unitaries else ()
    return SweepRow(
        param=float(param),
        bound_unfiltered=bound_u,
        bound_filtered=report.bound,
        oracle_unfiltered=oracle_u.value,
        oracle_filtered=oracle_f.value,
        violation_unfiltered=is_violation(oracle_u.value),
        violation_filtered=is_violation(oracle_f.value),
        filter_ratios=search.best.ratios,
        filter_angles=angles,
    )


def sweep(
    family: str,
    span: tuple[float, float],
    step: float,
    *,
    seed: int = 0,
    oracle_restarts: int = 32,
    search_restarts: int = 12,
    search_max_iters: int = 400,
    include_unitaries: bool = False,
    jobs: int = 1,
) -> list[SweepRow]:
    """Evaluate one :class:`SweepRow` per grid point of ``span``.

    Grid points are independent; ``jobs > 1`` evaluates them in a process
    pool. Results are ordered by parameter and deterministic for a fixed
    seed regardless of scheduling.
    """
    lo, hi = float(span[0]), float(span[1])
    if not lo < hi:
        raise ValueError(f"need lo < hi, got ({lo}, {hi})")
    if step <= 0:
        raise ValueError(f"step must be positive, got {step}")
    count = int(math.floor((hi - lo) / step + 1e-9))
    params = [lo + k * step for k in range(count + 1)]
    if params[-1] < hi - 1e-12:
        params.append(hi)
    work = [
        (
            family,
            p,
            seed,
            oracle_restarts,
            search_restarts,
            search_max_iters,
            include_unitaries,
        )
        for p in params
    ]
    if jobs > 1:
        with concurrent.futures.ProcessPoolExecutor(max_workers=jobs) as pool:
            rows = list(pool.map(_sweep_point, work))
    else:
        rows = [_sweep_point(w) for w in work]
    return rows


def write_csv(rows, fp) -> None:
    """Emit sweep rows in the fixed CSV schema (flags as 0/1)."""
    fp.write(CSV_HEADER + "\n")
    for r in rows:
        l, m, n = r.filter_ratios
        fields = [
            format(r.param, ".12g"),
            format(r.bound_unfiltered, ".12g"),
            format(r.bound_filtered, ".12g"),
            format(r.oracle_unfiltered, ".12g"),
            format(r.oracle_filtered, ".12g"),
            str(int(r.violation_unfiltered)),
            str(int(r.violation_filtered)),
            format(l, ".12g"),
            format(m, ".12g"),
            format(n, ".12g"),
        ]
        fp.write(",".join(fields) + "\n")
