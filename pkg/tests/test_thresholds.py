import io
import math

import numpy as np
import pytest

from tribell.thresholds import (
    CSV_HEADER,
    NonMonotoneIndicatorError,
    NoViolationAnywhereError,
    ThresholdError,
    bisect_threshold,
    critical_param,
    is_violation,
    sweep,
    write_csv,
)


class TestBisectThreshold:
    def test_simple_step(self):
        crit, bracket, evals = bisect_threshold(lambda p: p > 0.37, 0.0, 1.0, 1e-5)
        assert crit == pytest.approx(0.37, abs=1e-5)
        assert bracket[0] < 0.37 < bracket[1] or abs(bracket[1] - 0.37) < 1e-5
        assert abs(bracket[1] - bracket[0]) <= 1e-5
        assert evals >= 21

    def test_descending_indicator(self):
        # Violation region at small parameters: bracket stores the violating
        # end second even though it is numerically smaller.
        crit, bracket, _ = bisect_threshold(lambda p: p < 0.62, 0.0, 1.0, 1e-5)
        assert crit == pytest.approx(0.62, abs=1e-5)
        no_end, yes_end = bracket
        assert yes_end < 0.62 < no_end

    def test_non_monotone_raises(self):
        with pytest.raises(NonMonotoneIndicatorError) as err:
            bisect_threshold(lambda p: 0.3 < p < 0.6, 0.0, 1.0, 1e-4)
        assert len(err.value.params) == 21

    def test_no_violation_raises(self):
        with pytest.raises(NoViolationAnywhereError):
            bisect_threshold(lambda p: False, 0.0, 1.0, 1e-4)

    def test_all_violating_raises(self):
        with pytest.raises(ThresholdError):
            bisect_threshold(lambda p: True, 0.0, 1.0, 1e-4)


class TestCriticalParam:
    def test_noisy_ghz_unfiltered_oracle(self):
        res = critical_param("noisy-ghz", "unfiltered", tol=1e-4, certify="oracle")
        assert res.critical == pytest.approx(0.5, abs=1e-4)
        assert abs(res.bracket[1] - res.bracket[0]) <= 1e-4

    def test_noisy_ghz_bound_certifier_agrees(self):
        res = critical_param("noisy-ghz", "unfiltered", tol=1e-4, certify="bound")
        assert res.critical == pytest.approx(0.5, abs=1e-4)

    def test_psi_pi8_unfiltered(self):
        res = critical_param("psi-pi8", "unfiltered", tol=2e-4, certify="oracle")
        assert res.critical == pytest.approx(1 / math.sqrt(2), abs=1e-3)

    def test_ad_ghz_unfiltered(self):
        res = critical_param("ad-ghz", "unfiltered", tol=1e-4, certify="oracle")
        assert res.critical == pytest.approx(1 - 2 ** (-2 / 3), abs=1e-4)

    def test_rejects_parameterless_family(self):
        with pytest.raises(ValueError):
            critical_param("ghz")

    def test_rejects_unknown_mode(self):
        with pytest.raises(ValueError):
            critical_param("noisy-ghz", mode="sideways")


@pytest.fixture(scope="module")
def rows():
    return sweep(
        "noisy-ghz",
        (0.0, 1.0),
        0.25,
        seed=0,
        oracle_restarts=16,
        search_restarts=6,
    )


class TestSweep:

    def test_grid(self, rows):
        assert [r.param for r in rows] == pytest.approx([0.0, 0.25, 0.5, 0.75, 1.0])

    def test_bound_column_follows_family(self, rows):
        for r in rows:
            assert r.bound_unfiltered == pytest.approx(4 * r.param, abs=1e-9)

    def test_oracle_below_bound(self, rows):
        for r in rows:
            assert r.oracle_unfiltered <= r.bound_unfiltered + 1e-6
            assert r.oracle_filtered <= r.bound_filtered + 1e-6

    def test_flags_match_oracle_values(self, rows):
        for r in rows:
            assert r.violation_unfiltered == is_violation(r.oracle_unfiltered)
            assert r.violation_filtered == is_violation(r.oracle_filtered)

    def test_violation_pattern(self, rows):
        assert [r.violation_unfiltered for r in rows] == [False, False, False, True, True]

    def test_csv_schema(self, rows):
        buf = io.StringIO()
        write_csv(rows, buf)
        lines = buf.getvalue().strip().split("\n")
        assert lines[0] == CSV_HEADER
        assert len(lines) == len(rows) + 1
        first = lines[1].split(",")
        assert len(first) == 10
        assert first[5] in ("0", "1")

    def test_ad_ghz_pure_endpoint(self):
        rows = sweep(
            "ad-ghz", (0.0, 0.2), 0.2, seed=0, oracle_restarts=16, search_restarts=4
        )
        top = rows[0]
        assert top.param == 0.0
        for value in (
            top.bound_unfiltered,
            top.bound_filtered,
            top.oracle_unfiltered,
            top.oracle_filtered,
        ):
            assert value == pytest.approx(4.0, abs=1e-5)

    def test_jobs_parallel_matches_serial(self):
        serial = sweep(
            "psi-pi8", (0.2, 0.6), 0.2, seed=3, oracle_restarts=8, search_restarts=4
        )
        parallel = sweep(
            "psi-pi8",
            (0.2, 0.6),
            0.2,
            seed=3,
            oracle_restarts=8,
            search_restarts=4,
            jobs=2,
        )
        for a, b in zip(serial, parallel):
            assert a == b


class TestRegionContainment:
    def test_filtering_never_shrinks_violation_region(self):
        # Identity filters are always in the search space, so the filtered
        # violating region contains the unfiltered one. noisy-ghz and
        # psi-pi8 violate at large p, ad-ghz at small gamma.
        up = critical_param(
            "noisy-ghz", "unfiltered", tol=1e-3, certify="oracle"
        ).critical
        fp = critical_param(
            "noisy-ghz",
            "filtered",
            tol=1e-3,
            certify="oracle",
            search_restarts=6,
            search_max_iters=200,
        ).critical
        assert fp <= up + 1e-3

        ug = critical_param("ad-ghz", "unfiltered", tol=1e-3, certify="oracle").critical
        fg = critical_param(
            "ad-ghz",
            "filtered",
            tol=1e-3,
            certify="oracle",
            search_restarts=6,
            search_max_iters=200,
        ).critical
        assert fg >= ug - 1e-3
