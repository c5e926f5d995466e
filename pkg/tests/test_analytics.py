import itertools
import math
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from tasteauth.analytics import (
    FpFnCurve,
    cohort_filter,
    convolve_pmfs,
    curves_to_csv,
    fpfn_curves,
    order_score_correlation,
    password_bits,
    pmf_mean,
    pmf_tail,
    rating_summary,
    screen_score_pmf,
    session_score_pmf,
)
from tasteauth.errors import ValidationError

TABLE_ROWS = [
    # (D, D_HR, S, exact bits, printed integer, comparable secret)
    (6, 1, 5, 12.92, 12, "4-digit PIN"),
    (8, 2, 4, 19.23, 19, "6-digit PIN"),
    (10, 2, 4, 21.97, 22, "7-digit PIN"),
    (12, 3, 3, 23.34, 23, "7-digit PIN"),
    (12, 5, 5, 48.15, 49, "8-character password (72-symbol alphabet)"),
]


def enumerate_screen_pmf(d, k):
    """Brute-force score distribution: count every possible selection."""
    images = range(d)
    keys = set(range(k))
    counts = {}
    total = 0
    for chosen in itertools.combinations(images, k):
        score = len(keys & set(chosen))
        counts[score] = counts.get(score, 0) + 1
        total += 1
    return {s: Fraction(c, total) for s, c in counts.items()}


class TestPasswordBits:
    @pytest.mark.parametrize("d,k,s,exact,printed,comparable", TABLE_ROWS)
    def test_reference_policy_rows(self, d, k, s, exact, printed, comparable):
        report = password_bits(d, k, s)
        assert report.total_bits == pytest.approx(exact, abs=0.005)
        assert abs(report.printed_bits - printed) <= 1
        assert report.comparable == comparable

    def test_session_scaling_exact(self):
        one = password_bits(8, 2, 1)
        four = password_bits(8, 2, 4)
        assert four.total_bits == 4 * one.per_screen_bits
        assert four.per_screen_bits == one.per_screen_bits

    def test_forced_selection_is_zero_bits(self):
        assert password_bits(5, 5, 3).total_bits == 0.0

    def test_keys_exceeding_screen_rejected(self):
        with pytest.raises(ValidationError):
            password_bits(4, 5, 1)

    @given(
        st.integers(min_value=1, max_value=14),
        st.integers(min_value=1, max_value=14),
        st.integers(min_value=1, max_value=8),
    )
    def test_bits_match_combinatorics(self, d, k, s):
        if k > d:
            with pytest.raises(ValidationError):
                password_bits(d, k, s)
            return
        report = password_bits(d, k, s)
        assert report.total_bits == pytest.approx(s * math.log2(math.comb(d, k)))


class TestScorePmfs:
    def test_study_screen_distribution_exact(self):
        pmf = screen_score_pmf(8, 2)
        assert pmf == {0: Fraction(15, 28), 1: Fraction(12, 28), 2: Fraction(1, 28)}
        assert pmf_mean(pmf) == Fraction(1, 2)

    def test_forced_full_score(self):
        assert screen_score_pmf(5, 5) == {
            0: Fraction(0), 1: Fraction(0), 2: Fraction(0), 3: Fraction(0),
            4: Fraction(0), 5: Fraction(1),
        }

    def test_enumeration_oracle_all_small_policies(self):
        for d in range(1, 13):
            for k in range(1, d + 1):
                pmf = screen_score_pmf(d, k)
                oracle = enumerate_screen_pmf(d, k)
                for score in range(k + 1):
                    assert pmf[score] == oracle.get(score, Fraction(0)), (d, k, score)
                assert sum(pmf.values()) == 1
                assert pmf_mean(pmf) == Fraction(k * k, d)

    def test_session_pmf_perfect_score(self):
        pmf = session_score_pmf(8, 2, 4)
        assert pmf[8] == Fraction(1, 614656)
        assert pmf_mean(pmf) == Fraction(2)
        assert sum(pmf.values()) == 1

    def test_session_pmf_matches_exhaustive_joint(self):
        # independent 3-screen session at (6,2): enumerate all 15^3 outcomes
        keys = {0, 1}
        singles = []
        for chosen in itertools.combinations(range(6), 2):
            singles.append(len(keys & set(chosen)))
        counts = {}
        for outcome in itertools.product(singles, repeat=3):
            t = sum(outcome)
            counts[t] = counts.get(t, 0) + 1
        total = len(singles) ** 3
        oracle = {t: Fraction(c, total) for t, c in counts.items()}
        pmf = session_score_pmf(6, 2, 3)
        for t in range(7):
            assert pmf[t] == oracle.get(t, Fraction(0)), t

    def test_convolution_identity(self):
        base = screen_score_pmf(8, 2)
        assert convolve_pmfs({0: Fraction(1)}, base) == base

    def test_tail(self):
        pmf = session_score_pmf(8, 2, 4)
        assert pmf_tail(pmf, 0) == 1
        assert pmf_tail(pmf, 8) == Fraction(1, 614656)
        assert pmf_tail(pmf, 9) == 0


class TestFpFnCurves:
    def test_hand_built_log_oracle(self):
        curve = fpfn_curves([8, 7, 6], [2, 3, 8], max_total=8)
        t = 7
        assert curve.fp[t] == pytest.approx(1 / 3)
        assert curve.fn[t] == pytest.approx(1 / 3)
        assert curve.thresholds == tuple(range(9))

    def test_zero_threshold_extremes(self):
        curve = fpfn_curves([8, 7, 6], [2, 3, 8], max_total=8)
        assert curve.fp[0] == 1.0 and curve.fn[0] == 0.0

    def test_unreachable_threshold(self):
        curve = fpfn_curves([5, 6], [1], max_total=8)
        assert curve.fn[7] == 1.0 and curve.fn[8] == 1.0

    def test_empty_cohorts_undefined_not_zero(self):
        no_attackers = fpfn_curves([5, 6], [], max_total=8)
        assert no_attackers.fp is None and not no_attackers.fp_defined
        assert no_attackers.fn is not None
        no_legit = fpfn_curves([], [5], max_total=8)
        assert no_legit.fn is None and no_legit.fp is not None

    def test_out_of_range_totals_rejected(self):
        with pytest.raises(ValidationError):
            fpfn_curves([9], [1], max_total=8)
        with pytest.raises(ValidationError):
            fpfn_curves([5], [-1], max_total=8)

    @given(
        st.lists(st.integers(min_value=0, max_value=8), min_size=1, max_size=60),
        st.lists(st.integers(min_value=0, max_value=8), min_size=1, max_size=60),
    )
    def test_monotonicity_property(self, legit, attacker):
        curve = fpfn_curves(legit, attacker, max_total=8)
        for a, b in zip(curve.fp, curve.fp[1:]):
            assert a >= b
        for a, b in zip(curve.fn, curve.fn[1:]):
            assert a <= b

    def test_fp_equals_exact_tail_for_pmf_expanded_log(self):
        # expand the exact (4,1,2) guessing pmf into a finite attacker log
        pmf = session_score_pmf(4, 1, 2)
        denominator = math.lcm(*(p.denominator for p in pmf.values()))
        attacker = [
            t for t, p in pmf.items() for _ in range(int(p * denominator))
        ]
        assert len(attacker) == denominator
        curve = fpfn_curves([2], attacker, max_total=2)
        for t in curve.thresholds:
            assert curve.fp[t] == pytest.approx(float(pmf_tail(pmf, t)))


class TestCsvExport:
    def test_columns_and_undefined_cells(self):
        defined = fpfn_curves([8, 7, 6], [2, 3, 8], max_total=8)
        undefined = fpfn_curves([5], [], max_total=8, cohort="top-half")
        text = curves_to_csv([defined, undefined])
        lines = text.strip().splitlines()
        assert lines[0] == "threshold,fp,fn,cohort"
        assert len(lines) == 1 + 9 + 9
        assert lines[1].startswith("0,1.0,0.0,all")
        top_half_rows = [l for l in lines if l.endswith("top-half")]
        assert all(row.split(",")[1] == "" for row in top_half_rows)

    def test_round_trip_precision(self):
        curve = fpfn_curves([8, 7, 6], [2, 3, 8], max_total=8)
        row = curves_to_csv([curve]).splitlines()[8]
        threshold, fp, fn, cohort = row.split(",")
        assert float(fp) == curve.fp[7] and float(fn) == curve.fn[7]


class TestRatingSummary:
    def test_full_scale_span(self):
        summary = rating_summary({"u1": list(range(1, 11))})
        assert summary.scale_span["u1"] == 10
        assert summary.total == 10

    def test_single_rating(self):
        summary = rating_summary({"u1": [6]})
        assert summary.mean == 6 and summary.median == 6
        assert summary.scale_span["u1"] == 1

    def test_histogram_counts_everything(self):
        summary = rating_summary({"u1": [1, 1, 5], "u2": [5, 10]})
        assert summary.histogram[1] == 2
        assert summary.histogram[5] == 2
        assert summary.histogram[10] == 1
        assert sum(summary.histogram.values()) == summary.total == 5

    def test_right_leaning_fixture_modes_high(self):
        fixture = [1]*2 + [2]*3 + [3]*4 + [4]*6 + [5]*9 + [6]*13 + [7]*17 + [8]*15 + [9]*10 + [10]*6
        summary = rating_summary({"u1": fixture})
        mode = max(summary.histogram, key=summary.histogram.get)
        assert mode in (7, 8)
        assert summary.mean > 5.5

    @given(st.lists(st.integers(min_value=1, max_value=10), min_size=1, max_size=50))
    def test_adding_one_rating_moves_one_bin(self, values):
        base = rating_summary({"u": values})
        grown = rating_summary({"u": values + [7]})
        diffs = {
            v: grown.histogram[v] - base.histogram[v] for v in range(1, 11)
        }
        assert diffs.pop(7) == 1
        assert all(d == 0 for d in diffs.values())

    def test_invalid_value_rejected(self):
        with pytest.raises(ValidationError):
            rating_summary({"u1": [0]})


class TestCohorts:
    def test_study_cohort_sizes(self):
        scores = {f"u{i:02d}": float(i % 9) for i in range(33)}
        assert len(cohort_filter(scores, 1 / 2)) == 17
        assert len(cohort_filter(scores, 1 / 3)) == 11

    def test_full_fraction_returns_everyone(self):
        scores = {"a": 1.0, "b": 2.0}
        assert sorted(cohort_filter(scores, 1.0)) == ["a", "b"]

    def test_ranked_by_score_then_id(self):
        scores = {"b": 5.0, "a": 5.0, "c": 9.0}
        assert cohort_filter(scores, 1.0) == ["c", "a", "b"]

    def test_empty_rejected(self):
        with pytest.raises(ValidationError):
            cohort_filter({}, 0.5)

    def test_bad_fraction_rejected(self):
        with pytest.raises(ValidationError):
            cohort_filter({"a": 1.0}, 0.0)


class TestOrderCorrelation:
    def test_perfect_trends(self):
        assert order_score_correlation([1, 2, 3, 4]) == pytest.approx(1.0)
        assert order_score_correlation([4, 3, 2, 1]) == pytest.approx(-1.0)

    def test_constant_scores_zero(self):
        assert order_score_correlation([5, 5, 5]) == 0.0

    def test_too_short_rejected(self):
        with pytest.raises(ValidationError):
            order_score_correlation([5])
