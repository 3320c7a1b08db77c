"""AER, Pearson correlation, and bucketed aggregation."""

from __future__ import annotations

import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from wordsync.align import AlignmentLink, AlignmentSet, Provenance
from wordsync.errors import ConsistencyError
from wordsync.eval import (
    aer,
    bucket_by_length,
    bucket_by_nalign,
    correlate_with_judgments,
    corpus_aer,
    pearson,
)
from wordsync.ingest import GoldAlignment, JudgedSegment
from wordsync.metrics import SyncResult


def _pred(pairs, seg_id="s"):
    return AlignmentSet(
        seg_id, frozenset(AlignmentLink(i, j, 1.0) for i, j in pairs), Provenance.FILTERED
    )


def _gold(sure, possible=None, seg_id="s"):
    possible = set(possible or set()) | set(sure)
    return GoldAlignment(seg_id, frozenset(sure), frozenset(possible))


def _result(seg_id, rho, coverage=1.0, n_align=4, length=10, excluded=None):
    combined = None if rho is None or coverage is None else rho * coverage
    if excluded is None:
        excluded = rho is None
    return SyncResult(seg_id, rho, coverage, combined, n_align, length, excluded)


class TestAer:
    def test_perfect_prediction(self):
        pairs = {(0, 0), (1, 1)}
        result = aer(_pred(pairs), _gold(pairs))
        assert result.aer == 0.0
        assert result.precision == result.recall == result.f1 == 1.0

    def test_fully_disjoint(self):
        result = aer(_pred({(0, 0)}), _gold({(1, 1)}))
        assert result.aer == 1.0
        assert result.precision == 0.0 and result.recall == 0.0 and result.f1 == 0.0

    def test_hand_derived_mixed_case(self):
        # A={(0,0),(1,1)}, S={(0,0)}, P=A: AER = 1 - (1+2)/(2+1) = 0
        result = aer(_pred({(0, 0), (1, 1)}), _gold({(0, 0)}, possible={(1, 1)}))
        assert result.aer == pytest.approx(0.0, abs=1e-12)
        assert result.precision == 1.0 and result.recall == 1.0
        assert result.link_counts == (2, 1, 2)

    def test_possible_only_links_help_precision_not_recall(self):
        result = aer(_pred({(0, 1)}), _gold(set(), possible={(0, 1)}))
        assert result.precision == 1.0
        assert result.recall == 0.0  # warned, reported as 0

    def test_empty_prediction_warns_and_zeroes(self, caplog):
        with caplog.at_level("WARNING"):
            result = aer(_pred(set()), _gold({(0, 0)}))
        assert result.precision == 0.0
        assert "precision" in caplog.text

    def test_segment_mismatch(self):
        with pytest.raises(ConsistencyError, match="mismatch"):
            aer(_pred(set(), "a"), _gold(set(), seg_id="b"))

    def test_corpus_aggregation_matches_count_sums(self):
        rng = np.random.default_rng(4)
        preds, golds = [], []
        for i in range(20):
            pairs = {(int(rng.integers(0, 5)), int(rng.integers(0, 5))) for _ in range(6)}
            sure = {(int(rng.integers(0, 5)), int(rng.integers(0, 5))) for _ in range(3)}
            poss = sure | {(int(rng.integers(0, 5)), int(rng.integers(0, 5))) for _ in range(2)}
            preds.append(_pred(pairs, str(i)))
            golds.append(_gold(sure, poss, str(i)))
        total = corpus_aer(preds, golds)
        n_a = sum(len(p.pairs()) for p in preds)
        n_s = sum(len(g.sure) for g in golds)
        a_s = sum(len(p.pairs() & g.sure) for p, g in zip(preds, golds))
        a_p = sum(len(p.pairs() & g.possible) for p, g in zip(preds, golds))
        assert total.aer == pytest.approx(1 - (a_s + a_p) / (n_a + n_s))
        assert total.recall == pytest.approx(a_s / n_s)

    def test_f1_bounds(self):
        rng = np.random.default_rng(14)
        for _ in range(200):
            pairs = {(int(rng.integers(0, 4)), int(rng.integers(0, 4))) for _ in range(4)}
            sure = {(int(rng.integers(0, 4)), int(rng.integers(0, 4))) for _ in range(3)}
            result = aer(_pred(pairs), _gold(sure))
            assert 0.0 <= result.precision <= 1.0
            assert 0.0 <= result.recall <= 1.0
            assert result.f1 <= max(result.precision, result.recall) + 1e-12
            assert (result.f1 == 0.0) == (result.precision * result.recall == 0.0)


def pearson_exact(xs, ys):
    """Sign and squared value of r in exact rational arithmetic."""
    n = len(xs)
    fx = [Fraction(x) for x in xs]
    fy = [Fraction(y) for y in ys]
    mx = sum(fx) / n
    my = sum(fy) / n
    sxx = sum((a - mx) ** 2 for a in fx)
    syy = sum((b - my) ** 2 for b in fy)
    sxy = sum((a - mx) * (b - my) for a, b in zip(fx, fy))
    if sxx == 0 or syy == 0:
        return None
    sign = 0 if sxy == 0 else (1 if sxy > 0 else -1)
    return sign, Fraction(sxy * sxy, sxx * syy)


class TestPearson:
    def test_exact_plus_one_on_linear(self):
        xs = [1.0, 2.0, 3.0, 4.0]
        ys = [2 * x + 1 for x in xs]
        assert pearson(xs, ys).r == 1.0

    def test_exact_minus_one_on_antilinear(self):
        xs = [1.0, 2.0, 3.0]
        assert pearson(xs, [-x for x in xs]).r == -1.0

    def test_half(self):
        assert pearson([1, 2, 3], [1, 3, 2]).r == pytest.approx(0.5, abs=1e-12)

    def test_zero_variance_is_undefined_not_crash(self):
        result = pearson([1.0, 1.0, 1.0], [1.0, 2.0, 3.0])
        assert result.r is None
        assert result.n_points == 3

    def test_length_mismatch(self):
        with pytest.raises(ConsistencyError, match="length"):
            pearson([1, 2], [1, 2, 3])

    def test_too_few_points(self):
        with pytest.raises(ConsistencyError, match="fewer than 2"):
            pearson([1.0], [2.0])

    @given(
        data=st.lists(
            st.tuples(st.integers(-50, 50), st.integers(-50, 50)), min_size=2, max_size=30
        )
    )
    @settings(max_examples=300)
    def test_matches_exact_oracle(self, data):
        xs = [float(x) for x, _ in data]
        ys = [float(y) for _, y in data]
        result = pearson(xs, ys)
        oracle = pearson_exact(xs, ys)
        if oracle is None:
            assert result.r is None
            return
        sign, r_squared = oracle
        assert -1.0 <= result.r <= 1.0
        assert math.copysign(1, result.r) == sign or result.r == 0 == sign
        assert result.r * result.r == pytest.approx(float(r_squared), abs=1e-9)


class TestBuckets:
    def test_counts_for_known_nalign_values(self):
        results = [_result(str(i), 0.5, n_align=n) for i, n in enumerate((2, 4, 6))]
        reports = bucket_by_nalign(results, [2, 4])
        assert [r.segment_count for r in reports] == [3, 2]
        assert [r.bucket_key for r in reports] == ["n_align≥2", "n_align≥4"]

    def test_empty_results(self):
        reports = bucket_by_nalign([], [2, 3])
        assert all(r.segment_count == 0 and r.mean_rho is None for r in reports)

    def test_undefined_rho_results_not_counted(self):
        results = [_result("a", None, n_align=0), _result("b", 1.0, n_align=4)]
        reports = bucket_by_nalign(results, [2])
        assert reports[0].segment_count == 1

    def test_counts_non_increasing_on_random_inputs(self):
        rng = np.random.default_rng(8)
        results = [
            _result(str(i), float(rng.uniform(-1, 1)), n_align=int(rng.integers(0, 10)))
            for i in range(100)
        ]
        reports = bucket_by_nalign(results, list(range(0, 10)))
        counts = [r.segment_count for r in reports]
        assert counts == sorted(counts, reverse=True)

    def test_length_bucket_membership_short(self):
        results = [_result("a", 0.5, length=14)]
        reports = {r.bucket_key: r.segment_count for r in bucket_by_length(results)}
        assert reports["all"] == 1 and reports["len<15"] == 1
        assert reports["len≥15"] == 0

    def test_length_bucket_membership_long(self):
        results = [_result("a", 0.5, length=30)]
        reports = {r.bucket_key: r.segment_count for r in bucket_by_length(results)}
        assert reports["all"] == 1 and reports["len<15"] == 0
        for key in ("len≥15", "len≥20", "len≥25", "len≥30"):
            assert reports[key] == 1

    def test_default_rows_are_exactly_six(self):
        keys = [r.bucket_key for r in bucket_by_length([])]
        assert keys == ["all", "len<15", "len≥15", "len≥20", "len≥25", "len≥30"]

    def test_membership_matches_brute_force_rescan(self):
        rng = np.random.default_rng(21)
        results = [
            _result(str(i), float(rng.uniform(-1, 1)), length=int(rng.integers(1, 40)))
            for i in range(120)
        ]
        thresholds = [10, 20, 30]
        reports = {r.bucket_key: r for r in bucket_by_length(results, thresholds)}
        for t in thresholds:
            members = [r for r in results if r.source_length >= t and not r.excluded]
            assert reports[f"len≥{t}"].segment_count == len(members)
            if members:
                want = sum(r.rho for r in members) / len(members)
                assert reports[f"len≥{t}"].mean_rho == pytest.approx(want)

    def test_aggregation_is_order_independent(self):
        rng = np.random.default_rng(31)
        results = [
            _result(str(i), float(rng.uniform(-1, 1)), n_align=int(rng.integers(2, 8)),
                    length=int(rng.integers(1, 40)))
            for i in range(50)
        ]
        shuffled = list(results)
        rng.shuffle(shuffled)
        assert bucket_by_nalign(results) == bucket_by_nalign(shuffled)
        assert bucket_by_length(results) == bucket_by_length(shuffled)


class TestCorrelateWithJudgments:
    def _judged(self, scores, kind="error_based"):
        return [JudgedSegment(k, v, kind) for k, v in scores.items()]

    def test_negated_metric_gives_minus_one(self):
        results = [_result(str(i), rho) for i, rho in enumerate((0.1, 0.4, 0.8, -0.2))]
        judgments = self._judged({r.segment_id: -r.rho for r in results})
        corr = correlate_with_judgments(results, judgments, "rho")
        assert corr.r == -1.0
        assert corr.n_points == 4 and corr.n_skipped == 0

    def test_constant_metric_undefined(self):
        results = [_result(str(i), 0.5) for i in range(4)]
        judgments = self._judged({r.segment_id: float(i) for i, r in enumerate(results)})
        assert correlate_with_judgments(results, judgments, "rho").r is None

    def test_undefined_metrics_skipped_and_counted(self):
        results = [_result("a", 0.5), _result("b", None), _result("c", 0.7)]
        judgments = self._judged({"a": 1.0, "b": 2.0, "c": 3.0, "ghost": 4.0})
        corr = correlate_with_judgments(results, judgments, "rho")
        assert corr.n_points == 2 and corr.n_skipped == 2

    def test_too_few_overlapping_points(self):
        results = [_result("a", 0.5)]
        judgments = self._judged({"zz": 1.0, "yy": 2.0})
        with pytest.raises(ConsistencyError, match="overlapping"):
            correlate_with_judgments(results, judgments, "rho")

    def test_joined_series_match_direct_pearson(self):
        rng = np.random.default_rng(12)
        results = [_result(str(i), float(rng.uniform(-1, 1))) for i in range(30)]
        judgments = self._judged(
            {r.segment_id: float(rng.normal()) for r in results if rng.uniform() < 0.8}
        )
        corr = correlate_with_judgments(results, judgments, "rho")
        by_id = {r.segment_id: r.rho for r in results}
        xs = [by_id[j.segment_id] for j in judgments]
        ys = [j.human_score for j in judgments]
        assert corr.r == pearson(xs, ys).r
