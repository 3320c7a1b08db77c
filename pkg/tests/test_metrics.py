"""Rank statistics against exact-rational oracles, coverage, combined score,
and the end-to-end per-segment pipeline."""

from __future__ import annotations

from fractions import Fraction
from itertools import permutations

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from wordsync.align import AlignmentLink, AlignmentSet, FilterConfig, Provenance
from wordsync.errors import ConsistencyError
from wordsync.ingest import load_embeddings, load_segments
from wordsync.metrics import (
    MetricConfig,
    SyncResult,
    combined_score,
    content_coverage,
    kendall_tau,
    parse_results,
    score_segment,
    source_index_sequence,
    spearman_rho,
    write_results,
)

from conftest import matrices_for, seg_from_specs, simple_segment, unit_rows


def spearman_exact(seq):
    """Closed-form rank-difference formula in exact rational arithmetic."""
    k = len(seq)
    d2 = sum((s - i) ** 2 for i, s in enumerate(seq, start=1))
    return 1 - Fraction(6 * d2, k * (k * k - 1))


def kendall_exact(seq):
    """Brute-force pair counting in exact rational arithmetic."""
    k = len(seq)
    concordant = sum(
        1 for i in range(k) for j in range(i + 1, k) if seq[j] > seq[i]
    )
    discordant = k * (k - 1) // 2 - concordant
    return Fraction(concordant - discordant, k * (k - 1) // 2)


def _ordered_links(pairs):
    return [AlignmentLink(s, t, 1.0) for s, t in sorted(pairs, key=lambda p: p[1])]


class TestSourceIndexSequence:
    def test_reordered_four_word_example(self):
        links = _ordered_links([(0, 0), (3, 1), (2, 2), (1, 3)])
        assert source_index_sequence(links) == [1, 4, 3, 2]

    def test_monotone_any_length(self):
        for k in range(0, 8):
            links = _ordered_links([(i, i) for i in range(k)])
            assert source_index_sequence(links) == list(range(1, k + 1))

    def test_dense_reranking_of_sparse_sources(self):
        # surviving source words {2,5,9} seen in target order (9,2,5)
        links = _ordered_links([(9, 0), (2, 1), (5, 2)])
        assert source_index_sequence(links) == [3, 1, 2]

    def test_rejects_unsorted_or_duplicated(self):
        with pytest.raises(ValueError, match="sorted"):
            source_index_sequence([AlignmentLink(0, 1), AlignmentLink(1, 0)])
        with pytest.raises(ValueError, match="one-to-one"):
            source_index_sequence([AlignmentLink(0, 0), AlignmentLink(0, 1)])

    @given(
        pairs=st.sets(st.tuples(st.integers(0, 40), st.integers(0, 40)), max_size=20).filter(
            lambda ps: len({s for s, _ in ps}) == len(ps) and len({t for _, t in ps}) == len(ps)
        )
    )
    @settings(max_examples=200)
    def test_output_is_permutation(self, pairs):
        seq = source_index_sequence(_ordered_links(pairs))
        assert sorted(seq) == list(range(1, len(pairs) + 1))
        # sorting by rank must reproduce source order
        by_source = [r for _, r in sorted(zip([s for s, _ in sorted(pairs, key=lambda p: p[1])], seq))]
        assert by_source == list(range(1, len(pairs) + 1))


class TestSpearman:
    def test_reordered_example_value(self):
        assert spearman_rho([1, 4, 3, 2]) == pytest.approx(0.2, abs=1e-12)

    def test_identity(self):
        assert spearman_rho([1, 2, 3, 4]) == 1.0

    def test_reversal(self):
        assert spearman_rho([4, 3, 2, 1]) == -1.0

    def test_undefined_below_two(self):
        assert spearman_rho([]) is None
        assert spearman_rho([1]) is None

    def test_rejects_non_permutation(self):
        with pytest.raises(ValueError, match="permutation"):
            spearman_rho([1, 1, 3])
        with pytest.raises(ValueError, match="permutation"):
            spearman_rho([0, 1])

    def test_matches_exact_oracle_on_all_small_permutations(self):
        for k in range(2, 7):
            for perm in permutations(range(1, k + 1)):
                got = spearman_rho(list(perm))
                want = float(spearman_exact(perm))
                assert got == pytest.approx(want, abs=1e-12), perm

    def test_extremes_only_at_identity_and_reversal(self):
        for k in range(2, 7):
            for perm in permutations(range(1, k + 1)):
                rho = spearman_rho(list(perm))
                assert -1.0 <= rho <= 1.0
                assert (rho == 1.0) == (list(perm) == sorted(perm))
                assert (rho == -1.0) == (list(perm) == sorted(perm, reverse=True))


class TestKendall:
    def test_identity(self):
        assert kendall_tau([1, 2, 3, 4]) == 1.0

    def test_reversal(self):
        assert kendall_tau([4, 3, 2, 1]) == -1.0

    def test_three_concordant_three_discordant(self):
        assert kendall_tau([1, 4, 3, 2]) == pytest.approx(0.0, abs=1e-12)

    def test_undefined_below_two(self):
        assert kendall_tau([1]) is None

    def test_matches_pair_counting_oracle(self):
        for k in range(2, 6):
            for perm in permutations(range(1, k + 1)):
                assert kendall_tau(list(perm)) == pytest.approx(
                    float(kendall_exact(perm)), abs=1e-12
                )


class TestContentCoverage:
    def _seg_with_content(self, n_content, n_function):
        src = [(f"c{i}", "NOUN", False, 1) for i in range(n_content)]
        src += [(f"f{i}", "ADP", True, 1) for i in range(n_function)]
        return seg_from_specs("seg", src, [("t", None, False, 1)])

    def _links(self, seg, source_indices):
        links = frozenset(AlignmentLink(s, 0, 1.0) for s in source_indices)
        return AlignmentSet(seg.id, links, Provenance.FILTERED)

    def test_eleven_of_twentythree(self):
        seg = self._seg_with_content(23, 3)
        cov = content_coverage(seg, self._links(seg, range(11)))
        assert cov == pytest.approx(0.478, abs=1e-3)

    def test_full_coverage(self):
        seg = self._seg_with_content(5, 2)
        assert content_coverage(seg, self._links(seg, range(5))) == 1.0

    def test_no_links(self):
        seg = self._seg_with_content(5, 2)
        assert content_coverage(seg, self._links(seg, [])) == 0.0

    def test_function_word_links_do_not_count(self):
        seg = self._seg_with_content(2, 2)
        # links to the two function words only
        assert content_coverage(seg, self._links(seg, [2, 3])) == 0.0

    def test_undefined_without_content_words(self):
        seg = self._seg_with_content(0, 3)
        assert content_coverage(seg, self._links(seg, [0])) is None


class TestCombinedScore:
    def test_printed_arithmetic_anchor_high(self):
        assert combined_score(0.9, 0.636363636) == pytest.approx(0.573, abs=1e-3)

    def test_printed_arithmetic_anchor_reversed(self):
        assert combined_score(-1.0, 0.666) == pytest.approx(-0.666, abs=1e-3)

    def test_zero_rho(self):
        assert combined_score(0.0, 0.73) == 0.0

    def test_undefined_propagates(self):
        assert combined_score(None, 0.5) is None
        assert combined_score(0.5, None) is None

    def test_product_identity_within_tolerance(self):
        rng = np.random.default_rng(2)
        for _ in range(200):
            rho = float(rng.uniform(-1, 1))
            cov = float(rng.uniform(0, 1))
            assert abs(combined_score(rho, cov) - rho * cov) < 1e-12


class TestScoreSegment:
    def _reordered_toy(self):
        seg = simple_segment("w", 4, 4)
        basis = np.eye(4)
        src = basis
        tgt = basis[[0, 3, 2, 1]]
        return seg, matrices_for(seg, src, tgt)

    def test_reordered_four_word_segment(self):
        seg, emb = self._reordered_toy()
        result = score_segment(seg, emb)
        assert result.rho == pytest.approx(0.2, abs=1e-12)
        assert result.n_align == 4
        assert result.coverage == 1.0
        assert result.combined == pytest.approx(0.2, abs=1e-12)
        assert not result.excluded

    def test_empty_filtered_alignment(self):
        seg = simple_segment("w", 3, 2)
        rng = np.random.default_rng(9)
        # orthogonal-ish vectors keep every cosine far below theta
        src = np.eye(3)
        tgt = unit_rows(rng, 2, 3) * 0.0 + np.array([[0.5, 0.5, 0.7071], [0.6, 0.6, 0.52915]])
        result = score_segment(seg, matrices_for(seg, src, tgt), cfg=MetricConfig(
            filter=FilterConfig(theta=0.99)
        ))
        assert result.rho is None
        assert result.combined is None
        assert result.coverage == 0.0
        assert result.excluded

    def test_single_link_undefined_rho(self):
        seg = simple_segment("w", 2, 1)
        src = np.eye(2)
        tgt = np.array([[1.0, 0.0]])
        result = score_segment(seg, matrices_for(seg, src, tgt))
        assert result.n_align == 1
        assert result.rho is None and result.excluded

    def test_deterministic(self):
        seg, emb = self._reordered_toy()
        a = score_segment(seg, emb)
        b = score_segment(seg, emb)
        assert a == b

    def test_min_n_align_marks_excluded_but_keeps_result(self):
        seg, emb = self._reordered_toy()
        result = score_segment(seg, emb, cfg=MetricConfig(min_n_align=5))
        assert result.excluded and result.rho is not None

    def test_intersection_mode_requires_external(self):
        seg, emb = self._reordered_toy()
        with pytest.raises(ConsistencyError, match="external"):
            score_segment(seg, emb, cfg=MetricConfig(use_intersection=True))

    def test_intersection_mode_drops_disputed_links(self):
        seg, emb = self._reordered_toy()
        external = AlignmentSet(
            "w",
            frozenset({AlignmentLink(0, 0), AlignmentLink(3, 1), AlignmentLink(2, 2)}),
            Provenance.EXTERNAL,
        )
        result = score_segment(seg, emb, external, MetricConfig(use_intersection=True))
        assert result.n_align == 3
        assert {(l.source_index, l.target_index) for l in result.used_links} == {
            (0, 0), (3, 1), (2, 2),
        }


class TestToyCorpusEndToEnd:
    def test_first_segment_reproduces_reordering_example(self, toy_dir):
        segments = load_segments(toy_dir / "segments.jsonl")
        embeddings = load_embeddings(toy_dir / "embeddings.jsonl", segments)
        seg = segments[0]
        assert [w.surface for w in seg.source_words] == ["I", "ate", "apples", "yesterday."]
        result = score_segment(seg, embeddings[seg.id])
        assert source_index_sequence(list(result.used_links)) == [1, 4, 3, 2]
        assert result.rho == pytest.approx(0.2, abs=1e-9)
        assert result.n_align == 4

    def test_theta_monotone_on_toy(self, toy_dir):
        segments = load_segments(toy_dir / "segments.jsonl")
        embeddings = load_embeddings(toy_dir / "embeddings.jsonl", segments)
        previous = None
        for theta in (0.0, 0.5, 0.71, 0.9, 0.99):
            cfg = MetricConfig(filter=FilterConfig(theta=theta))
            totals = [
                score_segment(s, embeddings[s.id], cfg=cfg).n_align for s in segments
            ]
            if previous is not None:
                assert all(n <= p for n, p in zip(totals, previous))
            previous = totals


def test_results_records_roundtrip():
    results = [
        SyncResult("a", 0.5, 1.0, 0.5, 4, 7, False),
        SyncResult("b", None, 0.0, None, 0, 3, True),
    ]
    text = write_results(results, header={"theta": 0.71})
    import io

    parsed = parse_results(io.StringIO(text))
    assert parsed == results
