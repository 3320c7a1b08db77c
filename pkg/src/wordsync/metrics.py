"""Per-segment synchronization scores.

The synchronization score is Spearman's rank correlation over the source
word indices of a one-to-one alignment read in target order: 1.0 means the
output follows the input word order exactly, -1.0 means full reversal.
The combined score multiplies it by content-word coverage, the fraction of
source content words that kept an alignment link.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, replace
from typing import IO, TYPE_CHECKING, Iterable, Sequence

from .align import (
    AlignmentLink,
    AlignmentSet,
    FilterConfig,
    Provenance,
    apply_filters,
    dedupe_for_ranking,
    greedy_align,
    intersect,
)
from .errors import ConsistencyError, ParseError

if TYPE_CHECKING:
    from .ingest import EmbeddingMatrix, Segment


@dataclass(frozen=True)
class MetricConfig:
    """Scoring pipeline configuration.

    ``use_intersection`` switches from the greedy-only pipeline to the
    intersected one (greedy ∩ external).  In the intersected pipeline the
    similarity threshold is skipped unless ``theta_in_intersection`` is set;
    the intersection itself already removes unreliable links.
    """

    filter: FilterConfig = FilterConfig()
    min_n_align: int = 2
    use_intersection: bool = False
    theta_in_intersection: bool = False

    def __post_init__(self):
        if self.min_n_align < 0:
            raise ValueError("min_n_align must be nonnegative")


@dataclass(frozen=True)
class SyncResult:
    """Score bundle for one segment.

    ``rho`` and ``combined`` are None when fewer than two aligned words
    survive; such segments carry ``excluded=True`` and stay out of averages
    but are never dropped from result lists.
    """

    segment_id: str
    rho: float | None
    coverage: float | None
    combined: float | None
    n_align: int
    source_length: int
    excluded: bool
    used_links: tuple[AlignmentLink, ...] = ()

    def to_record(self) -> dict:
        return {
            "segment_id": self.segment_id,
            "rho": self.rho,
            "coverage": self.coverage,
            "combined": self.combined,
            "n_align": self.n_align,
            "source_length": self.source_length,
            "excluded": self.excluded,
        }

    @classmethod
    def from_record(cls, record: dict) -> "SyncResult":
        return cls(
            segment_id=record["segment_id"],
            rho=record["rho"],
            coverage=record["coverage"],
            combined=record["combined"],
            n_align=record["n_align"],
            source_length=record["source_length"],
            excluded=record["excluded"],
        )


def source_index_sequence(links: Sequence[AlignmentLink]) -> list[int]:
    """Source indices in target order, densely re-ranked to 1..k.

    The k surviving source words are renumbered 1..k by source position, so
    the output is always a permutation of 1..k even after filtering removed
    words in between.
    """
    prev_target = -1
    for link in links:
        if link.target_index <= prev_target:
            raise ValueError("links must be one-to-one and sorted by target index")
        prev_target = link.target_index
    sources = [link.source_index for link in links]
    if len(set(sources)) != len(sources):
        raise ValueError("links must be one-to-one in source index")
    rank = {s: i for i, s in enumerate(sorted(sources), start=1)}
    return [rank[s] for s in sources]


def _check_permutation(seq: Sequence[int]) -> int:
    k = len(seq)
    if sorted(seq) != list(range(1, k + 1)):
        raise ValueError(f"sequence {seq!r} is not a permutation of 1..{k}")
    return k


def spearman_rho(seq: Sequence[int]) -> float | None:
    """Rank-difference form 1 - 6*sum(d_i^2)/(k(k^2-1)); None for k < 2."""
    k = len(seq)
    if k < 2:
        return None
    _check_permutation(seq)
    d2 = sum((s - i) ** 2 for i, s in enumerate(seq, start=1))
    return 1.0 - (6 * d2) / (k * (k * k - 1))


def kendall_tau(seq: Sequence[int]) -> float | None:
    """(concordant - discordant) / (k(k-1)/2) over all index pairs; None for k < 2."""
    k = len(seq)
    if k < 2:
        return None
    _check_permutation(seq)
    balance = 0
    for i in range(k):
        for j in range(i + 1, k):
            balance += 1 if seq[j] > seq[i] else -1
    return 2.0 * balance / (k * (k - 1))


def content_coverage(seg: Segment, links: AlignmentSet) -> float | None:
    """Fraction of source content words (is_function False) that kept a link.

    None when the segment has no content words at all.
    """
    content = {i for i, w in enumerate(seg.source_words) if not w.is_function}
    if not content:
        return None
    aligned = {l.source_index for l in links.links}
    return len(content & aligned) / len(content)


def combined_score(rho: float | None, coverage: float | None) -> float | None:
    """Product of synchronization and coverage; None if either is undefined."""
    if rho is None or coverage is None:
        return None
    return rho * coverage


def pipeline_alignment(
    seg: Segment,
    embeddings: tuple[EmbeddingMatrix, EmbeddingMatrix] | None,
    external: AlignmentSet | None,
    cfg: MetricConfig,
) -> AlignmentSet:
    """The filtered (pre-dedupe) alignment the configured pipeline produces."""
    if embeddings is None:
        raise ConsistencyError(f"segment {seg.id!r}: embeddings are required")
    if cfg.use_intersection:
        if external is None:
            raise ConsistencyError(
                f"segment {seg.id!r}: external alignment required when intersecting"
            )
        base = intersect(greedy_align(embeddings[0], embeddings[1], seg), external)
        fcfg = cfg.filter if cfg.theta_in_intersection else replace(cfg.filter, theta=0.0)
        return apply_filters(base, seg, fcfg)
    return apply_filters(greedy_align(embeddings[0], embeddings[1], seg), seg, cfg.filter)


def score_segment(
    seg: Segment,
    embeddings: tuple[EmbeddingMatrix, EmbeddingMatrix] | None = None,
    external: AlignmentSet | None = None,
    cfg: MetricConfig | None = None,
) -> SyncResult:
    """Run the full per-segment pipeline and bundle the scores.

    Greedy pipeline: greedy alignment, similarity + function-word filters,
    one-to-one reduction, rank correlation.  Intersected pipeline: greedy
    alignment intersected with the external one, then the same tail.
    """
    cfg = cfg or MetricConfig()
    filtered = pipeline_alignment(seg, embeddings, external, cfg)
    used = dedupe_for_ranking(filtered)
    rho = spearman_rho(source_index_sequence(used))
    used_set = AlignmentSet(seg.id, frozenset(used), Provenance.FILTERED)
    coverage = content_coverage(seg, used_set)
    combined = combined_score(rho, coverage)
    n_align = len(used)
    return SyncResult(
        segment_id=seg.id,
        rho=rho,
        coverage=coverage,
        combined=combined,
        n_align=n_align,
        source_length=len(seg.source_words),
        excluded=rho is None or n_align < cfg.min_n_align,
        used_links=tuple(used),
    )


def write_results(results: Iterable[SyncResult], header: dict | None = None) -> str:
    """Serialize results as line-delimited records, optionally with a config line."""
    lines = []
    if header is not None:
        lines.append(json.dumps({"config": header}, ensure_ascii=False, separators=(",", ":")))
    for result in results:
        lines.append(json.dumps(result.to_record(), ensure_ascii=False, separators=(",", ":")))
    return "".join(line + "\n" for line in lines)


def parse_results(stream: IO, *, source: str = "results") -> list[SyncResult]:
    """Read back a results file written by write_results; config lines are skipped."""
    results, _ = parse_results_with_config(stream, source=source)
    return results


def parse_results_with_config(
    stream: IO, *, source: str = "results"
) -> tuple[list[SyncResult], dict | None]:
    """As parse_results, but also return the echoed scoring config if present."""
    data = stream.read()
    if isinstance(data, bytes):
        data = data.decode("utf-8")
    out: list[SyncResult] = []
    config: dict | None = None
    for number, line in enumerate(data.splitlines(), start=1):
        if not line.strip():
            continue
        try:
            record = json.loads(line)
        except ValueError as exc:
            raise ParseError(f"malformed record: {exc}", source=source, line=number) from None
        if not isinstance(record, dict):
            raise ParseError("malformed record: not a JSON object", source=source, line=number)
        if "config" in record:
            if isinstance(record["config"], dict) and config is None:
                config = record["config"]
            continue
        try:
            out.append(SyncResult.from_record(record))
        except KeyError as exc:
            raise ParseError(f"record is missing field {exc}", source=source, line=number) from None
    return out, config
