"""Corpus-level evaluation: alignment error rate, correlation with human
judgments, and bucketed aggregation reports.

All statistics are computed as fractions; the rendering helpers offer a
percent display flag for AER/precision/recall.
"""

from __future__ import annotations

import json
import logging
import math
from dataclasses import dataclass
from statistics import fmean
from typing import TYPE_CHECKING, Sequence

from .errors import ConsistencyError
from .metrics import SyncResult

if TYPE_CHECKING:
    from .align import AlignmentSet
    from .ingest import GoldAlignment, JudgedSegment

log = logging.getLogger(__name__)

METRIC_FIELDS = ("rho", "coverage", "combined")
DEFAULT_NALIGN_THRESHOLDS = (2, 3, 4, 5, 6)
DEFAULT_LENGTH_THRESHOLDS = (15, 20, 25, 30)


@dataclass(frozen=True)
class AlignmentEvalResult:
    """AER, precision, recall, F1 plus the raw link counts (|A|, |S|, |P|)."""

    aer: float
    precision: float
    recall: float
    f1: float
    link_counts: tuple[int, int, int]


@dataclass(frozen=True)
class CorrelationResult:
    """Sample Pearson r; None when either series has zero variance."""

    metric_name: str
    r: float | None
    n_points: int
    n_skipped: int = 0


@dataclass(frozen=True)
class BucketReport:
    """Mean scores over the segments falling into one bucket."""

    bucket_key: str
    mean_rho: float | None
    mean_coverage: float | None
    segment_count: int


def _aer_from_counts(n_a: int, n_s: int, n_p: int, a_and_s: int, a_and_p: int) -> AlignmentEvalResult:
    denom = n_a + n_s
    aer = 1.0 - (a_and_s + a_and_p) / denom if denom else 0.0
    if n_a:
        precision = a_and_p / n_a
    else:
        log.warning("empty predicted alignment: precision reported as 0")
        precision = 0.0
    if n_s:
        recall = a_and_s / n_s
    else:
        log.warning("empty sure set: recall reported as 0")
        recall = 0.0
    f1 = 2 * precision * recall / (precision + recall) if precision + recall > 0 else 0.0
    return AlignmentEvalResult(
        aer=aer, precision=precision, recall=recall, f1=f1, link_counts=(n_a, n_s, n_p)
    )


def aer(pred: AlignmentSet, gold: GoldAlignment) -> AlignmentEvalResult:
    """AER = 1 - (|A∩S| + |A∩P|) / (|A| + |S|), with P = |A∩P|/|A|, R = |A∩S|/|S|."""
    if pred.segment_id != gold.segment_id:
        raise ConsistencyError(
            f"segment mismatch: predicted {pred.segment_id!r} vs gold {gold.segment_id!r}"
        )
    a = pred.pairs()
    return _aer_from_counts(
        len(a), len(gold.sure), len(gold.possible), len(a & gold.sure), len(a & gold.possible)
    )


def corpus_aer(
    preds: Sequence[AlignmentSet], golds: Sequence[GoldAlignment]
) -> AlignmentEvalResult:
    """Corpus-level AER over all segments (counts summed with segment-qualified links)."""
    if len(preds) != len(golds):
        raise ConsistencyError(f"{len(preds)} predicted alignments for {len(golds)} gold ones")
    n_a = n_s = n_p = a_and_s = a_and_p = 0
    for pred, gold in zip(preds, golds):
        if pred.segment_id != gold.segment_id:
            raise ConsistencyError(
                f"segment mismatch: predicted {pred.segment_id!r} vs gold {gold.segment_id!r}"
            )
        a = pred.pairs()
        n_a += len(a)
        n_s += len(gold.sure)
        n_p += len(gold.possible)
        a_and_s += len(a & gold.sure)
        a_and_p += len(a & gold.possible)
    return _aer_from_counts(n_a, n_s, n_p, a_and_s, a_and_p)


def pearson(
    xs: Sequence[float], ys: Sequence[float], metric_name: str = ""
) -> CorrelationResult:
    """Sample Pearson correlation; r is None when either variance is zero."""
    if len(xs) != len(ys):
        raise ConsistencyError(f"series length mismatch: {len(xs)} vs {len(ys)}")
    n = len(xs)
    if n < 2:
        raise ConsistencyError("fewer than 2 points for correlation")
    mx = math.fsum(xs) / n
    my = math.fsum(ys) / n
    ax = [x - mx for x in xs]
    ay = [y - my for y in ys]
    sxx = math.fsum(a * a for a in ax)
    syy = math.fsum(b * b for b in ay)
    if sxx == 0.0 or syy == 0.0:
        return CorrelationResult(metric_name=metric_name, r=None, n_points=n)
    sxy = math.fsum(a * b for a, b in zip(ax, ay))
    r = sxy / math.sqrt(sxx * syy)
    r = min(1.0, max(-1.0, r))
    return CorrelationResult(metric_name=metric_name, r=r, n_points=n)


def _included(result: SyncResult) -> bool:
    return not result.excluded and result.rho is not None


def _bucket(key: str, members: list[SyncResult]) -> BucketReport:
    rhos = [r.rho for r in members if r.rho is not None]
    coverages = [r.coverage for r in members if r.coverage is not None]
    return BucketReport(
        bucket_key=key,
        mean_rho=fmean(rhos) if rhos else None,
        mean_coverage=fmean(coverages) if coverages else None,
        segment_count=len(members),
    )


def bucket_by_nalign(
    results: Sequence[SyncResult], thresholds: Sequence[int] = DEFAULT_NALIGN_THRESHOLDS
) -> list[BucketReport]:
    """One bucket per threshold t, containing results with n_align >= t."""
    if list(thresholds) != sorted(thresholds):
        raise ValueError("thresholds must be sorted ascending")
    reports = []
    for t in thresholds:
        members = [r for r in results if r.rho is not None and r.n_align >= t]
        reports.append(_bucket(f"n_align≥{t}", members))
    return reports


def bucket_by_length(
    results: Sequence[SyncResult],
    thresholds: Sequence[int] = DEFAULT_LENGTH_THRESHOLDS,
) -> list[BucketReport]:
    """Buckets on source word count: all, shorter than the first threshold,
    then one at-least bucket per threshold.  Excluded segments stay out."""
    if list(thresholds) != sorted(thresholds):
        raise ValueError("thresholds must be sorted ascending")
    included = [r for r in results if _included(r)]
    reports = [_bucket("all", included)]
    if thresholds:
        first = thresholds[0]
        reports.append(_bucket(f"len<{first}", [r for r in included if r.source_length < first]))
        for t in thresholds:
            reports.append(_bucket(f"len≥{t}", [r for r in included if r.source_length >= t]))
    return reports


def correlate_with_judgments(
    results: Sequence[SyncResult],
    judgments: Sequence[JudgedSegment],
    metric_field: str,
) -> CorrelationResult:
    """Pearson r between one metric field and the human scores.

    Judged segments whose metric value is undefined (or that have no scored
    result at all) are skipped and counted in ``n_skipped``.
    """
    if metric_field not in METRIC_FIELDS:
        raise ValueError(f"metric_field must be one of {METRIC_FIELDS}")
    by_id = {r.segment_id: r for r in results}
    xs: list[float] = []
    ys: list[float] = []
    skipped = 0
    for j in judgments:
        result = by_id.get(j.segment_id)
        value = getattr(result, metric_field) if result is not None else None
        if value is None:
            skipped += 1
            continue
        xs.append(value)
        ys.append(j.human_score)
    if len(xs) < 2:
        raise ConsistencyError(
            f"fewer than 2 overlapping points between results and judgments "
            f"({skipped} skipped)"
        )
    corr = pearson(xs, ys, metric_name=metric_field)
    return CorrelationResult(
        metric_name=corr.metric_name, r=corr.r, n_points=corr.n_points, n_skipped=skipped
    )


# ---------------------------------------------------------------------------
# report rendering


def fmt_score(value: float | None, percent: bool = False) -> str:
    if value is None:
        return "n/a"
    return f"{value * 100:.1f}" if percent else f"{value:.4f}"


def render_buckets(reports: Sequence[BucketReport], fmt: str = "table") -> str:
    """Bucket rows as mean rho with coverage in parentheses plus the count."""
    if fmt == "records":
        lines = []
        for b in reports:
            lines.append(
                json.dumps(
                    {
                        "bucket": b.bucket_key,
                        "mean_rho": b.mean_rho,
                        "mean_coverage": b.mean_coverage,
                        "segment_count": b.segment_count,
                    },
                    ensure_ascii=False,
                    separators=(",", ":"),
                )
            )
        return "".join(line + "\n" for line in lines)
    width = max((len(b.bucket_key) for b in reports), default=6)
    lines = [f"{'bucket':<{width}}  {'rho':>8} {'(coverage)':>10}  segments"]
    for b in reports:
        lines.append(
            f"{b.bucket_key:<{width}}  {fmt_score(b.mean_rho):>8} "
            f"{'(' + fmt_score(b.mean_coverage) + ')':>10}  {b.segment_count}"
        )
    return "".join(line + "\n" for line in lines)


def render_aer(
    corpus: AlignmentEvalResult,
    per_segment: Sequence[tuple[str, AlignmentEvalResult]] = (),
    fmt: str = "table",
    percent: bool = False,
) -> str:
    """AER report: corpus row plus an optional per-segment breakdown."""
    if fmt == "records":
        lines = []
        for seg_id, r in [("corpus", corpus), *per_segment]:
            lines.append(
                json.dumps(
                    {
                        "segment_id": seg_id,
                        "aer": r.aer,
                        "precision": r.precision,
                        "recall": r.recall,
                        "f1": r.f1,
                        "links": list(r.link_counts),
                    },
                    ensure_ascii=False,
                    separators=(",", ":"),
                )
            )
        return "".join(line + "\n" for line in lines)
    rows = [("corpus", corpus), *per_segment]
    width = max(len(name) for name, _ in rows)
    width = max(width, len("segment"))
    unit = " (%)" if percent else ""
    lines = [
        f"{'segment':<{width}}  {'AER' + unit:>9} {'P' + unit:>9} {'R' + unit:>9} "
        f"{'F1':>7}  |A|/|S|/|P|"
    ]
    for name, r in rows:
        counts = "/".join(str(c) for c in r.link_counts)
        lines.append(
            f"{name:<{width}}  {fmt_score(r.aer, percent):>9} {fmt_score(r.precision, percent):>9} "
            f"{fmt_score(r.recall, percent):>9} {fmt_score(r.f1):>7}  {counts}"
        )
    return "".join(line + "\n" for line in lines)


def render_correlations(
    overall: Sequence[CorrelationResult],
    by_bucket: Sequence[tuple[str, Sequence[CorrelationResult]]] = (),
    score_kind: str = "error_based",
    fmt: str = "table",
) -> str:
    """Correlation report with the sign-reading note for error-based scores."""
    names = [c.metric_name for c in overall]
    if fmt == "records":
        lines = []
        for bucket, cors in [("all", overall), *by_bucket]:
            for c in cors:
                lines.append(
                    json.dumps(
                        {
                            "bucket": bucket,
                            "metric": c.metric_name,
                            "r": c.r,
                            "n_points": c.n_points,
                            "n_skipped": c.n_skipped,
                        },
                        ensure_ascii=False,
                        separators=(",", ":"),
                    )
                )
        return "".join(line + "\n" for line in lines)
    width = max(len("bucket"), max((len(b) for b, _ in by_bucket), default=3), 3)
    header = f"{'bucket':<{width}}  " + " ".join(f"{n:>10}" for n in names) + "  points"
    lines = [header]
    for bucket, cors in [("all", overall), *by_bucket]:
        cells = " ".join(f"{fmt_score(c.r):>10}" for c in cors)
        points = "/".join(str(c.n_points) for c in cors)
        lines.append(f"{bucket:<{width}}  {cells}  {points}")
    skipped = max((c.n_skipped for c in overall), default=0)
    if skipped:
        lines.append(f"skipped {skipped} judged segment(s) with undefined metric values")
    if score_kind == "error_based":
        lines.append("note: error-based human scores; negative r means the metric agrees "
                     "with the human ranking")
    return "".join(line + "\n" for line in lines)
