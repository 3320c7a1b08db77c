"""Parsing, validation, and serialization of corpus files.

Four formats, documented with samples in docs/formats.md:

  segments    JSON lines: {"id", "source": [word...], "target": [word...]}
              where word = {"surface", "pos", "is_function", "span": [start, end)}
  embeddings  JSON lines: {"segment_id", "side", "dim", "vectors": [[...], ...]}
  pharaoh     one line per segment of space-separated "i-j" (sure) and
              "i?j" (possible) word-index pairs
  judgments   CSV with header "segment_id,score,kind"

All parsers accept text or byte streams and validate every documented
invariant before returning; nothing invalid ever escapes into the pipeline.
"""

from __future__ import annotations

import csv
import io
import json
import re
from dataclasses import dataclass
from pathlib import Path
from typing import IO, Iterable, Iterator, Literal

import numpy as np

from .align import AlignmentLink, AlignmentSet, Provenance
from .errors import ConsistencyError, ParseError

Side = Literal["source", "target"]

_PHARAOH_TOKEN = re.compile(r"(-?\d+)([-?])(-?\d+)")
_JUDGMENT_HEADER = ["segment_id", "score", "kind"]
_SCORE_KINDS = ("error_based", "accuracy_based")


@dataclass(frozen=True)
class Word:
    """A word with its half-open span into the side's subword sequence."""

    surface: str
    span: tuple[int, int]
    pos: str | None = None
    is_function: bool = False


@dataclass(frozen=True)
class Segment:
    """One aligned source/target unit pair."""

    id: str
    source_words: tuple[Word, ...]
    target_words: tuple[Word, ...]

    def __post_init__(self):
        if not self.id:
            raise ValueError("segment id must be nonempty")
        for side in ("source", "target"):
            words = self.words(side)
            if not words:
                raise ValueError(f"{side} word list is empty")
            prev_end = 0
            for word in words:
                start, end = word.span
                if start < 0:
                    raise ValueError(f"negative span start on {side} side")
                if start >= end:
                    raise ValueError(f"empty span [{start},{end}) on {side} side")
                if start < prev_end:
                    raise ValueError(f"overlapping or non-monotone spans on {side} side")
                prev_end = end

    def words(self, side: Side) -> tuple[Word, ...]:
        return self.source_words if side == "source" else self.target_words

    def subword_count(self, side: Side) -> int:
        return max(word.span[1] for word in self.words(side))

    @property
    def source_length(self) -> int:
        return len(self.source_words)


@dataclass(frozen=True, eq=False)
class EmbeddingMatrix:
    """Per-subword embedding vectors for one side of one segment."""

    segment_id: str
    side: Side
    dim: int
    vectors: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.vectors, dtype=np.float64)
        object.__setattr__(self, "vectors", v)
        if self.dim <= 0:
            raise ValueError("dim must be positive")
        if v.ndim != 2 or v.shape[1] != self.dim:
            raise ValueError("ragged dims: vectors do not form a (count, dim) matrix")
        if v.shape[0] == 0:
            raise ValueError("embedding matrix has no vectors")
        if not np.all(np.isfinite(v)):
            raise ValueError("non-finite embedding component")
        if np.any(np.all(v == 0.0, axis=1)):
            raise ValueError("zero vector (cosine undefined)")


@dataclass(frozen=True)
class GoldAlignment:
    """Gold word alignment with sure and possible link sets."""

    segment_id: str
    sure: frozenset[tuple[int, int]]
    possible: frozenset[tuple[int, int]]

    def __post_init__(self):
        if not self.sure <= self.possible:
            raise ValueError("sure links must be a subset of possible links")


@dataclass(frozen=True)
class JudgedSegment:
    """A human quality score for one segment (error_based: lower is better)."""

    segment_id: str
    human_score: float
    score_kind: str

    def __post_init__(self):
        if self.score_kind not in _SCORE_KINDS:
            raise ValueError(f"score kind must be one of {_SCORE_KINDS}")


def _read_text(stream: IO) -> str:
    data = stream.read()
    if isinstance(data, bytes):
        return data.decode("utf-8")
    return data


def _iter_lines(stream: IO) -> Iterator[tuple[int, str]]:
    for number, line in enumerate(_read_text(stream).splitlines(), start=1):
        yield number, line


def _reject_constant(value: str):
    raise ValueError(f"non-finite JSON constant {value!r}")


def _json_record(line: str, source: str, number: int) -> dict:
    try:
        record = json.loads(line, parse_constant=_reject_constant)
    except ValueError as exc:
        raise ParseError(f"malformed record: {exc}", source=source, line=number) from None
    if not isinstance(record, dict):
        raise ParseError("malformed record: not a JSON object", source=source, line=number)
    return record


def _span_from(value, source: str, number: int) -> tuple[int, int]:
    ok = (
        isinstance(value, (list, tuple))
        and len(value) == 2
        and all(isinstance(x, int) and not isinstance(x, bool) for x in value)
    )
    if not ok:
        raise ParseError(
            f"span must be a [start, end) pair of integers, got {value!r}",
            source=source,
            line=number,
        )
    return (value[0], value[1])


def _word_from(obj, source: str, number: int) -> Word:
    if not isinstance(obj, dict):
        raise ParseError(f"word entry must be an object, got {obj!r}", source=source, line=number)
    surface = obj.get("surface")
    if not isinstance(surface, str) or not surface:
        raise ParseError("word is missing a nonempty 'surface'", source=source, line=number)
    span = _span_from(obj.get("span"), source, number)
    pos = obj.get("pos")
    if pos is not None and not isinstance(pos, str):
        raise ParseError(f"pos must be a string or null, got {pos!r}", source=source, line=number)
    is_function = obj.get("is_function", False)
    if not isinstance(is_function, bool):
        raise ParseError("is_function must be a boolean", source=source, line=number)
    return Word(surface=surface, span=span, pos=pos, is_function=is_function)


def parse_segments(stream: IO, *, source: str = "segments") -> list[Segment]:
    """Parse a segment corpus file, validating every record invariant."""
    segments: list[Segment] = []
    seen: dict[str, int] = {}
    for number, line in _iter_lines(stream):
        if not line.strip():
            continue
        record = _json_record(line, source, number)
        seg_id = record.get("id")
        if not isinstance(seg_id, str) or not seg_id:
            raise ParseError("record is missing a nonempty 'id'", source=source, line=number)
        if seg_id in seen:
            raise ParseError(
                f"duplicate id {seg_id} (first seen on line {seen[seg_id]})",
                source=source,
                line=number,
            )
        seen[seg_id] = number
        sides = {}
        for key in ("source", "target"):
            entries = record.get(key)
            if not isinstance(entries, list):
                raise ParseError(f"'{key}' must be a list of words", source=source, line=number)
            sides[key] = tuple(_word_from(obj, source, number) for obj in entries)
        try:
            segments.append(
                Segment(id=seg_id, source_words=sides["source"], target_words=sides["target"])
            )
        except ValueError as exc:
            raise ParseError(str(exc), source=source, line=number) from None
    return segments


def write_segments(segments: Iterable[Segment]) -> str:
    """Serialize segments in the line-delimited record format."""
    lines = []
    for seg in segments:
        record = {
            "id": seg.id,
            "source": [_word_record(w) for w in seg.source_words],
            "target": [_word_record(w) for w in seg.target_words],
        }
        lines.append(json.dumps(record, ensure_ascii=False, separators=(",", ":")))
    return "".join(line + "\n" for line in lines)


def _word_record(word: Word) -> dict:
    return {
        "surface": word.surface,
        "pos": word.pos,
        "is_function": word.is_function,
        "span": [word.span[0], word.span[1]],
    }


def parse_embeddings(
    stream: IO, corpus: Iterable[Segment], *, source: str = "embeddings"
) -> dict[str, tuple[EmbeddingMatrix, EmbeddingMatrix]]:
    """Parse an embedding dump and check it against the corpus, both sides per id."""
    by_id = {seg.id: seg for seg in corpus}
    file_dim: int | None = None
    collected: dict[tuple[str, str], EmbeddingMatrix] = {}
    for number, line in _iter_lines(stream):
        if not line.strip():
            continue
        record = _json_record(line, source, number)
        seg_id = record.get("segment_id")
        if not isinstance(seg_id, str) or not seg_id:
            raise ParseError("record is missing 'segment_id'", source=source, line=number)
        side = record.get("side")
        if side not in ("source", "target"):
            raise ParseError(
                f"side must be 'source' or 'target', got {side!r}", source=source, line=number
            )
        dim = record.get("dim")
        if not isinstance(dim, int) or isinstance(dim, bool) or dim <= 0:
            raise ParseError(f"dim must be a positive integer, got {dim!r}", source=source, line=number)
        if file_dim is None:
            file_dim = dim
        elif dim != file_dim:
            raise ParseError(
                f"dim mismatch across records: {dim} after {file_dim}", source=source, line=number
            )
        vectors = record.get("vectors")
        if not isinstance(vectors, list) or not vectors:
            raise ParseError("'vectors' must be a nonempty list", source=source, line=number)
        arr = np.asarray(vectors, dtype=object)
        if arr.ndim != 2:
            raise ParseError("ragged dims: rows of unequal length", source=source, line=number)
        try:
            arr = arr.astype(np.float64)
        except (TypeError, ValueError):
            raise ParseError("non-numeric vector component", source=source, line=number) from None
        if arr.shape[1] != dim:
            raise ParseError(
                f"ragged dims: rows of length {arr.shape[1]} with dim={dim}",
                source=source,
                line=number,
            )
        zero_rows = np.flatnonzero(np.all(arr == 0.0, axis=1))
        if zero_rows.size:
            raise ParseError(
                f"zero vector at row {int(zero_rows[0])} (cosine undefined)",
                source=source,
                line=number,
            )
        if seg_id not in by_id:
            raise ConsistencyError(f"{source}:{number}: unknown segment {seg_id!r}")
        expected = by_id[seg_id].subword_count(side)
        if arr.shape[0] != expected:
            raise ConsistencyError(
                f"{source}:{number}: {arr.shape[0]} vectors for {expected} "
                f"{side} subwords of segment {seg_id!r}"
            )
        key = (seg_id, side)
        if key in collected:
            raise ParseError(
                f"duplicate embeddings for {side} of {seg_id!r}", source=source, line=number
            )
        collected[key] = EmbeddingMatrix(segment_id=seg_id, side=side, dim=dim, vectors=arr)

    result: dict[str, tuple[EmbeddingMatrix, EmbeddingMatrix]] = {}
    for seg_id in {sid for sid, _ in collected}:
        src = collected.get((seg_id, "source"))
        tgt = collected.get((seg_id, "target"))
        if src is None or tgt is None:
            missing = "source" if src is None else "target"
            raise ConsistencyError(f"{source}: missing {missing} embeddings for segment {seg_id!r}")
        result[seg_id] = (src, tgt)
    return result


def write_embeddings(matrices: Iterable[EmbeddingMatrix]) -> str:
    lines = []
    for m in matrices:
        record = {
            "segment_id": m.segment_id,
            "side": m.side,
            "dim": m.dim,
            "vectors": [[float(x) for x in row] for row in m.vectors],
        }
        lines.append(json.dumps(record, ensure_ascii=False, separators=(",", ":")))
    return "".join(line + "\n" for line in lines)


def parse_pharaoh(
    stream: IO,
    *,
    gold: bool = False,
    corpus: list[Segment] | None = None,
    source: str = "alignments",
) -> list[GoldAlignment] | list[AlignmentSet]:
    """Parse a Pharaoh alignment file, one line per segment in corpus order.

    With ``gold=True``, "i-j" tokens are sure links and "i?j" possible-only
    links (sure links are always possible too).  With ``gold=False`` every
    token is a predicted link carrying similarity 1.0.  When ``corpus`` is
    given, segment ids are taken from it, line count must match, and word
    indices are range-checked; otherwise ids are line ordinals.
    """
    lines = _read_text(stream).splitlines()
    if corpus is not None and len(lines) != len(corpus):
        raise ConsistencyError(
            f"{source}: {len(lines)} alignment lines for {len(corpus)} segments"
        )
    out: list = []
    for idx, line in enumerate(lines):
        number = idx + 1
        sure: set[tuple[int, int]] = set()
        possible: set[tuple[int, int]] = set()
        for token in line.split():
            match = _PHARAOH_TOKEN.fullmatch(token)
            if match is None:
                raise ParseError(
                    f"token {token!r} does not match 'i-j' or 'i?j'",
                    source=source,
                    line=number,
                )
            i, sep, j = int(match.group(1)), match.group(2), int(match.group(3))
            if i < 0 or j < 0:
                raise ParseError(f"negative index in token {token!r}", source=source, line=number)
            possible.add((i, j))
            if sep == "-":
                sure.add((i, j))
        if corpus is not None:
            seg = corpus[idx]
            seg_id = seg.id
            for i, j in possible:
                if i >= len(seg.source_words) or j >= len(seg.target_words):
                    raise ConsistencyError(
                        f"{source}:{number}: link ({i},{j}) out of range for segment {seg_id!r}"
                    )
        else:
            seg_id = str(idx)
        if gold:
            out.append(
                GoldAlignment(segment_id=seg_id, sure=frozenset(sure), possible=frozenset(possible))
            )
        else:
            links = frozenset(AlignmentLink(i, j, 1.0) for i, j in possible)
            out.append(AlignmentSet(seg_id, links, Provenance.EXTERNAL))
    return out


def write_pharaoh(alignments: Iterable[AlignmentSet]) -> str:
    """Serialize predicted alignments, links sorted by (source, target)."""
    lines = []
    for a in alignments:
        pairs = sorted(a.pairs())
        lines.append(" ".join(f"{s}-{t}" for s, t in pairs))
    return "".join(line + "\n" for line in lines)


def parse_judgments(
    stream: IO, known_ids: Iterable[str] | None = None, *, source: str = "judgments"
) -> list[JudgedSegment]:
    """Parse the human-judgment score table (CSV, header segment_id,score,kind)."""
    rows = list(csv.reader(io.StringIO(_read_text(stream))))
    if not rows or rows[0] != _JUDGMENT_HEADER:
        raise ParseError(
            f"expected header {','.join(_JUDGMENT_HEADER)!r}", source=source, line=1
        )
    ids = set(known_ids) if known_ids is not None else None
    out: list[JudgedSegment] = []
    seen: set[str] = set()
    for number, row in enumerate(rows[1:], start=2):
        if not row:
            continue
        if len(row) != 3:
            raise ParseError(f"expected 3 columns, got {len(row)}", source=source, line=number)
        seg_id, score_text, kind = row
        if not seg_id:
            raise ParseError("empty segment_id", source=source, line=number)
        if seg_id in seen:
            raise ParseError(f"duplicate judgment for {seg_id!r}", source=source, line=number)
        seen.add(seg_id)
        try:
            score = float(score_text)
        except ValueError:
            raise ParseError(
                f"non-numeric score {score_text!r}", source=source, line=number
            ) from None
        if not np.isfinite(score):
            raise ParseError(f"non-finite score {score_text!r}", source=source, line=number)
        if kind not in _SCORE_KINDS:
            raise ParseError(f"unknown score kind {kind!r}", source=source, line=number)
        if ids is not None and seg_id not in ids:
            raise ConsistencyError(f"{source}:{number}: unknown segment {seg_id!r}")
        out.append(JudgedSegment(segment_id=seg_id, human_score=score, score_kind=kind))
    return out


def load_segments(path: str | Path) -> list[Segment]:
    with open(path, "rb") as fp:
        return parse_segments(fp, source=str(path))


def load_embeddings(
    path: str | Path, corpus: Iterable[Segment]
) -> dict[str, tuple[EmbeddingMatrix, EmbeddingMatrix]]:
    with open(path, "rb") as fp:
        return parse_embeddings(fp, corpus, source=str(path))


def load_pharaoh(
    path: str | Path, *, gold: bool = False, corpus: list[Segment] | None = None
) -> list[GoldAlignment] | list[AlignmentSet]:
    with open(path, "rb") as fp:
        return parse_pharaoh(fp, gold=gold, corpus=corpus, source=str(path))


def load_judgments(path: str | Path, known_ids: Iterable[str] | None = None) -> list[JudgedSegment]:
    with open(path, "rb") as fp:
        return parse_judgments(fp, known_ids, source=str(path))
