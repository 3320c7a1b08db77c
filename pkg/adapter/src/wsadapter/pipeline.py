"""The three production steps: segments, embeddings, external alignments.

Each step writes its output atomically (temp file + rename) in exactly the
engine's file formats; records that cannot be produced consistently are
skipped with a warning and counted, never half-written.
"""

from __future__ import annotations

import json
import logging
import os
import tempfile
from dataclasses import dataclass
from pathlib import Path

from .aligner import project_to_words, subword_align
from .config import AdapterConfig
from .encoders import get_encoder, resolve_layer
from .tokenize import pos_tag, tokenize_words

log = logging.getLogger("wsadapter")


@dataclass(frozen=True)
class StepStats:
    written: int
    skipped: int


def _atomic_write(path: str | Path, text: str):
    path = Path(path)
    fd, tmp = tempfile.mkstemp(dir=path.parent or ".", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as fp:
            fp.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _read_segment_records(path: str | Path) -> list[dict]:
    records = []
    with open(path, encoding="utf-8") as fp:
        for line in fp:
            if line.strip():
                records.append(json.loads(line))
    return records


def _side_record(words, tags, subword_groups, cursor=0):
    out = []
    for word, (tag, is_function), group in zip(words, tags, subword_groups):
        out.append(
            {
                "surface": word,
                "pos": tag,
                "is_function": is_function,
                "span": [cursor, cursor + len(group)],
            }
        )
        cursor += len(group)
    return out


def produce_segments(in_path: str | Path, cfg: AdapterConfig, out_path: str | Path) -> StepStats:
    """Tab-separated source/target sentence pairs -> segment file."""
    encoder = get_encoder(cfg)
    lines = Path(in_path).read_text(encoding="utf-8").splitlines()
    written, skipped = 0, 0
    out_lines = []
    for number, line in enumerate(lines, start=1):
        if not line.strip():
            continue
        parts = line.split("\t")
        if len(parts) != 2 or not parts[0].strip() or not parts[1].strip():
            log.warning("line %d: expected 'source<TAB>target', skipped", number)
            skipped += 1
            continue
        source_words = tokenize_words(parts[0], cfg.source_lang)
        target_words = tokenize_words(parts[1], cfg.target_lang)
        if not source_words or not target_words:
            log.warning("line %d: empty side after tokenization, skipped", number)
            skipped += 1
            continue
        record = {
            "id": f"p{number:04d}",
            "source": _side_record(
                source_words,
                pos_tag(source_words, cfg.source_lang),
                [encoder.subword_tokenize(w) for w in source_words],
            ),
            "target": _side_record(
                target_words,
                pos_tag(target_words, cfg.target_lang),
                [encoder.subword_tokenize(w) for w in target_words],
            ),
        }
        out_lines.append(json.dumps(record, ensure_ascii=False, separators=(",", ":")))
        written += 1
    _atomic_write(out_path, "".join(l + "\n" for l in out_lines))
    return StepStats(written=written, skipped=skipped)


def _encode_side(record_side, encoder, layer):
    """Re-derive subwords for one side; None when spans disagree."""
    words = [w["surface"] for w in record_side]
    subwords, matrix = encoder.encode_words(words, layer)
    for word, group in zip(record_side, subwords):
        start, end = word["span"]
        if end - start != len(group):
            return None
    return matrix


def produce_embeddings(
    segments_path: str | Path, cfg: AdapterConfig, out_path: str | Path
) -> StepStats:
    """Segment file -> embedding dump, both sides per segment."""
    encoder = get_encoder(cfg)
    layer = resolve_layer(encoder, cfg)
    written, skipped = 0, 0
    out_lines = []
    for record in _read_segment_records(segments_path):
        sides = {}
        for side in ("source", "target"):
            sides[side] = _encode_side(record[side], encoder, layer)
        if sides["source"] is None or sides["target"] is None:
            log.warning(
                "segment %s: subword counts disagree with spans "
                "(different tokenizer config?), record skipped",
                record["id"],
            )
            skipped += 1
            continue
        for side in ("source", "target"):
            out_lines.append(
                json.dumps(
                    {
                        "segment_id": record["id"],
                        "side": side,
                        "dim": encoder.dim,
                        "vectors": [[float(x) for x in row] for row in sides[side]],
                    },
                    ensure_ascii=False,
                    separators=(",", ":"),
                )
            )
        written += 1
    _atomic_write(out_path, "".join(l + "\n" for l in out_lines))
    return StepStats(written=written, skipped=skipped)


def produce_external_alignments(
    segments_path: str | Path, cfg: AdapterConfig, out_path: str | Path
) -> StepStats:
    """Segment file -> word-level Pharaoh alignments, one line per segment."""
    encoder = get_encoder(cfg)
    layer = resolve_layer(encoder, cfg)
    written, skipped = 0, 0
    out_lines = []
    for record in _read_segment_records(segments_path):
        try:
            src = _encode_side(record["source"], encoder, layer)
            tgt = _encode_side(record["target"], encoder, layer)
            if src is None or tgt is None:
                raise ValueError("subword counts disagree with spans")
            pairs = subword_align(src, tgt, method=cfg.aligner)
            word_pairs = project_to_words(
                pairs,
                [tuple(w["span"]) for w in record["source"]],
                [tuple(w["span"]) for w in record["target"]],
            )
            out_lines.append(" ".join(f"{s}-{t}" for s, t in sorted(word_pairs)))
            written += 1
        except Exception as exc:
            log.warning("segment %s: aligner failed (%s), empty line emitted", record["id"], exc)
            out_lines.append("")
            skipped += 1
    _atomic_write(out_path, "".join(l + "\n" for l in out_lines))
    return StepStats(written=written, skipped=skipped)
