"""Shared builders for segments, embeddings, and alignment sets."""

from __future__ import annotations

from pathlib import Path

import numpy as np
import pytest

from wordsync.align import AlignmentLink, AlignmentSet, Provenance
from wordsync.ingest import EmbeddingMatrix, Segment, Word

TOY_DIR = Path(__file__).resolve().parents[1] / "src" / "wordsync" / "data" / "toy"
GOLDEN_DIR = Path(__file__).resolve().parent / "golden"


@pytest.fixture
def toy_dir() -> Path:
    return TOY_DIR


def seg_from_specs(seg_id, src, tgt) -> Segment:
    """Build a segment from (surface, pos, is_function, n_subwords) tuples."""

    def words(entries):
        out, cursor = [], 0
        for surface, pos, func, n in entries:
            out.append(Word(surface=surface, span=(cursor, cursor + n), pos=pos, is_function=func))
            cursor += n
        return tuple(out)

    return Segment(id=seg_id, source_words=words(src), target_words=words(tgt))


def simple_segment(seg_id="seg", n_src=4, n_tgt=4, func_src=()) -> Segment:
    """One subword per word; func_src lists function-word source indices."""
    src = [(f"w{i}", None, i in func_src, 1) for i in range(n_src)]
    tgt = [(f"t{j}", None, False, 1) for j in range(n_tgt)]
    return seg_from_specs(seg_id, src, tgt)


def unit_rows(rng, n, dim) -> np.ndarray:
    v = rng.normal(size=(n, dim))
    return v / np.linalg.norm(v, axis=1, keepdims=True)


def matrices_for(seg: Segment, src_vecs, tgt_vecs):
    src_vecs = np.asarray(src_vecs, dtype=float)
    tgt_vecs = np.asarray(tgt_vecs, dtype=float)
    return (
        EmbeddingMatrix(seg.id, "source", src_vecs.shape[1], src_vecs),
        EmbeddingMatrix(seg.id, "target", tgt_vecs.shape[1], tgt_vecs),
    )


def random_links(rng, n_src=8, n_tgt=8, max_links=12):
    pairs = {
        (int(rng.integers(0, n_src)), int(rng.integers(0, n_tgt)))
        for _ in range(int(rng.integers(0, max_links + 1)))
    }
    return frozenset(
        AlignmentLink(s, t, float(rng.uniform(-1.0, 1.0))) for s, t in pairs
    )


def random_alignment_set(rng, seg_id="seg", n_src=8, n_tgt=8, max_links=12) -> AlignmentSet:
    return AlignmentSet(seg_id, random_links(rng, n_src, n_tgt, max_links), Provenance.GREEDY)
