"""Cross-lingual alignment construction, projection, intersection, filtering.

The greedy aligner links every target subword to its highest-cosine source
subword and projects the links onto word spans.  Word-level sets can then be
intersected with an externally produced alignment, filtered by similarity
threshold and source-side function words, and reduced to a one-to-one list
for rank computation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import TYPE_CHECKING, Iterable

import numpy as np

from .errors import ConsistencyError

if TYPE_CHECKING:
    from .ingest import EmbeddingMatrix, Segment, Word

# UPOS tags treated as function words unless the caller overrides the set.
DEFAULT_FUNCTION_POS = frozenset(
    {"ADP", "AUX", "CCONJ", "SCONJ", "DET", "PART", "PRON", "PUNCT", "SYM"}
)


class Provenance(Enum):
    GREEDY = "greedy"
    EXTERNAL = "external"
    INTERSECTED = "intersected"
    FILTERED = "filtered"


@dataclass(frozen=True, order=True)
class AlignmentLink:
    """One (source word, target word) link with its cosine similarity."""

    source_index: int
    target_index: int
    similarity: float = 1.0

    def __post_init__(self):
        if self.source_index < 0 or self.target_index < 0:
            raise ValueError("link indices must be nonnegative")
        if not math.isfinite(self.similarity):
            raise ValueError("link similarity must be finite")


@dataclass(frozen=True)
class AlignmentSet:
    """All links for one segment; at most one link per (source, target) pair."""

    segment_id: str
    links: frozenset[AlignmentLink]
    provenance: Provenance

    def __post_init__(self):
        object.__setattr__(self, "links", frozenset(self.links))
        pairs = {(l.source_index, l.target_index) for l in self.links}
        if len(pairs) != len(self.links):
            raise ValueError("duplicate (source, target) pair in alignment set")

    def pairs(self) -> frozenset[tuple[int, int]]:
        return frozenset((l.source_index, l.target_index) for l in self.links)

    def __len__(self) -> int:
        return len(self.links)


@dataclass(frozen=True)
class FilterConfig:
    """Link-filtering knobs: similarity threshold and function-word removal.

    ``theta == 0`` disables the similarity filter entirely (cosines can be
    negative, and zero is the documented identity configuration).  Links with
    similarity exactly equal to a positive ``theta`` are kept.
    """

    theta: float = 0.71
    function_pos: frozenset[str] = DEFAULT_FUNCTION_POS
    drop_function_words: bool = True

    def __post_init__(self):
        if not math.isfinite(self.theta):
            raise ValueError("theta must be finite")
        object.__setattr__(self, "function_pos", frozenset(self.function_pos))
        if self.drop_function_words and not self.function_pos:
            raise ValueError("function_pos must be nonempty when dropping function words")


def is_function_word(word: Word, function_pos: frozenset[str] = DEFAULT_FUNCTION_POS) -> bool:
    """A word counts as function if flagged or if its POS tag is in the set."""
    return word.is_function or (word.pos is not None and word.pos in function_pos)


def _subword_owner(seg: Segment, side: str) -> list[int | None]:
    """Map each subword index to its owning word index (None for gaps)."""
    owner: list[int | None] = [None] * seg.subword_count(side)
    for w_idx, word in enumerate(seg.words(side)):
        start, end = word.span
        for s in range(start, end):
            owner[s] = w_idx
    return owner


def greedy_align(src: EmbeddingMatrix, tgt: EmbeddingMatrix, seg: Segment) -> AlignmentSet:
    """Link every target subword to its maximum-cosine source subword.

    Ties break toward the lowest source index.  Subwords outside every word
    span (special-token slots) neither emit nor receive links.  The subword
    links are projected to word level before returning.
    """
    if src.segment_id != seg.id or tgt.segment_id != seg.id:
        raise ConsistencyError(
            f"embedding segment ids ({src.segment_id!r}, {tgt.segment_id!r}) "
            f"do not match segment {seg.id!r}"
        )
    if src.dim != tgt.dim:
        raise ConsistencyError(f"dim mismatch: source {src.dim} vs target {tgt.dim}")
    for m, side in ((src, "source"), (tgt, "target")):
        expected = seg.subword_count(side)
        if m.vectors.shape[0] != expected:
            raise ConsistencyError(
                f"{side} of {seg.id!r}: {m.vectors.shape[0]} vectors "
                f"for {expected} subwords"
            )

    src_norms = np.linalg.norm(src.vectors, axis=1)
    tgt_norms = np.linalg.norm(tgt.vectors, axis=1)
    if np.any(src_norms == 0.0) or np.any(tgt_norms == 0.0):
        raise ConsistencyError(f"zero-norm embedding vector in segment {seg.id!r}")

    sims = (tgt.vectors / tgt_norms[:, None]) @ (src.vectors / src_norms[:, None]).T

    src_owner = _subword_owner(seg, "source")
    tgt_owner = _subword_owner(seg, "target")
    for j, owner in enumerate(src_owner):
        if owner is None:
            sims[:, j] = -np.inf

    subword_links = []
    for t, owner in enumerate(tgt_owner):
        if owner is None:
            continue
        j = int(np.argmax(sims[t]))
        sim = min(1.0, max(-1.0, float(sims[t, j])))
        subword_links.append((j, t, sim))
    return subwords_to_words(subword_links, seg, provenance=Provenance.GREEDY)


def subwords_to_words(
    subword_links: Iterable[tuple[int, int, float]],
    seg: Segment,
    provenance: Provenance = Provenance.GREEDY,
) -> AlignmentSet:
    """Project subword links onto word spans.

    A word pair is linked iff at least one subword link falls inside both
    spans; the word-level similarity is the maximum over contributing links.
    """
    src_owner = _subword_owner(seg, "source")
    tgt_owner = _subword_owner(seg, "target")
    best: dict[tuple[int, int], float] = {}
    for s_sub, t_sub, sim in subword_links:
        if not (0 <= s_sub < len(src_owner)) or not (0 <= t_sub < len(tgt_owner)):
            raise ConsistencyError(
                f"subword link ({s_sub},{t_sub}) out of range for segment {seg.id!r}"
            )
        ws = src_owner[s_sub]
        wt = tgt_owner[t_sub]
        if ws is None or wt is None:
            continue  # link touches a gap subword owned by no word
        key = (ws, wt)
        if key not in best or sim > best[key]:
            best[key] = sim
    links = frozenset(AlignmentLink(s, t, sim) for (s, t), sim in best.items())
    return AlignmentSet(seg.id, links, provenance)


def intersect(a: AlignmentSet, b: AlignmentSet) -> AlignmentSet:
    """Keep links present in both sets; similarity is the min of the two."""
    if a.segment_id != b.segment_id:
        raise ConsistencyError(
            f"cannot intersect alignments of {a.segment_id!r} and {b.segment_id!r}"
        )
    sims_a = {(l.source_index, l.target_index): l.similarity for l in a.links}
    sims_b = {(l.source_index, l.target_index): l.similarity for l in b.links}
    links = frozenset(
        AlignmentLink(s, t, min(sims_a[(s, t)], sims_b[(s, t)]))
        for (s, t) in sims_a.keys() & sims_b.keys()
    )
    return AlignmentSet(a.segment_id, links, Provenance.INTERSECTED)


def apply_filters(a: AlignmentSet, seg: Segment, cfg: FilterConfig) -> AlignmentSet:
    """Drop function-word-source links and links below the similarity threshold."""
    n_source = len(seg.source_words)
    kept = []
    for link in a.links:
        if link.source_index >= n_source:
            raise ConsistencyError(
                f"link source index {link.source_index} out of range for {seg.id!r}"
            )
        word = seg.source_words[link.source_index]
        if cfg.drop_function_words and is_function_word(word, cfg.function_pos):
            continue
        if cfg.theta > 0.0 and link.similarity < cfg.theta:
            continue
        kept.append(link)
    return AlignmentSet(a.segment_id, frozenset(kept), Provenance.FILTERED)


def dedupe_for_ranking(a: AlignmentSet) -> list[AlignmentLink]:
    """Reduce to a one-to-one link list sorted by target index.

    Among links sharing a source index the highest similarity wins (ties go
    to the lowest target index); the same rule then applies per target index
    (ties to the lowest source index).
    """
    per_source: dict[int, AlignmentLink] = {}
    for link in sorted(a.links, key=lambda l: (l.source_index, -l.similarity, l.target_index)):
        per_source.setdefault(link.source_index, link)
    per_target: dict[int, AlignmentLink] = {}
    for link in sorted(
        per_source.values(), key=lambda l: (l.target_index, -l.similarity, l.source_index)
    ):
        per_target.setdefault(link.target_index, link)
    return sorted(per_target.values(), key=lambda l: l.target_index)
