"""Built-in word aligner: bidirectional argmax over embedding similarities.

"mutual" keeps a subword pair only when each side is the other's argmax,
the usual intersection heuristic for embedding aligners; "forward" keeps
every target-side argmax. Subword pairs are then projected onto word spans.
"""

from __future__ import annotations

import numpy as np


def subword_align(src: np.ndarray, tgt: np.ndarray, method: str = "mutual") -> set[tuple[int, int]]:
    if src.shape[0] == 0 or tgt.shape[0] == 0:
        return set()
    src_n = src / np.linalg.norm(src, axis=1, keepdims=True)
    tgt_n = tgt / np.linalg.norm(tgt, axis=1, keepdims=True)
    sims = src_n @ tgt_n.T
    forward = {(int(np.argmax(sims[:, t])), t) for t in range(sims.shape[1])}
    if method == "forward":
        return forward
    backward = {(s, int(np.argmax(sims[s, :]))) for s in range(sims.shape[0])}
    return forward & backward


def project_to_words(
    pairs: set[tuple[int, int]],
    src_spans: list[tuple[int, int]],
    tgt_spans: list[tuple[int, int]],
) -> set[tuple[int, int]]:
    def owner(spans):
        out = {}
        for w, (start, end) in enumerate(spans):
            for i in range(start, end):
                out[i] = w
        return out

    src_owner = owner(src_spans)
    tgt_owner = owner(tgt_spans)
    return {
        (src_owner[s], tgt_owner[t])
        for s, t in pairs
        if s in src_owner and t in tgt_owner
    }
