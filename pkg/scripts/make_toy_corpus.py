#!/usr/bin/env python3
"""Generate the bundled toy corpus under src/wordsync/data/toy/.

Twelve small English-Japanese segments with hand-crafted subword embeddings,
built so the greedy pipeline produces known alignments and scores.  Each
source word owns one direction of a per-segment orthonormal basis; target
subwords copy the direction of the word they should align to (optionally
attenuated to land below the similarity threshold, or pointed at a gap slot
to exercise span masking).  The script re-runs the real pipeline on the
generated data and asserts every frozen expectation before writing anything.

Run from the repo root:  python3 scripts/make_toy_corpus.py
"""

from __future__ import annotations

import io
import math
import sys
from pathlib import Path

import numpy as np

from wordsync.align import FilterConfig
from wordsync.ingest import (
    EmbeddingMatrix,
    Segment,
    Word,
    parse_embeddings,
    parse_judgments,
    parse_pharaoh,
    parse_segments,
    write_embeddings,
    write_pharaoh,
    write_segments,
)
from wordsync.metrics import MetricConfig, score_segment

DIM = 32
NOISE = 0.05
SPECIAL = 31  # basis slot for gap (special-token) subwords
AUX = 30      # first basis slot for attenuation mixtures, descending

rng = np.random.default_rng(20240609)


def unit(v):
    return v / np.linalg.norm(v)


def make_basis():
    q, _ = np.linalg.qr(rng.normal(size=(DIM, DIM)))
    return q.T  # rows are orthonormal directions


# Word spec: (surface, pos, is_function, n_subwords)
# Target link spec: one entry per target word; each entry is a list with one
# item per subword: ("strong", src_word) near-copy of the source direction,
# ("exact", src_word) the exact direction, ("cal", src_word, cos) attenuated
# to roughly the given cosine, ("gap", src_word, cos_special) dominated by
# the special gap direction with the remainder on the source word.

SEGMENTS = [
    {
        "id": "s01",
        "source": [("I", None, False, 1), ("ate", None, False, 1),
                   ("apples", None, False, 1), ("yesterday.", None, False, 1)],
        "target": [("私は", None, False, 1), ("昨日", None, False, 1),
                   ("りんごを", None, False, 1), ("食べました。", None, False, 1)],
        "links": [[("strong", 0)], [("strong", 3)], [("strong", 2)], [("strong", 1)]],
        "external": [(0, 0), (3, 1), (2, 2), (1, 3)],
        "gold": "0-0 3-1 2-2 1-3",
        "expect": {"rho": 0.2, "n_align": 4, "coverage": 1.0},
    },
    {
        "id": "s02",
        "source": [("Out", "ADP", True, 1), ("of", "ADP", True, 1), ("seven", "NUM", False, 1),
                   ("large", "ADJ", False, 1), ("public", "ADJ", False, 1),
                   ("corporations", "NOUN", False, 2), ("commit", "VERB", False, 1),
                   ("frauds", "NOUN", False, 2), ("every", "DET", True, 1),
                   ("year", "NOUN", False, 1), (".", "PUNCT", True, 1)],
        "target": [("上場している企業の", "NOUN", False, 3), ("7社に1社は", "NOUN", False, 2),
                   ("毎年", "NOUN", False, 1), ("不正行為を", "NOUN", False, 2),
                   ("しています。", "VERB", False, 2)],
        "links": [[("strong", 5)] * 3, [("strong", 2)] * 2, [("strong", 9)],
                  [("strong", 7)] * 2, [("strong", 6)] * 2],
        "external": [(5, 0), (2, 1), (9, 2), (7, 3), (6, 4)],
        "gold": "5-0 2-1 9-2 7-3 6-4 0?0",
        "expect": {"rho": 0.5, "n_align": 5, "coverage": 5 / 7},
    },
    {
        "id": "s03",
        "source": [("Warm", "ADJ", False, 1), ("rain", "NOUN", False, 1),
                   ("fell", "VERB", False, 1), ("during", "ADP", True, 1),
                   ("the", "DET", True, 1), ("night", "NOUN", False, 2),
                   (".", "PUNCT", True, 1)],
        "target": [("暖かい", "ADJ", False, 2), ("雨が", "NOUN", False, 1),
                   ("降った", "VERB", False, 2), ("夜通し", "NOUN", False, 1)],
        "links": [[("strong", 0)] * 2, [("strong", 1)], [("strong", 2)] * 2, [("strong", 5)]],
        "external": [(0, 0), (1, 1), (2, 2), (5, 3)],
        "gold": "0-0 1-1 2-2 5-3",
        "expect": {"rho": 1.0, "n_align": 4, "coverage": 1.0},
    },
    {
        "id": "s04",
        "source": [("Students", "NOUN", False, 1), ("read", "VERB", False, 1),
                   ("books", "NOUN", False, 1), ("quietly", "ADV", False, 1),
                   (".", "PUNCT", True, 1)],
        "target": [("静かに", "ADV", False, 1), ("本を", "NOUN", False, 1),
                   ("読む", "VERB", False, 1), ("学生達", "NOUN", False, 1)],
        "links": [[("strong", 3)], [("strong", 2)], [("strong", 1)], [("strong", 0)]],
        "external": [(3, 0), (2, 1), (1, 2), (0, 3)],
        "gold": "3-0 2-1 1-2 0-3",
        "expect": {"rho": -1.0, "n_align": 4, "coverage": 1.0},
    },
    {
        "id": "s05",
        "source": [("The", "DET", True, 1), ("cat", "NOUN", False, 1),
                   ("sat", "VERB", False, 1), ("on", "ADP", True, 1),
                   ("the", "DET", True, 1), ("mat", "NOUN", False, 1),
                   (".", "PUNCT", True, 1)],
        "target": [("その", "DET", True, 1), ("猫は", "NOUN", False, 1),
                   ("マットの", "NOUN", False, 2), ("上に", "NOUN", False, 1),
                   ("座った", "VERB", False, 1)],
        "links": [[("strong", 0)], [("strong", 1)], [("strong", 5)] * 2,
                  [("strong", 3)], [("strong", 2)]],
        "external": [(0, 0), (1, 1), (5, 2), (3, 3), (2, 4)],
        "gold": "0?0 1-1 5-2 3?3 2-4",
        "expect": {"rho": 0.5, "n_align": 3, "coverage": 1.0},
    },
    {
        "id": "s06",
        "source": [("Silence", "NOUN", False, 1), ("filled", "VERB", False, 1),
                   ("the", "DET", True, 1), ("empty", "ADJ", False, 1),
                   ("hall", "NOUN", False, 1), (".", "PUNCT", True, 1)],
        "target": [("静けさが", "NOUN", False, 1), ("漂う", "VERB", False, 1),
                   ("廊下", "NOUN", False, 1)],
        "links": [[("cal", 0, 0.45)], [("cal", 1, 0.45)], [("cal", 4, 0.45)]],
        "external": [(0, 0), (1, 1), (4, 2)],
        "gold": "0-0 1-1 4-2",
        "expect": {"rho": None, "n_align": 0, "coverage": 0.0, "excluded": True},
    },
    {
        "id": "s07",
        "source": [("Birds", "NOUN", False, 1), ("sing", "VERB", False, 1),
                   (".", "PUNCT", True, 1)],
        "target": [("鳥が", "NOUN", False, 1), ("鳴く", "VERB", False, 1)],
        "links": [[("strong", 0)], [("cal", 1, 0.50)]],
        "external": [(0, 0), (1, 1)],
        "gold": "0-0 1-1",
        "expect": {"rho": None, "n_align": 1, "coverage": 0.5, "excluded": True},
    },
    {
        "id": "s08",
        # 23 content words, 11 of them aligned: coverage 11/23.
        "source": [("The", "DET", True, 1), ("researchers", "NOUN", False, 2),
                   ("collected", "VERB", False, 1), ("thousands", "NOUN", False, 1),
                   ("of", "ADP", True, 1), ("samples", "NOUN", False, 1),
                   ("last", "ADJ", False, 1), ("winter", "NOUN", False, 1),
                   ("farmers", "NOUN", False, 1), ("measured", "VERB", False, 1),
                   ("water", "NOUN", False, 1), ("quality", "NOUN", False, 1),
                   ("vast", "ADJ", False, 1), ("remote", "ADJ", False, 1),
                   ("mountain", "NOUN", False, 1), ("villages", "NOUN", False, 2),
                   ("hoped", "VERB", False, 1), ("build", "VERB", False, 1),
                   ("better", "ADJ", False, 1), ("maps", "NOUN", False, 1),
                   ("predicting", "VERB", False, 2), ("future", "ADJ", False, 1),
                   ("flood", "NOUN", False, 1), ("risks", "NOUN", False, 1),
                   ("spring", "NOUN", False, 1), (".", "PUNCT", True, 1)],
        "target": [("研究者達は", "NOUN", False, 1), ("数千の", "NOUN", False, 1),
                   ("冬に", "NOUN", False, 1), ("サンプルを", "NOUN", False, 2),
                   ("測定した", "VERB", False, 2), ("品質を", "NOUN", False, 1),
                   ("村々で", "NOUN", False, 1), ("離れた", "ADJ", False, 1),
                   ("築いた", "VERB", False, 1), ("地図を", "NOUN", False, 1),
                   ("未来の", "ADJ", False, 1)],
        # aligned source words [1,3,5,7,9,11,13,15,17,19,21] in target order
        # [1,2,4,3,5,6,8,7,9,10,11] (two adjacent swaps).
        "links": [[("strong", 1)], [("strong", 3)], [("strong", 7)], [("strong", 5)] * 2,
                  [("strong", 9)] * 2, [("strong", 11)], [("strong", 15)], [("strong", 13)],
                  [("strong", 17)], [("strong", 19)], [("strong", 21)]],
        "external": [(1, 0), (3, 1), (7, 2), (5, 3), (9, 4), (11, 5), (15, 6),
                     (13, 7), (17, 8), (19, 9), (21, 10)],
        "gold": "1-0 3-1 7-2 5-3 9-4 11-5 15-6 13-7 17-8 19-9 21-10",
        "expect": {"rho": 1.0 - 24.0 / 1320.0, "n_align": 11, "coverage": 11 / 23},
    },
    {
        "id": "s09",
        "source": [("Fresh", "ADJ", False, 1), ("bread", "NOUN", False, 1),
                   ("smells", "VERB", False, 1), ("wonderful", "ADJ", False, 1),
                   (".", "PUNCT", True, 1)],
        "target": [("焼きたての", "ADJ", False, 1), ("パンは", "NOUN", False, 1),
                   ("本当に", "ADV", False, 1), ("素晴らしい", "ADJ", False, 1),
                   ("香りがする", "VERB", False, 2)],
        # 本当に is a spurious hit on "wonderful"; the external aligner omits it.
        "links": [[("strong", 0)], [("strong", 1)], [("cal", 3, 0.90)],
                  [("strong", 3)], [("strong", 2)] * 2],
        "external": [(0, 0), (1, 1), (3, 3), (2, 4)],
        "gold": "0-0 1-1 3-3 2-4",
        "expect": {"rho": 0.8, "n_align": 4, "coverage": 1.0},
    },
    {
        "id": "s10",
        # Twin and mirrors share one exact direction: argmax ties resolve to
        # the lower source index; そっくり duplicates 双子の at similarity 1.0
        # so the one-to-one reduction must keep the lower target index.
        "source": [("Twin", "ADJ", False, 1), ("mirrors", "NOUN", False, 1),
                   ("reflect", "VERB", False, 1), ("light", "NOUN", False, 1),
                   (".", "PUNCT", True, 1)],
        "target": [("双子の", "ADJ", False, 1), ("鏡を", "NOUN", False, 1),
                   ("映す", "VERB", False, 1), ("そっくり", "ADJ", False, 1)],
        "links": [[("exact", 0)], [("strong", 2)], [("strong", 3)], [("exact", 0)]],
        "external": [(0, 0), (2, 1), (3, 2), (0, 3)],
        "gold": "0-0 2-1 3-2 0?3",
        "expect": {"rho": 1.0, "n_align": 3, "coverage": 0.75},
        "tied_source_words": (0, 1),
    },
    {
        "id": "s11",
        # Source spans start at subword 1; slot 0 is a gap (special token).
        # 朝の points mostly at the gap direction, so only the span mask makes
        # it link to Morning; the weak residual is then dropped by theta.
        "source": [("Morning", "NOUN", False, 1), ("fog", "NOUN", False, 1),
                   ("covered", "VERB", False, 1), ("the", "DET", True, 1),
                   ("harbor", "NOUN", False, 2), (".", "PUNCT", True, 1)],
        "target": [("朝の", "NOUN", False, 1), ("霧が", "NOUN", False, 1),
                   ("港を", "NOUN", False, 1), ("覆った", "VERB", False, 1)],
        "links": [[("gap", 0, 0.9)], [("strong", 1)], [("strong", 4)], [("strong", 2)]],
        "external": [(0, 0), (1, 1), (4, 2), (2, 3)],
        "gold": "0-0 1-1 4-2 2-3",
        "expect": {"rho": 0.5, "n_align": 3, "coverage": 0.75},
        "source_gap": True,
    },
    {
        "id": "s12",
        # One target word whose subwords hit two source words; the stronger
        # link (towns, exact) must win the one-to-one reduction.
        "source": [("Seaside", "ADJ", False, 1), ("towns", "NOUN", False, 1),
                   ("welcome", "VERB", False, 1), ("visitors", "NOUN", False, 1),
                   (".", "PUNCT", True, 1)],
        "target": [("海辺の町は", "NOUN", False, 3), ("歓迎する", "VERB", False, 1),
                   ("観光客を", "NOUN", False, 1)],
        "links": [[("cal", 0, 0.93), ("exact", 1), ("cal", 0, 0.90)],
                  [("strong", 2)], [("strong", 3)]],
        "external": [(0, 0), (1, 0), (2, 1), (3, 2)],
        "gold": "0?0 1-0 2-1 3-2",
        "expect": {"rho": 1.0, "n_align": 3, "coverage": 0.75},
    },
]

JUDGMENTS = {
    "s01": 80, "s02": 64, "s03": 0, "s04": 200, "s05": 50, "s06": 150,
    "s07": 140, "s08": 53, "s09": 20, "s10": 25, "s11": 62, "s12": 25,
}


def build_segment(spec):
    def words(entries):
        out, cursor = [], 1 if spec.get("source_gap") else 0
        for surface, pos, is_function, n_sub in entries:
            out.append(Word(surface=surface, span=(cursor, cursor + n_sub),
                            pos=pos, is_function=is_function))
            cursor += n_sub
        return tuple(out)

    source = words(spec["source"])
    # gaps only ever apply to the source side in this corpus
    target, cursor = [], 0
    for surface, pos, is_function, n_sub in spec["target"]:
        target.append(Word(surface=surface, span=(cursor, cursor + n_sub),
                           pos=pos, is_function=is_function))
        cursor += n_sub
    return Segment(id=spec["id"], source_words=source, target_words=tuple(target))


def build_vectors(spec, seg, basis):
    tied = set(spec.get("tied_source_words", ()))
    n_src = seg.subword_count("source")
    src = np.zeros((n_src, DIM))
    if spec.get("source_gap"):
        src[0] = basis[SPECIAL]
    for w_idx, word in enumerate(seg.source_words):
        direction = basis[min(tied)] if w_idx in tied else basis[w_idx]
        for s in range(word.span[0], word.span[1]):
            if w_idx in tied:
                src[s] = direction  # exact copies keep the tie exact
            else:
                src[s] = unit(direction + NOISE * rng.normal(size=DIM))

    n_tgt = seg.subword_count("target")
    tgt = np.zeros((n_tgt, DIM))
    aux = AUX
    for w_idx, word in enumerate(seg.target_words):
        kinds = spec["links"][w_idx]
        for offset, kind in enumerate(kinds):
            row = word.span[0] + offset
            if kind[0] == "strong":
                tgt[row] = unit(basis[kind[1]] + NOISE * rng.normal(size=DIM))
            elif kind[0] == "exact":
                tgt[row] = basis[min(tied)] if kind[1] in tied else basis[kind[1]]
            elif kind[0] == "cal":
                _, s, cos = kind
                tgt[row] = unit(cos * basis[s] + math.sqrt(1 - cos * cos) * basis[aux])
                aux -= 1
            elif kind[0] == "gap":
                _, s, cos_special = kind
                rest = math.sqrt(1 - cos_special * cos_special)
                tgt[row] = cos_special * basis[SPECIAL] + rest * basis[s]
            else:
                raise ValueError(kind)
    return np.round(src, 6), np.round(tgt, 6)


def main():
    out_dir = Path(__file__).resolve().parents[1] / "src" / "wordsync" / "data" / "toy"
    out_dir.mkdir(parents=True, exist_ok=True)

    segments, matrices, externals, gold_lines = [], [], [], []
    for spec in SEGMENTS:
        seg = build_segment(spec)
        basis = make_basis()
        src_vecs, tgt_vecs = build_vectors(spec, seg, basis)
        segments.append(seg)
        matrices.append(EmbeddingMatrix(seg.id, "source", DIM, src_vecs))
        matrices.append(EmbeddingMatrix(seg.id, "target", DIM, tgt_vecs))
        externals.append(spec["external"])
        gold_lines.append(spec["gold"])

    seg_text = write_segments(segments)
    emb_text = write_embeddings(matrices)
    ext_text = "".join(
        " ".join(f"{s}-{t}" for s, t in sorted(pairs)) + "\n" for pairs in externals
    )
    gold_text = "".join(line + "\n" for line in gold_lines)
    judg_text = "segment_id,score,kind\n" + "".join(
        f"{seg_id},{JUDGMENTS[seg_id]},error_based\n" for seg_id in sorted(JUDGMENTS)
    )

    # Re-parse and re-score everything before writing: the committed corpus
    # must reproduce the frozen expectations through the real pipeline.
    parsed = parse_segments(io.StringIO(seg_text))
    embeddings = parse_embeddings(io.StringIO(emb_text), parsed)
    parse_pharaoh(io.StringIO(ext_text), gold=False, corpus=parsed)
    parse_pharaoh(io.StringIO(gold_text), gold=True, corpus=parsed)
    parse_judgments(io.StringIO(judg_text), known_ids=[s.id for s in parsed])

    cfg = MetricConfig(filter=FilterConfig())  # defaults: theta 0.71, drop functions
    failures = []
    for spec, seg in zip(SEGMENTS, parsed):
        result = score_segment(seg, embeddings[seg.id], cfg=cfg)
        expect = spec["expect"]
        checks = {
            "rho": (result.rho, expect["rho"]),
            "coverage": (result.coverage, expect["coverage"]),
            "n_align": (result.n_align, expect["n_align"]),
        }
        for name, (got, want) in checks.items():
            ok = (got is None and want is None) or (
                got is not None and want is not None and abs(got - want) < 1e-9
            )
            if not ok:
                failures.append(f"{seg.id}: {name} = {got!r}, expected {want!r}")
        if result.excluded != expect.get("excluded", False):
            failures.append(f"{seg.id}: excluded = {result.excluded}")
    if failures:
        sys.exit("toy corpus does not reproduce expectations:\n" + "\n".join(failures))

    (out_dir / "segments.jsonl").write_text(seg_text, encoding="utf-8")
    (out_dir / "embeddings.jsonl").write_text(emb_text, encoding="utf-8")
    (out_dir / "external.pharaoh").write_text(ext_text, encoding="utf-8")
    (out_dir / "gold.pharaoh").write_text(gold_text, encoding="utf-8")
    (out_dir / "judgments.csv").write_text(judg_text, encoding="utf-8")
    print(f"wrote toy corpus ({len(parsed)} segments) to {out_dir}")


if __name__ == "__main__":
    main()
