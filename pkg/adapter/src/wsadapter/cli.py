"""Adapter command line: segments | embed | align."""

from __future__ import annotations

import argparse
import logging
import sys

from .config import AdapterConfig
from .pipeline import produce_embeddings, produce_external_alignments, produce_segments


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="wordsync-adapter",
        description="Produce segment, embedding, and alignment files for the metric engine.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p, needs_input_help):
        p.add_argument("input", help=needs_input_help)
        p.add_argument("--out", required=True, help="output path (written atomically)")
        p.add_argument("--model", default="hash:64",
                       help="encoder: hash:<dim> (offline) or a transformers model id")
        p.add_argument("--layer", type=int, default=None,
                       help="hidden layer to extract (default: encoder-specific)")
        p.add_argument("--batch-size", type=int, default=8, dest="batch_size")
        p.add_argument("--seed", type=int, default=0,
                       help="seed for the hash encoder's derived vectors")
        p.add_argument("--device", default="cpu")

    p_seg = sub.add_parser("segments", help="tokenize and tag a source<TAB>target pair file")
    add_common(p_seg, "tab-separated parallel text, one pair per line")
    p_seg.add_argument("--source-lang", default="en", dest="source_lang")
    p_seg.add_argument("--target-lang", default="ja", dest="target_lang")

    p_emb = sub.add_parser("embed", help="dump per-subword embeddings for a segment file")
    add_common(p_emb, "segment file produced by the segments step")

    p_align = sub.add_parser("align", help="write word alignments for a segment file")
    add_common(p_align, "segment file produced by the segments step")
    p_align.add_argument("--aligner", default="mutual", choices=["mutual", "forward"])

    return parser


def main(argv: list[str] | None = None) -> int:
    logging.basicConfig(format="wordsync-adapter: %(message)s", level=logging.WARNING)
    args = build_parser().parse_args(argv)
    try:
        cfg = AdapterConfig(
            encoder=args.model,
            layer=args.layer,
            batch_size=args.batch_size,
            seed=args.seed,
            device=args.device,
            source_lang=getattr(args, "source_lang", "en"),
            target_lang=getattr(args, "target_lang", "ja"),
            aligner=getattr(args, "aligner", "mutual"),
        )
        if args.command == "segments":
            stats = produce_segments(args.input, cfg, args.out)
        elif args.command == "embed":
            stats = produce_embeddings(args.input, cfg, args.out)
        else:
            stats = produce_external_alignments(args.input, cfg, args.out)
    except (ValueError, OSError) as exc:
        print(f"wordsync-adapter: {exc}", file=sys.stderr)
        return 2
    print(f"{args.command}: {stats.written} written, {stats.skipped} skipped", file=sys.stderr)
    return 0


def main_entry():
    raise SystemExit(main())


if __name__ == "__main__":
    main_entry()
