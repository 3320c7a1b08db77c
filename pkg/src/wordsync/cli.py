"""Command-line front end: align, score, eval-align, correlate, report.

Option precedence is command-line flags over --config file values over
built-in defaults.  The effective metric configuration is echoed into every
report so runs are reproducible from their output alone.  Exit codes:
0 success, 2 input/parse error, 3 semantic/consistency error.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys

from . import eval as evalmod
from .align import DEFAULT_FUNCTION_POS, FilterConfig
from .errors import ConsistencyError, ParseError
from .ingest import (
    load_embeddings,
    load_judgments,
    load_pharaoh,
    load_segments,
    write_pharaoh,
)
from .metrics import (
    MetricConfig,
    parse_results,
    parse_results_with_config,
    pipeline_alignment,
    score_segment,
    write_results,
)

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_CONSISTENCY = 3

_DEFAULTS = {
    "theta": 0.71,
    "min_n_align": 2,
    "min_length": 0,
    "mode": "synchro",
    "function_pos": ",".join(sorted(DEFAULT_FUNCTION_POS)),
    "theta_in_combined": False,
    "format": "table",
    "percent": False,
    "segments": None,
    "embeddings": None,
    "external_align": None,
    "pred": None,
    "gold": None,
    "judgments": None,
    "results": None,
    "out": None,
}

class _Options:
    """Merged view of flags, config file, and defaults."""

    def __init__(self, values: dict):
        self.__dict__.update(values)

    def require(self, *keys: str):
        for key in keys:
            if getattr(self, key) is None:
                flag = "--" + key.replace("_", "-")
                raise ParseError(f"missing required {flag} (flag or config-file key {key!r})")


def _merge_options(args: argparse.Namespace) -> _Options:
    values = dict(_DEFAULTS)
    config_path = getattr(args, "config", None)
    if config_path:
        try:
            with open(config_path, "rb") as fp:
                loaded = json.load(fp)
        except OSError as exc:
            raise ParseError(f"cannot read config file: {exc}")
        except ValueError as exc:
            raise ParseError(f"malformed config file: {exc}", source=str(config_path))
        if not isinstance(loaded, dict):
            raise ParseError("config file must hold a JSON object", source=str(config_path))
        for key, value in loaded.items():
            if key not in values:
                raise ParseError(f"unknown config key {key!r}", source=str(config_path))
            values[key] = value
    for key, value in vars(args).items():
        if key in values and value is not None:
            values[key] = value
    opts = _Options(values)
    if not isinstance(opts.theta, (int, float)) or not 0.0 <= float(opts.theta) <= 1.0:
        raise ParseError(f"--theta must be in [0, 1], got {opts.theta!r}")
    if not isinstance(opts.min_n_align, int) or opts.min_n_align < 0:
        raise ParseError(f"--min-n-align must be a nonnegative integer, got {opts.min_n_align!r}")
    if not isinstance(opts.min_length, int) or opts.min_length < 0:
        raise ParseError(f"--min-length must be a nonnegative integer, got {opts.min_length!r}")
    if opts.mode not in ("synchro", "combined"):
        raise ParseError(f"--mode must be 'synchro' or 'combined', got {opts.mode!r}")
    if opts.format not in ("table", "records"):
        raise ParseError(f"--format must be 'table' or 'records', got {opts.format!r}")
    return opts


def _metric_config(opts: _Options) -> MetricConfig:
    pos_text = (opts.function_pos or "").strip()
    drop = pos_text.lower() not in ("", "none")
    tags = frozenset(t.strip() for t in pos_text.split(",") if t.strip()) if drop else DEFAULT_FUNCTION_POS
    fcfg = FilterConfig(theta=float(opts.theta), function_pos=tags, drop_function_words=drop)
    return MetricConfig(
        filter=fcfg,
        min_n_align=opts.min_n_align,
        use_intersection=opts.mode == "combined",
        theta_in_intersection=bool(opts.theta_in_combined),
    )


def _effective_config(opts: _Options, cfg: MetricConfig) -> dict:
    return {
        "mode": opts.mode,
        "theta": cfg.filter.theta,
        "function_pos": (
            ",".join(sorted(cfg.filter.function_pos)) if cfg.filter.drop_function_words else "none"
        ),
        "theta_in_combined": cfg.theta_in_intersection,
        "min_n_align": cfg.min_n_align,
    }


def _config_header_lines(config: dict) -> str:
    return "".join(f"# {key}={config[key]}\n" for key in sorted(config))


def _write_output(text: str, out: str | None):
    if out is None:
        sys.stdout.write(text)
    else:
        with open(out, "w", encoding="utf-8", newline="\n") as fp:
            fp.write(text)


def _load_scoring_inputs(opts: _Options):
    opts.require("segments", "embeddings")
    segments = load_segments(opts.segments)
    embeddings = load_embeddings(opts.embeddings, segments)
    external = None
    if opts.mode == "combined":
        opts.require("external_align")
    if opts.external_align is not None:
        external = load_pharaoh(opts.external_align, gold=False, corpus=segments)
    return segments, embeddings, external


def _score_corpus(opts: _Options, cfg: MetricConfig):
    segments, embeddings, external = _load_scoring_inputs(opts)
    results = []
    alignments = []
    for idx, seg in enumerate(segments):
        if seg.id not in embeddings:
            raise ConsistencyError(f"no embeddings for segment {seg.id!r}")
        ext = external[idx] if external is not None else None
        alignments.append(pipeline_alignment(seg, embeddings[seg.id], ext, cfg))
        results.append(score_segment(seg, embeddings[seg.id], ext, cfg))
    return segments, results, alignments


def cmd_align(opts: _Options) -> int:
    cfg = _metric_config(opts)
    _, _, alignments = _score_corpus(opts, cfg)
    _write_output(write_pharaoh(alignments), opts.out)
    return EXIT_OK


def _results_table(results, config: dict) -> str:
    lines = [_config_header_lines(config)]
    lines.append(
        f"{'segment_id':<14} {'rho':>8} {'coverage':>9} {'combined':>9} "
        f"{'n_align':>7} {'length':>6}  excluded\n"
    )
    for r in sorted(results, key=lambda r: r.segment_id):
        lines.append(
            f"{r.segment_id:<14} {evalmod.fmt_score(r.rho):>8} {evalmod.fmt_score(r.coverage):>9} "
            f"{evalmod.fmt_score(r.combined):>9} {r.n_align:>7} {r.source_length:>6}  "
            f"{'yes' if r.excluded else 'no'}\n"
        )
    return "".join(lines)


def _summary_text(results, config: dict) -> str:
    excluded = sum(1 for r in results if r.excluded)
    parts = [
        _config_header_lines(config),
        f"segments: {len(results)} scored, {excluded} excluded\n",
        "\nby minimum aligned words:\n",
        evalmod.render_buckets(evalmod.bucket_by_nalign(results)),
        "\nby source length:\n",
        evalmod.render_buckets(evalmod.bucket_by_length(results)),
    ]
    return "".join(parts)


def cmd_score(opts: _Options) -> int:
    cfg = _metric_config(opts)
    _, results, _ = _score_corpus(opts, cfg)
    ordered = sorted(results, key=lambda r: r.segment_id)
    config = _effective_config(opts, cfg)
    if opts.format == "records":
        body = write_results(ordered, header=config)
    else:
        body = _results_table(ordered, config)
    _write_output(body, opts.out)
    summary = _summary_text(ordered, config)
    if opts.out is not None:
        sys.stdout.write(summary)
    else:
        sys.stdout.write("\n" + summary)
    return EXIT_OK


def cmd_eval_align(opts: _Options) -> int:
    opts.require("pred", "gold")
    corpus = load_segments(opts.segments) if opts.segments else None
    pred = load_pharaoh(opts.pred, gold=False, corpus=corpus)
    gold = load_pharaoh(opts.gold, gold=True, corpus=corpus)
    if len(pred) != len(gold):
        raise ConsistencyError(
            f"line count mismatch: {len(pred)} predicted vs {len(gold)} gold alignments"
        )
    per_segment = [(g.segment_id, evalmod.aer(p, g)) for p, g in zip(pred, gold)]
    corpus_result = evalmod.corpus_aer(pred, gold)
    _write_output(
        evalmod.render_aer(corpus_result, per_segment, fmt=opts.format, percent=opts.percent),
        opts.out,
    )
    return EXIT_OK


def cmd_correlate(opts: _Options) -> int:
    opts.require("results", "judgments")
    with open(opts.results, "rb") as fp:
        results = parse_results(fp, source=str(opts.results))
    judgments = load_judgments(opts.judgments)
    kinds = {j.score_kind for j in judgments}
    if len(kinds) > 1:
        raise ConsistencyError(f"mixed score kinds in judgments: {sorted(kinds)}")
    score_kind = kinds.pop() if kinds else "error_based"
    selected = [
        r
        for r in results
        if r.rho is not None
        and r.n_align >= opts.min_n_align
        and r.source_length >= opts.min_length
    ]
    overall = [
        evalmod.correlate_with_judgments(selected, judgments, field)
        for field in evalmod.METRIC_FIELDS
    ]
    by_bucket = []
    for bucket, members in _length_groups(selected):
        cors = []
        for field in evalmod.METRIC_FIELDS:
            try:
                cors.append(evalmod.correlate_with_judgments(members, judgments, field))
            except ConsistencyError:
                cors.append(evalmod.CorrelationResult(metric_name=field, r=None, n_points=0))
        by_bucket.append((bucket, cors))
    _write_output(
        evalmod.render_correlations(overall, by_bucket, score_kind=score_kind, fmt=opts.format),
        opts.out,
    )
    return EXIT_OK


def _length_groups(results):
    thresholds = evalmod.DEFAULT_LENGTH_THRESHOLDS
    groups = [(f"len<{thresholds[0]}", [r for r in results if r.source_length < thresholds[0]])]
    for t in thresholds:
        groups.append((f"len≥{t}", [r for r in results if r.source_length >= t]))
    return groups


def cmd_report(opts: _Options) -> int:
    opts.require("results")
    with open(opts.results, "rb") as fp:
        results, scored_config = parse_results_with_config(fp, source=str(opts.results))
    if opts.format == "records":
        text = evalmod.render_buckets(
            evalmod.bucket_by_nalign(results) + evalmod.bucket_by_length(results), fmt="records"
        )
    else:
        # echo the config the results were scored with, when the file has it
        config = scored_config or _effective_config(opts, _metric_config(opts))
        text = _summary_text(sorted(results, key=lambda r: r.segment_id), config)
    _write_output(text, opts.out)
    return EXIT_OK


_COMMANDS = {
    "align": cmd_align,
    "score": cmd_score,
    "eval-align": cmd_eval_align,
    "correlate": cmd_correlate,
    "report": cmd_report,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="wordsync",
        description="Word-order synchronization metrics for interpretation and translation output.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p):
        p.add_argument("--config", help="JSON config file; flags override its values")
        p.add_argument("--out", help="output path (default: stdout)")
        p.add_argument("--format", choices=["table", "records"], default=None,
                       help="output format (default: table)")

    def add_metric(p):
        p.add_argument("--theta", type=float, default=None,
                       help="similarity threshold in [0,1]; 0 disables (default: 0.71)")
        p.add_argument("--min-n-align", type=int, default=None, dest="min_n_align",
                       help="minimum aligned words for inclusion (default: 2)")
        p.add_argument("--mode", choices=["synchro", "combined"], default=None,
                       help="greedy-only or intersected alignment pipeline (default: synchro)")
        p.add_argument("--function-pos", default=None, dest="function_pos",
                       help="comma-separated POS tags filtered as function words; "
                            "'' or 'none' keeps them")
        p.add_argument("--theta-in-combined", action=argparse.BooleanOptionalAction,
                       default=None, dest="theta_in_combined",
                       help="also apply the similarity threshold in combined mode")

    def add_inputs(p):
        p.add_argument("--segments", help="segment corpus file")
        p.add_argument("--embeddings", help="embedding dump file")
        p.add_argument("--external-align", dest="external_align",
                       help="externally produced Pharaoh alignments")

    p_align = sub.add_parser("align", help="write the pipeline's word alignments as Pharaoh lines")
    add_common(p_align)
    add_metric(p_align)
    add_inputs(p_align)

    p_score = sub.add_parser("score", help="score every segment and print summary buckets")
    add_common(p_score)
    add_metric(p_score)
    add_inputs(p_score)

    p_eval = sub.add_parser("eval-align", help="evaluate predicted alignments against gold (AER)")
    add_common(p_eval)
    p_eval.add_argument("--pred", help="predicted Pharaoh alignments")
    p_eval.add_argument("--gold", help="gold Pharaoh alignments (i-j sure, i?j possible)")
    p_eval.add_argument("--segments", help="optional corpus for id and range validation")
    p_eval.add_argument("--percent", action=argparse.BooleanOptionalAction, default=None,
                        help="display AER/P/R as percentages")

    p_corr = sub.add_parser("correlate", help="correlate scores with human judgments")
    add_common(p_corr)
    p_corr.add_argument("--results", help="results file written by 'score --format records'")
    p_corr.add_argument("--judgments", help="human judgment CSV")
    p_corr.add_argument("--min-n-align", type=int, default=None, dest="min_n_align",
                        help="only correlate segments with at least this many aligned words")
    p_corr.add_argument("--min-length", type=int, default=None, dest="min_length",
                        help="only correlate segments with at least this many source words")

    p_report = sub.add_parser("report", help="re-render bucket reports from a results file")
    add_common(p_report)
    p_report.add_argument("--results", help="results file written by 'score --format records'")

    return parser


def _fail(message) -> None:
    print(f"wordsync: {message}", file=sys.stderr)


def main(argv: list[str] | None = None) -> int:
    logging.basicConfig(format="wordsync: %(message)s", level=logging.WARNING)
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        opts = _merge_options(args)
        return _COMMANDS[args.command](opts)
    except ParseError as exc:
        _fail(exc)
        return EXIT_INPUT
    except FileNotFoundError as exc:
        _fail(f"cannot open {exc.filename or exc}")
        return EXIT_INPUT
    except ConsistencyError as exc:
        _fail(exc)
        return EXIT_CONSISTENCY


def main_entry():
    raise SystemExit(main())


if __name__ == "__main__":
    main_entry()
