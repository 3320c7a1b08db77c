"""Adapter configuration."""

from __future__ import annotations

from dataclasses import dataclass


@dataclass(frozen=True)
class AdapterConfig:
    """Which models to run and how.

    ``encoder`` is either ``hash:<dim>`` (deterministic offline backend, no
    model downloads) or a transformers model identifier such as
    ``bert-base-multilingual-cased``. ``layer`` of None picks the encoder's
    default extraction layer (8 for transformer encoders, 0 for the hash
    backend). The hash backend derives every vector from ``seed`` and the
    subword string, so runs are reproducible bit for bit.
    """

    encoder: str = "hash:64"
    layer: int | None = None
    tagger: str = "heuristic"
    aligner: str = "mutual"
    batch_size: int = 8
    device: str = "cpu"
    seed: int = 0
    source_lang: str = "en"
    target_lang: str = "ja"

    def __post_init__(self):
        if self.batch_size < 1:
            raise ValueError("batch_size must be >= 1")
        if self.tagger != "heuristic":
            raise ValueError(
                f"unknown tagger {self.tagger!r}: only the built-in 'heuristic' "
                "tagger is available"
            )
        if self.aligner not in ("mutual", "forward"):
            raise ValueError(f"unknown aligner {self.aligner!r} (use 'mutual' or 'forward')")
