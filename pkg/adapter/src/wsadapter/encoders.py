"""Embedding backends.

``hash:<dim>`` derives one deterministic unit vector per distinct subword
string from a SHA-256 of (seed, subword): fully offline, reproducible bit
for bit, and sufficient to exercise every downstream contract. Any other
encoder identifier is treated as a transformers model name and loaded
lazily; that path needs the model weights available locally.

Both backends own their subword tokenizer so the spans written into the
segment file and the vectors dumped later always agree.
"""

from __future__ import annotations

import hashlib

import numpy as np

from .config import AdapterConfig

_HASH_CHUNK = 3  # subword = chunk of up to 3 characters


class HashEncoder:
    """Deterministic offline encoder; no context, one vector per subword type."""

    def __init__(self, dim: int, seed: int):
        if dim < 1:
            raise ValueError("hash encoder dim must be >= 1")
        self.dim = dim
        self.seed = seed
        self.depth = 1
        self.default_layer = 0

    def subword_tokenize(self, word: str) -> list[str]:
        return [word[i : i + _HASH_CHUNK] for i in range(0, len(word), _HASH_CHUNK)]

    def _vector(self, token: str) -> np.ndarray:
        digest = hashlib.sha256(f"{self.seed}\x00{token}".encode("utf-8")).digest()
        rng = np.random.Generator(np.random.PCG64(int.from_bytes(digest[:8], "big")))
        v = rng.normal(size=self.dim)
        norm = np.linalg.norm(v)
        if norm < 1e-9:  # astronomically unlikely; keep cosine defined
            v[0] = 1.0
            norm = 1.0
        return v / norm

    def encode_words(self, words: list[str], layer: int) -> tuple[list[list[str]], np.ndarray]:
        if layer != 0:
            raise ValueError(f"hash encoder has a single layer (0), got {layer}")
        subwords = [self.subword_tokenize(w) for w in words]
        flat = [token for group in subwords for token in group]
        matrix = np.stack([self._vector(token) for token in flat]) if flat else np.zeros((0, self.dim))
        return subwords, matrix


class TransformerEncoder:
    """Contextual embeddings from a pretrained multilingual encoder.

    Words are subword-tokenized individually (no special tokens), the flat
    sequence is encoded in one pass, and the requested hidden layer is
    returned. Requires transformers + torch and locally available weights.
    """

    def __init__(self, model_name: str, device: str = "cpu"):
        try:
            import torch
            from transformers import AutoModel, AutoTokenizer
        except ImportError as exc:  # pragma: no cover - optional dependency
            raise RuntimeError(
                "transformers and torch are required for encoder "
                f"{model_name!r}; install the [models] extra or use hash:<dim>"
            ) from exc
        self._torch = torch
        self.tokenizer = AutoTokenizer.from_pretrained(model_name)
        self.model = AutoModel.from_pretrained(model_name, output_hidden_states=True)
        self.model.eval().to(device)
        self.device = device
        self.depth = self.model.config.num_hidden_layers + 1  # embeddings + layers
        self.default_layer = min(8, self.depth - 1)
        self.dim = self.model.config.hidden_size

    def subword_tokenize(self, word: str) -> list[str]:
        tokens = self.tokenizer.tokenize(word)
        return tokens if tokens else [self.tokenizer.unk_token]

    def encode_words(self, words: list[str], layer: int) -> tuple[list[list[str]], np.ndarray]:
        if not 0 <= layer < self.depth:
            raise ValueError(f"layer {layer} outside encoder depth {self.depth}")
        subwords = [self.subword_tokenize(w) for w in words]
        flat = [token for group in subwords for token in group]
        ids = self.tokenizer.convert_tokens_to_ids(flat)
        if len(ids) > self.tokenizer.model_max_length:
            raise ValueError(f"sequence of {len(ids)} subwords exceeds model length")
        torch = self._torch
        with torch.no_grad():
            batch = torch.tensor([ids], device=self.device)
            output = self.model(input_ids=batch, attention_mask=torch.ones_like(batch))
        hidden = output.hidden_states[layer][0].cpu().numpy()
        return subwords, hidden.astype(np.float64)


def get_encoder(cfg: AdapterConfig):
    if cfg.encoder.startswith("hash:"):
        dim = int(cfg.encoder.split(":", 1)[1])
        return HashEncoder(dim=dim, seed=cfg.seed)
    return TransformerEncoder(cfg.encoder, device=cfg.device)  # pragma: no cover


def resolve_layer(encoder, cfg: AdapterConfig) -> int:
    layer = cfg.layer if cfg.layer is not None else encoder.default_layer
    if not 0 <= layer < encoder.depth:
        raise ValueError(f"layer {layer} outside encoder depth {encoder.depth}")
    return layer
