"""Produces the input files the wordsync metric engine consumes: tokenized
segment corpora, per-subword encoder embeddings, and external word
alignments. The file formats are the only contract with the engine."""

__version__ = "0.1.0"
