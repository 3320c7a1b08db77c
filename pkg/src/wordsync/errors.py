"""Exception types shared across the package."""

from __future__ import annotations


class ParseError(ValueError):
    """An input file is malformed or violates a per-file invariant.

    Carries the originating file name and line number so command-line
    diagnostics can point at the offending record.
    """

    def __init__(self, message: str, *, source: str | None = None, line: int | None = None):
        self.source = source
        self.line = line
        prefix = source or "<input>"
        if line is not None:
            prefix = f"{prefix}:{line}"
        super().__init__(f"{prefix}: {message}")


class ConsistencyError(ValueError):
    """Inputs are individually well formed but mutually inconsistent."""
