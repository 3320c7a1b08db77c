"""Word-order synchronization metrics for simultaneous interpretation and
simultaneous/offline translation output."""

from __future__ import annotations

from importlib import resources
from pathlib import Path

__version__ = "0.1.0"


def toy_dir() -> Path:
    """Filesystem path of the bundled toy corpus."""
    return Path(resources.files("wordsync").joinpath("data/toy"))
