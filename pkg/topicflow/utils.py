"""
Stuff that doesn't fit anywhere yet.
"""

from __future__ import annotations

from importlib import resources
from pathlib import Path

import numpy as np

from topicflow.errors import ConfigError


class Singleton(type):
    """Metaclass keeping one instance per class until `clear_instance` is called."""

    _instances: dict = {}

    def __call__(cls, *args, **kwargs):
        if cls not in cls._instances:
            cls._instances[cls] = super().__call__(*args, **kwargs)
        return cls._instances[cls]

    def clear_instance(cls):
        cls._instances.pop(cls, None)


def read_word_list(path: str | Path) -> frozenset[str]:
    """
    Read a one-token-per-line word list (stop words, name blocklists).

    Blank lines and lines starting with `#` are skipped; entries are lowercased.

    Args:
        path (str | Path): UTF-8 text file.

    Returns:
        (frozenset[str]): The words.
    """
    try:
        with open(path, encoding="utf-8") as f:
            lines = f.read().splitlines()
    except OSError as e:
        raise ConfigError(f"Could not read word list {path}: {e}") from e
    words = set()
    for line in lines:
        line = line.strip()
        if line and not line.startswith("#"):
            words.add(line.lower())
    return frozenset(words)


def default_stopword_path() -> str:
    return str(resources.files("topicflow") / "data" / "stopwords_en.txt")


def derive_seed(*entropy: int) -> int:
    """A 32 bit seed derived deterministically from integer entropy."""
    return int(np.random.SeedSequence(list(entropy)).generate_state(1)[0])
