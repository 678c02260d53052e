# coding: utf-8
# Copyright (c) Max-Planck-Institut für Eisenforschung GmbH - Computational Materials Design (CM) Department
# Distributed under the terms of "New BSD License", see the LICENSE file.
"""
Instructor keyword guidance: one line per intended code.

Used to build the guided LDA prior, to seed K-means centroids, and as a reference
codebook the extracted topics are matched against.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from pathlib import Path
from typing import Container

import regex

from topicflow.errors import ConfigError, DataError

logger = logging.getLogger(__name__)

KEYWORD = regex.compile(r"\p{L}+(?:_\p{L}+)*")


@dataclass(frozen=True)
class GuidanceSpec:
    """
    Attributes:
        lines (tuple[tuple[str, ...], ...]): Keywords per line, file order.
        keywords_total_probability (float): Prior mass a guided topic gives its
            keywords. (Default is 0.5.)
    """

    lines: tuple
    keywords_total_probability: float = 0.5

    def __post_init__(self):
        lines = tuple(tuple(line) for line in self.lines)
        for i, line in enumerate(lines):
            if len(line) == 0:
                raise DataError(f"Guidance line {i} has no keywords")
        object.__setattr__(self, "lines", lines)
        if not 0 < self.keywords_total_probability < 1:
            raise ConfigError(
                f"keywords_total_probability must be in (0, 1), got "
                f"{self.keywords_total_probability}"
            )

    def __len__(self) -> int:
        return len(self.lines)

    def with_probability(self, keywords_total_probability: float) -> GuidanceSpec:
        return GuidanceSpec(self.lines, keywords_total_probability)

    def restrict(self, known: Container[str], source: str = "vocabulary") -> list[list[str]]:
        """
        Keep only keywords found in `known`, warning about the rest.

        Args:
            known (Container[str]): Terms available downstream.
            source (str): Name of `known` for messages. (Default is "vocabulary".)

        Returns:
            (list[list[str]]): Surviving keywords per line.

        Raises:
            DataError: If every keyword of a line is missing.
        """
        restricted = []
        for i, line in enumerate(self.lines):
            present = [kw for kw in line if kw in known]
            missing = [kw for kw in line if kw not in known]
            if len(missing) > 0:
                logger.warning(f"Guidance line {i}: {missing} not in the {source}, dropped")
            if len(present) == 0:
                raise DataError(
                    f"Guidance line {i} ({' '.join(line)}) has no keywords in the {source}"
                )
            restricted.append(present)
        return restricted


def load_guidance(
    path: str | Path, keywords_total_probability: float = 0.5
) -> GuidanceSpec:
    """
    Read a guidance file: whitespace-separated keywords, one code per line.

    `#` starts a comment, blank lines are skipped, multiword keywords are written with
    `_`. Keywords are lowercased; tokens with characters other than letters and `_`
    are dropped with a warning.

    Args:
        path (str | Path): UTF-8 text file.
        keywords_total_probability (float): See `GuidanceSpec`. (Default is 0.5.)

    Returns:
        (GuidanceSpec): Lines in file order.
    """
    try:
        with open(path, encoding="utf-8") as f:
            raw_lines = f.read().splitlines()
    except (OSError, UnicodeDecodeError) as e:
        raise DataError(f"Could not read guidance file {path}: {e}") from e

    lines = []
    for line_number, raw in enumerate(raw_lines, start=1):
        content = raw.split("#", 1)[0].strip()
        if content == "":
            continue
        keywords = []
        for token in content.split():
            token = token.lower()
            if KEYWORD.fullmatch(token) is None:
                logger.warning(f"{path}, line {line_number}: ignoring keyword {token!r}")
                continue
            if token not in keywords:
                keywords.append(token)
        if len(keywords) == 0:
            raise DataError(f"{path}, line {line_number}: no usable keywords")
        lines.append(tuple(keywords))

    if len(lines) == 0:
        raise DataError(f"{path}: no guidance lines")
    logger.info(f"Loaded {len(lines)} guidance lines from {path}")
    return GuidanceSpec(tuple(lines), keywords_total_probability)
