# coding: utf-8
# Copyright (c) Max-Planck-Institut für Eisenforschung GmbH - Computational Materials Design (CM) Department
# Distributed under the terms of "New BSD License", see the LICENSE file.
"""
Compare extracted topics with a reference codebook (e.g. one built by hand).

Topics and codes are paired one-to-one so that the total number of shared terms is
maximal; a code counts as recovered when its partner topic shares at least one term.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np
from scipy.optimize import linear_sum_assignment

from topicflow.model.guidance import GuidanceSpec


@dataclass(frozen=True)
class CodeMatch:
    code: int
    topic: int | None
    shared_terms: tuple[str, ...]
    overlap: float


@dataclass(frozen=True)
class CodebookMatch:
    matches: tuple[CodeMatch, ...]

    @property
    def recovered(self) -> int:
        return sum(1 for m in self.matches if len(m.shared_terms) > 0)

    @property
    def mean_overlap(self) -> float:
        return float(np.mean([m.overlap for m in self.matches]))

    def to_dict(self) -> dict:
        return {
            "codes": len(self.matches),
            "recovered": self.recovered,
            "mean_overlap": self.mean_overlap,
            "matches": [
                {
                    "code": m.code,
                    "topic": m.topic,
                    "shared_terms": list(m.shared_terms),
                    "overlap": m.overlap,
                }
                for m in self.matches
            ],
        }


def overlap_matrix(
    topics: Sequence[Sequence[str]], codes: Sequence[Sequence[str]]
) -> np.ndarray:
    """codes x topics counts of shared terms."""
    return np.array(
        [[len(set(code) & set(topic)) for topic in topics] for code in codes],
        dtype=np.int64,
    ).reshape(len(codes), len(topics))


def match_codebook(
    topics: Sequence[Sequence[str]], codebook: GuidanceSpec | Sequence[Sequence[str]]
) -> CodebookMatch:
    """
    Pair codes with topics maximizing the total number of shared terms.

    Args:
        topics (Sequence[Sequence[str]]): Top terms per topic.
        codebook (GuidanceSpec | Sequence[Sequence[str]]): Terms per code.

    Returns:
        (CodebookMatch): Per code its partner topic (None when there are more codes
            than topics), the shared terms in code order, and the shared fraction of
            the code's terms.
    """
    codes = codebook.lines if isinstance(codebook, GuidanceSpec) else codebook
    counts = overlap_matrix(topics, codes)
    rows, cols = linear_sum_assignment(counts, maximize=True)
    partner = dict(zip(rows.tolist(), cols.tolist()))

    matches = []
    for c, code in enumerate(codes):
        t = partner.get(c)
        shared = () if t is None else tuple(term for term in code if term in set(topics[t]))
        matches.append(
            CodeMatch(code=c, topic=t, shared_terms=shared, overlap=len(shared) / len(code))
        )
    return CodebookMatch(tuple(matches))
