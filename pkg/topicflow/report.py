# coding: utf-8
# Copyright (c) Max-Planck-Institut für Eisenforschung GmbH - Computational Materials Design (CM) Department
# Distributed under the terms of "New BSD License", see the LICENSE file.
"""
Topic reports and their markdown, JSON and CSV renderings.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Any

import pandas as pd

from topicflow.config import REPORT_FORMATS
from topicflow.engines.base import Topics
from topicflow.errors import ConfigError

SIGNIFICANT_DIGITS = 6


@dataclass(frozen=True)
class TopicReport:
    """
    Attributes:
        engine (str): "lsa", "lda" or "cluster".
        k (int): Number of topics.
        topics (Topics): Ranked (term, weight) lists per topic.
        top_n (int): Requested terms per topic.
        provenance (dict): Config hash, seed, vocabulary size, document count, full
            configuration and engine parameters.
        extras (dict): Optional sections (coherence, codebook comparison, ...).
    """

    engine: str
    k: int
    topics: Topics
    top_n: int
    provenance: dict = field(default_factory=dict)
    extras: dict = field(default_factory=dict)

    def __post_init__(self):
        if len(self.topics) != self.k:
            raise ValueError(f"Expected {self.k} topics, got {len(self.topics)}")
        for topic_id, terms in self.topics:
            if len(terms) > self.top_n:
                raise ValueError(f"Topic {topic_id} has more than {self.top_n} terms")

    def to_dict(self) -> dict:
        data = {
            "engine": self.engine,
            "k": self.k,
            "top_n": self.top_n,
            "topics": [
                {
                    "topic": topic_id,
                    "terms": [{"term": term, "weight": weight} for term, weight in terms],
                }
                for topic_id, terms in self.topics
            ],
            "provenance": self.provenance,
        }
        data.update(self.extras)
        return data

    def to_frame(self) -> pd.DataFrame:
        rows = [
            {"topic": topic_id, "rank": rank, "term": term, "weight": weight}
            for topic_id, terms in self.topics
            for rank, (term, weight) in enumerate(terms, start=1)
        ]
        return pd.DataFrame(rows, columns=["topic", "rank", "term", "weight"])


def round_floats(value: Any, digits: int = SIGNIFICANT_DIGITS) -> Any:
    """Round every float nested in dicts, lists and tuples to `digits` significant digits."""
    if isinstance(value, float):
        return float(f"{value:.{digits}g}")
    if isinstance(value, dict):
        return {k: round_floats(v, digits) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [round_floats(v, digits) for v in value]
    return value


def _render_markdown(report: TopicReport) -> str:
    columns = [f"Topic {topic_id}" for topic_id, _ in report.topics]
    depth = max((len(terms) for _, terms in report.topics), default=0)
    lines = [
        f"# Topics ({report.engine}, K={report.k})",
        "",
        "| " + " | ".join(columns) + " |",
        "|" + "|".join("---" for _ in columns) + "|",
    ]
    for rank in range(depth):
        cells = [terms[rank][0] if rank < len(terms) else "" for _, terms in report.topics]
        lines.append("| " + " | ".join(cells) + " |")
    return "\n".join(lines) + "\n"


def _render_json(report: TopicReport) -> str:
    return (
        json.dumps(round_floats(report.to_dict()), sort_keys=True, ensure_ascii=False, indent=2)
        + "\n"
    )


def _render_csv(report: TopicReport) -> str:
    frame = report.to_frame()
    return frame.to_csv(
        index=False, lineterminator="\n", float_format=f"%.{SIGNIFICANT_DIGITS}g"
    )


_renderers = {
    "markdown": _render_markdown,
    "json": _render_json,
    "csv": _render_csv,
}


def render(report: TopicReport, format: str = "markdown") -> bytes:
    """
    Args:
        report (TopicReport): The report.
        format (str): "markdown" (topics as columns), "json" (canonical: sorted keys,
            six significant digits) or "csv" (one row per topic, rank, term and
            weight). (Default is "markdown".)

    Returns:
        (bytes): UTF-8 text, identical for identical reports.
    """
    try:
        renderer = _renderers[format]
    except KeyError:
        raise ConfigError(
            f"Unknown report format {format!r}, choose one of {REPORT_FORMATS}"
        ) from None
    return renderer(report).encode("utf-8")
