# coding: utf-8
# Copyright (c) Max-Planck-Institut für Eisenforschung GmbH - Computational Materials Design (CM) Department
# Distributed under the terms of "New BSD License", see the LICENSE file.
"""
Topic coherence and the scan over K that picks the number of topics.

Two measures are available:

- `u_mass`: mean over ordered top-word pairs (later word, earlier word) of
  log((D(w_i, w_j) + 1) / D(w_j)), with D counting documents.
- `c_v`: NPMI over boolean sliding windows, each top word represented by its NPMI
  vector against the whole top list, compared by cosine to the topic's sum vector.
"""

from __future__ import annotations

import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional, Sequence

import numpy as np
import pandas as pd
import seaborn as sns
from matplotlib.figure import Figure

from topicflow.config import DEFAULT_SEED, MEASURES
from topicflow.engines.base import Topics
from topicflow.engines.guided_lda import build_eta, fit_lda, lda_topics
from topicflow.errors import ConfigError, DataError
from topicflow.model.guidance import GuidanceSpec
from topicflow.model.preprocess import TokenDocument, Vocabulary
from topicflow.utils import derive_seed

logger = logging.getLogger(__name__)

EPSILON = 1e-12


def topic_terms(topics: Topics) -> list[list[str]]:
    """Strip ids and weights, keeping the ranked terms of every topic."""
    return [[term for term, _ in terms] for _, terms in topics]


def _check_topics(topics: Sequence[Sequence[str]]) -> list[str]:
    if len(topics) == 0:
        raise ConfigError("No topics to score")
    unique = []
    seen = set()
    for i, topic in enumerate(topics):
        if len(topic) == 0:
            raise ConfigError(f"Topic {i} has no terms")
        for term in topic:
            if term not in seen:
                seen.add(term)
                unique.append(term)
    return unique


def _document_presence(terms: list[str], docs: Sequence[TokenDocument]) -> np.ndarray:
    column = {t: i for i, t in enumerate(terms)}
    presence = np.zeros((len(docs), len(terms)), dtype=np.int64)
    for d, doc in enumerate(docs):
        for token in set(doc.tokens):
            if token in column:
                presence[d, column[token]] = 1
    return presence


def coherence_umass(
    topics: Sequence[Sequence[str]], docs: Sequence[TokenDocument]
) -> float:
    """
    U_Mass coherence with document co-occurrence counts.

    Args:
        topics (Sequence[Sequence[str]]): Ranked top terms per topic.
        docs (Sequence[TokenDocument]): The reference documents.

    Returns:
        (float): Mean over topics; a single-term topic scores 0.
    """
    terms = _check_topics(topics)
    presence = _document_presence(terms, docs)
    joint = presence.T @ presence
    column = {t: i for i, t in enumerate(terms)}
    missing = [t for t in terms if joint[column[t], column[t]] == 0]
    if len(missing) > 0:
        raise DataError(f"Terms {missing} occur in no document")

    scores = []
    for topic in topics:
        idx = [column[t] for t in topic]
        pair_scores = [
            np.log((joint[idx[i], idx[j]] + 1) / joint[idx[j], idx[j]])
            for i in range(1, len(idx))
            for j in range(i)
        ]
        scores.append(float(np.mean(pair_scores)) if len(pair_scores) > 0 else 0.0)
    return float(np.mean(scores))


def window_counts(
    terms: list[str], docs: Sequence[TokenDocument], window: int
) -> tuple[np.ndarray, int]:
    """
    Boolean sliding-window co-occurrence counts.

    A document no longer than `window` is a single window, empty ones included;
    a longer one contributes `len - window + 1` windows.

    Args:
        terms (list[str]): Terms to count.
        docs (Sequence[TokenDocument]): Token sequences.
        window (int): Window size.

    Returns:
        (numpy.ndarray): terms x terms counts of windows containing both (the
            diagonal holds single-term counts).
        (int): The number of windows.
    """
    column = {t: i for i, t in enumerate(terms)}
    counts = np.zeros((len(terms), len(terms)), dtype=np.int64)
    n_windows = 0
    for doc in docs:
        length = len(doc.tokens)
        n_doc_windows = max(1, length - window + 1)
        n_windows += n_doc_windows
        hits = [(p, column[t]) for p, t in enumerate(doc.tokens) if t in column]
        if len(hits) == 0:
            continue
        positions = np.zeros((length, len(terms)), dtype=np.int64)
        for p, c in hits:
            positions[p, c] = 1
        if length <= window:
            present = positions.any(axis=0, keepdims=True).astype(np.int64)
        else:
            running = np.vstack(
                [np.zeros((1, len(terms)), dtype=np.int64), np.cumsum(positions, axis=0)]
            )
            present = ((running[window:] - running[:-window]) > 0).astype(np.int64)
        counts += present.T @ present
    return counts, n_windows


def npmi_matrix(
    terms: list[str], docs: Sequence[TokenDocument], window: int = 110
) -> np.ndarray:
    """
    Normalized pointwise mutual information between all pairs of `terms`.

    Pairs that share every window score 1.
    """
    counts, n_windows = window_counts(terms, docs, window)
    marginal = np.diag(counts) / n_windows
    missing = [t for t, p in zip(terms, marginal) if p == 0]
    if len(missing) > 0:
        raise DataError(f"Terms {missing} occur in no window")
    joint = counts / n_windows
    npmi = np.log((joint + EPSILON) / np.outer(marginal, marginal)) / -np.log(
        joint + EPSILON
    )
    npmi[counts == n_windows] = 1.0
    return npmi


def coherence_cv(
    topics: Sequence[Sequence[str]], docs: Sequence[TokenDocument], window: int = 110
) -> float:
    """
    C_v coherence.

    Args:
        topics (Sequence[Sequence[str]]): Ranked top terms per topic.
        docs (Sequence[TokenDocument]): The reference documents.
        window (int): Sliding window size, >= 2. (Default is 110.)

    Returns:
        (float): Mean over topics of the mean word-to-topic cosine.
    """
    if window < 2:
        raise ConfigError(f"window must be >= 2, got {window}")
    terms = _check_topics(topics)
    npmi = npmi_matrix(terms, docs, window)
    column = {t: i for i, t in enumerate(terms)}

    scores = []
    for topic in topics:
        idx = [column[t] for t in topic]
        context = npmi[np.ix_(idx, idx)]
        total = context.sum(axis=0)
        norms = np.linalg.norm(context, axis=1) * np.linalg.norm(total)
        with np.errstate(divide="ignore", invalid="ignore"):
            cosines = np.where(norms > 0, context @ total / norms, 0.0)
        scores.append(float(np.mean(cosines)))
    return float(np.mean(scores))


def score_topics(
    topics: Sequence[Sequence[str]],
    docs: Sequence[TokenDocument],
    measure: str = "c_v",
    window: int = 110,
) -> float:
    if measure == "c_v":
        return coherence_cv(topics, docs, window)
    if measure == "u_mass":
        return coherence_umass(topics, docs)
    raise ConfigError(f"Unknown coherence measure {measure!r}, choose one of {MEASURES}")


@dataclass(frozen=True)
class CoherenceReport:
    """
    Median coherence per number of topics.

    Attributes:
        measure (str): "c_v" or "u_mass".
        scores (tuple[tuple[int, float], ...]): (K, score), contiguous ascending K.
        runs (dict[int, tuple[float, ...]]): The individual fit scores per K.
    """

    measure: str
    scores: tuple
    runs: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        scores = tuple((int(k), float(s)) for k, s in self.scores)
        if len(scores) == 0:
            raise ValueError("A coherence report needs at least one score")
        ks = [k for k, _ in scores]
        if ks != list(range(ks[0], ks[0] + len(ks))):
            raise ValueError(f"Scores must cover a contiguous K range, got {ks}")
        object.__setattr__(self, "scores", scores)

    @property
    def best_k(self) -> int:
        # argmax returns the first maximum, i.e. the smaller K on ties
        return self.scores[int(np.argmax([s for _, s in self.scores]))][0]

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame(
            {
                "K": [k for k, _ in self.scores],
                "Coherence Score": [s for _, s in self.scores],
            }
        )

    def to_dict(self) -> dict:
        return {
            "measure": self.measure,
            "best_k": self.best_k,
            "scores": [{"K": k, "score": s} for k, s in self.scores],
            "runs": {str(k): list(v) for k, v in sorted(self.runs.items())},
        }

    def render_table(self) -> str:
        lines = ["| K | Coherence Score |", "|---|---|"]
        lines += [f"| {k} | {s:.4f} |" for k, s in self.scores]
        return "\n".join(lines) + "\n"


def plot_coherence(report: CoherenceReport, path: str | Path) -> Path:
    """Save the score curve over K, best K marked."""
    frame = report.to_frame()
    fig = Figure(figsize=(6, 4))
    ax = fig.add_subplot()
    sns.lineplot(data=frame, x="K", y="Coherence Score", marker="o", ax=ax)
    ax.axvline(report.best_k, color="grey", linestyle="--")
    ax.set_title(f"{report.measure} coherence, best K = {report.best_k}")
    fig.tight_layout()
    fig.savefig(path)
    return Path(path)


def coherence_scan(
    docs: Sequence[TokenDocument],
    vocab: Vocabulary,
    k_min: int,
    k_max: int,
    engine: str = "lda",
    runs_per_k: int = 3,
    seed: int = DEFAULT_SEED,
    measure: str = "c_v",
    window: int = 110,
    top_n: int = 10,
    iterations: int = 1000,
    alpha: Optional[float] = None,
    eta_strength: float = 200.0,
    guidance: Optional[GuidanceSpec] = None,
    jobs: int = 1,
) -> CoherenceReport:
    """
    Fit the engine `runs_per_k` times for every K in [k_min, k_max] and keep the
    median coherence of the top terms.

    Run `r` at `K` uses a seed derived from `(seed, K, r)`, so the result does not
    depend on `jobs`.

    Args:
        docs (Sequence[TokenDocument]): The documents.
        vocab (Vocabulary): Their vocabulary.
        k_min (int): Smallest K, >= 2.
        k_max (int): Largest K, >= k_min.
        engine (str): Only "lda" is scanned.
        runs_per_k (int): Fits per K. (Default is 3.)
        seed (int): Base seed.
        measure (str): "c_v" or "u_mass". (Default is "c_v".)
        window (int): c_v window. (Default is 110.)
        top_n (int): Terms per topic scored. (Default is 10.)
        iterations (int): Gibbs sweeps per fit. (Default is 1000.)
        alpha (float | None): Document-topic prior, None means 1/K.
        eta_strength (float): Prior concentration. (Default is 200.)
        guidance (GuidanceSpec | None): Keyword guidance applied at every K.
        jobs (int): Fits run concurrently on threads. (Default is 1.)

    Returns:
        (CoherenceReport): The scores and the best K.
    """
    if engine != "lda":
        raise ConfigError(f"Coherence scans drive the lda engine only, got {engine!r}")
    if not 2 <= k_min <= k_max:
        raise ConfigError(f"Need 2 <= k_min <= k_max, got k_min={k_min}, k_max={k_max}")
    if runs_per_k < 1:
        raise ConfigError(f"runs_per_k must be >= 1, got {runs_per_k}")
    if measure not in MEASURES:
        raise ConfigError(f"Unknown coherence measure {measure!r}, choose one of {MEASURES}")

    def fit_and_score(k: int, run: int) -> float:
        eta = build_eta(guidance, vocab, k, eta_strength)
        model = fit_lda(docs, vocab, k, eta, alpha, iterations, derive_seed(seed, k, run))
        return score_topics(
            topic_terms(lda_topics(model, vocab, top_n)), docs, measure, window
        )

    tasks = [(k, run) for k in range(k_min, k_max + 1) for run in range(runs_per_k)]
    if jobs > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(lambda task: fit_and_score(*task), tasks))
    else:
        results = [fit_and_score(*task) for task in tasks]

    runs = {}
    for (k, _), score in zip(tasks, results):
        runs.setdefault(k, []).append(score)
    scores = []
    for k in range(k_min, k_max + 1):
        median = float(np.median(runs[k]))
        logger.info(f"K={k}: {measure} {median:.4f} (runs {np.round(runs[k], 4).tolist()})")
        scores.append((k, median))
    report = CoherenceReport(measure, tuple(scores), {k: tuple(v) for k, v in runs.items()})
    logger.info(f"Best K by {measure}: {report.best_k}")
    return report
