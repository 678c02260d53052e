# coding: utf-8
# Copyright (c) Max-Planck-Institut für Eisenforschung GmbH - Computational Materials Design (CM) Department
# Distributed under the terms of "New BSD License", see the LICENSE file.
"""
LDA trained by collapsed Gibbs sampling, with an optional keyword-guided prior.

A guided topic `t` with `n` in-vocabulary keywords gets the prior probabilities

    keyword:      keywords_total_probability / n
    other terms:  (1 - keywords_total_probability) / (n_w - n)

and an unguided topic the uniform 1 / n_w. The topic-term Dirichlet parameters are
these probabilities times `strength`. Guidance lines map to topics 0..L-1 in file
order, and keyword tokens start the sampler in their guided topic.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

from topicflow.config import DEFAULT_SEED
from topicflow.engines.base import TopicModel, Topics, top_indices, write_json, write_matrix
from topicflow.engines.gibbs import JointLogLikelihood, gibbs_sweep
from topicflow.errors import ConfigError, DataError
from topicflow.model.guidance import GuidanceSpec
from topicflow.model.preprocess import TokenDocument, Vocabulary

logger = logging.getLogger(__name__)

ROW_SUM_TOLERANCE = 1e-9


@dataclass(frozen=True, eq=False)
class EtaPrior:
    """
    Per-topic base measure of the topic-term Dirichlet.

    Attributes:
        matrix (numpy.ndarray): K x n_w, rows are probability distributions.
        strength (float): Concentration; the Dirichlet parameters are
            `matrix * strength`. (Default is 200.)
        guided_lines (int): How many leading rows come from guidance.
    """

    matrix: np.ndarray
    strength: float = 200.0
    guided_lines: int = 0

    def __post_init__(self):
        matrix = np.asarray(self.matrix, dtype=np.float64)
        if matrix.ndim != 2:
            raise ConfigError(f"The prior matrix must be 2d, got shape {matrix.shape}")
        if np.any(matrix < 0) or not np.all(np.isfinite(matrix)):
            raise ConfigError("The prior matrix must be finite and nonnegative")
        bad_rows = np.flatnonzero(np.abs(matrix.sum(axis=1) - 1) > ROW_SUM_TOLERANCE)
        if len(bad_rows) > 0:
            raise ConfigError(f"Prior rows {bad_rows.tolist()} do not sum to 1")
        if not self.strength > 0:
            raise ConfigError(f"Prior strength must be > 0, got {self.strength}")
        object.__setattr__(self, "matrix", matrix)

    @property
    def n_topics(self) -> int:
        return self.matrix.shape[0]

    @property
    def parameters(self) -> np.ndarray:
        return self.matrix * self.strength


def build_eta(
    guidance: Optional[GuidanceSpec],
    vocab: Vocabulary,
    n_topics: int,
    strength: float = 200.0,
) -> EtaPrior:
    """
    Build the topic-term prior from keyword guidance.

    Args:
        guidance (GuidanceSpec | None): Keyword lines; None gives all-uniform rows.
        vocab (Vocabulary): Column order; out-of-vocabulary keywords are dropped.
        n_topics (int): K, at least the number of guidance lines.
        strength (float): Dirichlet concentration. (Default is 200.)

    Returns:
        (EtaPrior): Guided rows first, then uniform rows.
    """
    n_w = vocab.n_w
    if n_w == 0:
        raise DataError("Cannot build a prior over an empty vocabulary")
    matrix = np.full((n_topics, n_w), 1.0 / n_w)
    if guidance is None:
        return EtaPrior(matrix, strength, 0)
    if len(guidance) > n_topics:
        raise ConfigError(
            f"{len(guidance)} guidance lines need at least as many topics, got K={n_topics}"
        )

    p = guidance.keywords_total_probability
    for t, keywords in enumerate(guidance.restrict(vocab)):
        idx = np.array([vocab.index[kw] for kw in keywords])
        n_kt = len(idx)
        if n_kt == n_w:
            logger.warning(
                f"Guidance line {t} covers the whole vocabulary, its topic prior is uniform"
            )
            matrix[t] = 1.0 / n_kt
            continue
        matrix[t] = (1.0 - p) / (n_w - n_kt)
        matrix[t, idx] = p / n_kt
    return EtaPrior(matrix, strength, len(guidance))


@dataclass(frozen=True, eq=False)
class LdaModel(TopicModel):
    """
    Attributes:
        K (int): Number of topics.
        topic_word (numpy.ndarray): K x n_w, rows sum to 1.
        doc_topic (numpy.ndarray): num_docs x K, rows sum to 1.
        log_likelihood_trace (numpy.ndarray): log p(w, z) after every sweep.
        seed (int): The sampler seed.
        alpha (float): The document-topic prior used.
        eta_strength (float): The prior concentration used.
        guided_lines (int): Leading topics steered by guidance.
    """

    K: int
    topic_word: np.ndarray
    doc_topic: np.ndarray
    log_likelihood_trace: np.ndarray
    seed: int
    alpha: float
    eta_strength: float
    guided_lines: int = 0
    iterations: int = field(init=False)

    engine = "lda"

    def __post_init__(self):
        object.__setattr__(self, "iterations", len(self.log_likelihood_trace))

    @property
    def n_topics(self) -> int:
        return self.K

    def parameters(self) -> dict:
        return {
            "K": self.K,
            "alpha": self.alpha,
            "eta_strength": self.eta_strength,
            "guided_lines": self.guided_lines,
            "iterations": self.iterations,
            "seed": self.seed,
        }

    def document_topics(self) -> np.ndarray:
        return self.doc_topic


def _flatten(docs: Sequence[TokenDocument], vocab: Vocabulary):
    words, doc_ids = [], []
    for d, doc in enumerate(docs):
        for token in doc.tokens:
            try:
                words.append(vocab.index[token])
            except KeyError:
                raise DataError(
                    f"Token {token!r} of document {doc.id} is not in the vocabulary"
                ) from None
            doc_ids.append(d)
    return np.array(words, dtype=np.int64), np.array(doc_ids, dtype=np.int64)


def check_trace(trace: np.ndarray, tail_fraction: float = 0.2) -> bool:
    """
    Whether the tail of a log-likelihood trace is flat or rising within its own noise.

    A least-squares line is fit to the last `tail_fraction` of the trace; a decline
    across the tail larger than twice the tail's standard deviation counts as a
    downward trend.
    """
    n_tail = max(3, int(round(len(trace) * tail_fraction)))
    if len(trace) < n_tail:
        return True
    tail = np.asarray(trace[-n_tail:])
    x = np.arange(n_tail)
    slope, _ = np.polyfit(x, tail, 1)
    noise = np.std(tail)
    return slope * (n_tail - 1) >= -2 * noise - 1e-9


def _draw(weights: np.ndarray, rng: np.random.Generator) -> np.ndarray:
    """One categorical draw per row of nonnegative `weights`."""
    cdf = np.cumsum(weights, axis=1)
    u = rng.random(len(weights)) * cdf[:, -1]
    return (u[:, None] < cdf).argmax(axis=1).astype(np.int64)


def _initial_topics(
    words: np.ndarray,
    doc_ids: np.ndarray,
    n_docs: int,
    eta: EtaPrior,
    rng: np.random.Generator,
) -> np.ndarray:
    """
    Starting topic of every token.

    A token of a word some guided topic favours over uniform starts in one of those
    topics, drawn by the size of the excess. Every other token draws from its
    document's keyword starts plus one, so without guidance the start is uniform.
    """
    K, n_w = eta.matrix.shape
    excess = np.zeros((K, n_w))
    excess[: eta.guided_lines] = np.clip(
        eta.matrix[: eta.guided_lines] - 1.0 / n_w, 0.0, None
    )
    seeded = (excess.sum(axis=0) > 0)[words]

    z = np.empty(len(words), dtype=np.int64)
    z[seeded] = _draw(excess[:, words[seeded]].T, rng)
    n_seeded_dk = np.zeros((n_docs, K))
    np.add.at(n_seeded_dk, (doc_ids[seeded], z[seeded]), 1)
    z[~seeded] = _draw(n_seeded_dk[doc_ids[~seeded]] + 1.0, rng)
    return z


def fit_lda(
    docs: Sequence[TokenDocument],
    vocab: Vocabulary,
    K: int,
    eta: Optional[EtaPrior] = None,
    alpha: Optional[float] = None,
    iterations: int = 1000,
    seed: int = DEFAULT_SEED,
) -> LdaModel:
    """
    Collapsed Gibbs sampling from a keyword-seeded start; estimates come from the
    final sample.

    Args:
        docs (Sequence[TokenDocument]): The documents; empty ones are allowed.
        vocab (Vocabulary): Term indices.
        K (int): Number of topics, 2 <= K <= n_w.
        eta (EtaPrior | None): Topic-term prior; None means uniform with strength 200.
        alpha (float | None): Symmetric document-topic prior, None means 1/K.
        iterations (int): Sweeps over all tokens. (Default is 1000.)
        seed (int): Seed of the sampler; identical inputs and seed give identical
            output.

    Returns:
        (LdaModel): Smoothed topic-term and document-topic distributions.
    """
    if K < 2:
        raise ConfigError(f"LDA needs K >= 2, got {K}")
    if iterations < 1:
        raise ConfigError(f"iterations must be >= 1, got {iterations}")
    alpha = 1.0 / K if alpha is None else float(alpha)
    if not alpha > 0:
        raise ConfigError(f"alpha must be > 0, got {alpha}")
    if K > vocab.n_w:
        raise ConfigError(f"K={K} exceeds the vocabulary size {vocab.n_w}")
    eta = build_eta(None, vocab, K) if eta is None else eta
    if eta.matrix.shape != (K, vocab.n_w):
        raise ConfigError(
            f"Prior shape {eta.matrix.shape} does not match K={K}, n_w={vocab.n_w}"
        )

    words, doc_ids = _flatten(docs, vocab)
    if len(words) == 0:
        raise DataError("All documents are empty, nothing to sample")

    n_docs = len(docs)
    beta = eta.parameters
    beta_sum = beta.sum(axis=1)
    rng = np.random.default_rng(seed)
    z = _initial_topics(words, doc_ids, n_docs, eta, rng)

    n_dk = np.zeros((n_docs, K), dtype=np.int64)
    n_kw = np.zeros((K, vocab.n_w), dtype=np.int64)
    np.add.at(n_dk, (doc_ids, z), 1)
    np.add.at(n_kw, (z, words), 1)
    n_k = n_kw.sum(axis=1)
    n_d = n_dk.sum(axis=1)

    log_likelihood = JointLogLikelihood(alpha, beta, n_d)
    trace = np.empty(iterations)
    logger.info(
        f"Gibbs sampling K={K}, {len(words)} tokens, {n_docs} documents, "
        f"{iterations} sweeps, seed {seed}"
    )
    for it in range(iterations):
        gibbs_sweep(
            words, doc_ids, z, n_dk, n_kw, n_k, alpha, beta, beta_sum, rng.random(len(words))
        )
        trace[it] = log_likelihood(n_dk, n_kw, n_k)
        logger.debug(f"sweep {it}: log likelihood {trace[it]:.6f}")

    if not check_trace(trace):
        logger.warning(
            "The log likelihood is still falling over the last sweeps, "
            "consider more iterations"
        )

    topic_word = (n_kw + beta) / (n_k + beta_sum)[:, None]
    doc_topic = (n_dk + alpha) / (n_d + K * alpha)[:, None]
    return LdaModel(
        K=K,
        topic_word=topic_word,
        doc_topic=doc_topic,
        log_likelihood_trace=trace,
        seed=seed,
        alpha=alpha,
        eta_strength=eta.strength,
        guided_lines=eta.guided_lines,
    )


def lda_topics(model: LdaModel, vocab: Vocabulary, top_n: int) -> Topics:
    """Per topic the `top_n` most probable terms, ties by vocabulary index."""
    topics = []
    for t, row in enumerate(model.topic_word):
        idx = top_indices(row, top_n)
        topics.append((t, [(vocab.terms[i], float(row[i])) for i in idx]))
    return topics


def export_lda(
    model: LdaModel,
    vocab: Vocabulary,
    docs: Sequence[TokenDocument],
    stem: str | Path,
    top_n: int = 10,
) -> list[Path]:
    """
    Write `<stem>.json` (top-N terms per topic, full doc_topic by post id) plus
    `<stem>.topic_word.f64` and `<stem>.doc_topic.f64` with sidecars.
    """
    stem = Path(stem)
    summary = {
        "engine": model.engine,
        "parameters": model.parameters(),
        "topics": [
            {"topic": t, "terms": [{"term": w, "probability": p} for w, p in terms]}
            for t, terms in lda_topics(model, vocab, top_n)
        ],
        "doc_topic": {doc.id: row.tolist() for doc, row in zip(docs, model.doc_topic)},
    }
    paths = [write_json(summary, stem.with_name(stem.name + ".json"))]
    paths += write_matrix(model.topic_word, stem.with_name(stem.name + ".topic_word.f64"))
    paths += write_matrix(model.doc_topic, stem.with_name(stem.name + ".doc_topic.f64"))
    return paths
