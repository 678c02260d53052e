# coding: utf-8
# Copyright (c) Max-Planck-Institut für Eisenforschung GmbH - Computational Materials Design (CM) Department
# Distributed under the terms of "New BSD License", see the LICENSE file.
"""
Latent semantic analysis: truncated SVD of the raw term-document count matrix.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

import numpy as np
import scipy.linalg
from scipy import sparse
from scipy.sparse.linalg import ArpackNoConvergence, svds

from topicflow.config import DEFAULT_SEED
from topicflow.engines.base import TopicModel, Topics, top_indices, write_json, write_matrix
from topicflow.errors import ConfigError, DataError, NumericError
from topicflow.model.preprocess import TokenDocument, Vocabulary

logger = logging.getLogger(__name__)

SOLVERS = ("auto", "dense", "arpack")
# Below this many entries the dense LAPACK path is both exact and fast.
DENSE_LIMIT = 4_000_000


@dataclass(frozen=True, eq=False)
class TermDocMatrix:
    """
    Term frequencies, terms as rows and documents as columns.

    Attributes:
        counts (scipy.sparse.csr_matrix): n_w x num_docs, int64.
    """

    counts: sparse.csr_matrix

    @property
    def shape(self) -> tuple[int, int]:
        return self.counts.shape

    def toarray(self) -> np.ndarray:
        return self.counts.toarray()


def build_term_doc_matrix(
    docs: Sequence[TokenDocument], vocab: Vocabulary
) -> TermDocMatrix:
    """
    Count every vocabulary term in every document, n-grams included.

    Args:
        docs (Sequence[TokenDocument]): The documents, one column each.
        vocab (Vocabulary): Row order.

    Returns:
        (TermDocMatrix): Raw counts, no weighting.
    """
    rows, cols = [], []
    for j, doc in enumerate(docs):
        for token in doc.tokens:
            try:
                rows.append(vocab.index[token])
            except KeyError:
                raise DataError(
                    f"Token {token!r} of document {doc.id} is not in the vocabulary"
                ) from None
            cols.append(j)
    counts = sparse.csr_matrix(
        (np.ones(len(rows), dtype=np.int64), (rows, cols)),
        shape=(vocab.n_w, len(docs)),
        dtype=np.int64,
    )
    counts.sum_duplicates()
    return TermDocMatrix(counts)


@dataclass(frozen=True, eq=False)
class LsaModel(TopicModel):
    """
    Rank-k SVD factors.

    Attributes:
        k (int): The rank.
        singular_values (numpy.ndarray): Descending, length k.
        term_vectors (numpy.ndarray): n_w x k left singular vectors.
        doc_vectors (numpy.ndarray): num_docs x k right singular vectors.
        seed (int): Start-vector seed of the iterative solver.
        solver (str): "dense" or "arpack".
    """

    k: int
    singular_values: np.ndarray
    term_vectors: np.ndarray
    doc_vectors: np.ndarray
    seed: int = DEFAULT_SEED
    solver: str = "dense"

    engine = "lsa"

    @property
    def n_topics(self) -> int:
        return self.k

    def parameters(self) -> dict:
        return {"k": self.k, "seed": self.seed, "solver": self.solver}

    def reconstruct(self) -> np.ndarray:
        return (self.term_vectors * self.singular_values) @ self.doc_vectors.T

    def document_topics(self) -> np.ndarray:
        return self.doc_vectors * self.singular_values


def _fix_signs(u: np.ndarray, vt: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Flip each pair so the largest-magnitude entry of every u column is positive."""
    pivots = np.argmax(np.abs(u), axis=0)
    signs = np.sign(u[pivots, np.arange(u.shape[1])])
    signs[signs == 0] = 1
    return u * signs, vt * signs[:, None]


def fit_lsa(
    matrix: TermDocMatrix,
    k: int,
    seed: int = DEFAULT_SEED,
    solver: str = "auto",
    maxiter: int | None = None,
) -> LsaModel:
    """
    Truncated SVD of the term-document matrix.

    Args:
        matrix (TermDocMatrix): The counts.
        k (int): Target rank, 1 <= k <= min(matrix.shape).
        seed (int): Seeds the start vector of the iterative solver.
        solver (str): "dense" (LAPACK), "arpack" (`scipy.sparse.linalg.svds`) or
            "auto", which uses the dense path for small matrices and when k is the
            full rank. (Default is "auto".)
        maxiter (int | None): Iteration budget of ARPACK, None for its default.

    Returns:
        (LsaModel): Factors with descending singular values and fixed signs.
    """
    n_rows, n_cols = matrix.shape
    full_rank = min(n_rows, n_cols)
    if not 1 <= k <= full_rank:
        raise ConfigError(f"k must be in [1, {full_rank}] for a {n_rows}x{n_cols} matrix, got {k}")
    if solver not in SOLVERS:
        raise ConfigError(f"Unknown SVD solver {solver!r}, choose one of {SOLVERS}")
    if solver == "auto":
        solver = "dense" if k == full_rank or n_rows * n_cols <= DENSE_LIMIT else "arpack"
    if solver == "arpack" and k == full_rank:
        raise ConfigError(f"The arpack solver needs k < {full_rank}, got {k}")

    a = matrix.counts.astype(np.float64)
    if solver == "dense":
        u, s, vt = scipy.linalg.svd(a.toarray(), full_matrices=False)
        u, s, vt = u[:, :k], s[:k], vt[:k]
    else:
        v0 = np.random.default_rng(seed).uniform(-1.0, 1.0, full_rank)
        try:
            u, s, vt = svds(a, k=k, v0=v0, maxiter=maxiter, solver="arpack")
        except ArpackNoConvergence as e:
            budget = maxiter if maxiter is not None else f"the default of {full_rank * 10}"
            raise NumericError(
                f"Truncated SVD did not converge within {budget} iterations "
                f"({len(e.eigenvalues)} of {k} singular values found)"
            ) from e
        order = np.argsort(-s, kind="stable")
        u, s, vt = u[:, order], s[order], vt[order]

    if not np.all(np.isfinite(s)):
        raise NumericError("Truncated SVD produced non-finite singular values")
    u, vt = _fix_signs(u, vt)
    logger.info(f"LSA ({solver}) k={k}: singular values {np.round(s, 4).tolist()}")
    return LsaModel(
        k=k,
        singular_values=np.clip(s, 0.0, None),
        term_vectors=u,
        doc_vectors=vt.T.copy(),
        seed=seed,
        solver=solver,
    )


def lsa_topics(model: LsaModel, vocab: Vocabulary, top_n: int) -> Topics:
    """
    Top terms of each left singular vector by absolute loading, signed weights.

    Args:
        model (LsaModel): The factors.
        vocab (Vocabulary): Row labels of `model.term_vectors`.
        top_n (int): Terms per topic.

    Returns:
        (Topics): One entry per singular vector, largest |loading| first, ties by
            vocabulary index.
    """
    topics = []
    for j in range(model.term_vectors.shape[1]):
        column = model.term_vectors[:, j]
        idx = top_indices(np.abs(column), top_n)
        topics.append((j, [(vocab.terms[i], float(column[i])) for i in idx]))
    return topics


def export_lsa(
    model: LsaModel, vocab: Vocabulary, stem: str | Path, top_n: int = 10
) -> list[Path]:
    """
    Write `<stem>.json` (k, singular values, top-N loadings per topic) plus the dense
    factors `<stem>.term_vectors.f64` and `<stem>.doc_vectors.f64` with sidecars.
    """
    stem = Path(stem)
    summary = {
        "engine": model.engine,
        "k": model.k,
        "singular_values": model.singular_values.tolist(),
        "topics": [
            {"topic": t, "terms": [{"term": w, "weight": x} for w, x in terms]}
            for t, terms in lsa_topics(model, vocab, top_n)
        ],
    }
    paths = [write_json(summary, stem.with_name(stem.name + ".json"))]
    paths += write_matrix(model.term_vectors, stem.with_name(stem.name + ".term_vectors.f64"))
    paths += write_matrix(model.doc_vectors, stem.with_name(stem.name + ".doc_vectors.f64"))
    return paths
