# coding: utf-8
# Copyright (c) Max-Planck-Institut für Eisenforschung GmbH - Computational Materials Design (CM) Department
# Distributed under the terms of "New BSD License", see the LICENSE file.
"""
K-means over pre-trained word vectors of the vocabulary's unigrams.

Clustering is Euclidean on the raw vectors; the words reported for a cluster are the
ones from the whole table closest to its centroid by cosine similarity.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from pathlib import Path
from typing import Optional, Sequence

import numpy as np
from gensim import utils as gensim_utils
from gensim.models import KeyedVectors
from sklearn.cluster import KMeans
from sklearn.metrics.pairwise import euclidean_distances

from topicflow.config import DEFAULT_SEED
from topicflow.engines.base import TopicModel, Topics, write_json
from topicflow.errors import ConfigError, DataError
from topicflow.model.guidance import GuidanceSpec
from topicflow.model.preprocess import Vocabulary
from topicflow.utils import derive_seed

logger = logging.getLogger(__name__)


class EmbeddingTable:
    """
    Word vectors restricted to a vocabulary, backed by a gensim `KeyedVectors`.

    Args:
        keyed_vectors (KeyedVectors): The vectors, float64.
        source (str): Where they were read from.
        dropped (Sequence[str]): Vocabulary unigrams the source had no vector for.
    """

    def __init__(
        self, keyed_vectors: KeyedVectors, source: str = "", dropped: Sequence[str] = ()
    ):
        if keyed_vectors.vector_size < 1:
            raise DataError(f"Embedding dimension must be >= 1, got {keyed_vectors.vector_size}")
        if not np.all(np.isfinite(keyed_vectors.vectors)):
            raise DataError("Embedding vectors contain NaN or Inf")
        self.keyed_vectors = keyed_vectors
        self.source = source
        self.dropped = tuple(dropped)

    @classmethod
    def from_arrays(
        cls, words: Sequence[str], vectors: np.ndarray, source: str = "<memory>"
    ) -> EmbeddingTable:
        vectors = np.atleast_2d(np.asarray(vectors, dtype=np.float64))
        if len(words) != len(vectors):
            raise DataError(f"{len(words)} words but {len(vectors)} vectors")
        kv = KeyedVectors(vector_size=vectors.shape[1], dtype=np.float64)
        kv.add_vectors(list(words), vectors)
        return cls(kv, source)

    @property
    def dim(self) -> int:
        return self.keyed_vectors.vector_size

    @property
    def words(self) -> list[str]:
        return list(self.keyed_vectors.index_to_key)

    @property
    def vectors(self) -> np.ndarray:
        return self.keyed_vectors.vectors

    def __len__(self) -> int:
        return len(self.keyed_vectors)

    def __contains__(self, word: str) -> bool:
        return word in self.keyed_vectors.key_to_index

    def __getitem__(self, word: str) -> np.ndarray:
        return self.keyed_vectors.get_vector(word)


def _parse_header(line: bytes, path) -> tuple[int, int]:
    parts = gensim_utils.to_unicode(line).split()
    try:
        count, dim = (int(p) for p in parts)
    except ValueError:
        raise DataError(
            f"{path}, line 1: expected a 'count dim' header, got {' '.join(parts)!r}"
        ) from None
    if count < 0 or dim < 1:
        raise DataError(f"{path}, line 1: invalid header count={count} dim={dim}")
    return count, dim


def load_embeddings(path: str | Path, vocab: Vocabulary) -> EmbeddingTable:
    """
    Stream a word2vec text file (optionally .gz), keeping the vocabulary's unigrams.

    Every line is checked for the header's dimension, kept or not.

    Args:
        path (str | Path): Header "count dim", then "word x_1 ... x_dim" per line.
        vocab (Vocabulary): Only its unigrams are looked up.

    Returns:
        (EmbeddingTable): Vectors in vocabulary order; unmatched terms are listed
            in `dropped`.
    """
    path = str(path)
    if not Path(path).is_file():
        raise DataError(f"Embedding file {path} does not exist")
    wanted = set(vocab.unigrams().terms)
    found = {}
    n_lines = 0
    try:
        with gensim_utils.open(path, "rb") as f:
            count, dim = _parse_header(f.readline(), path)
            for line_number, raw in enumerate(f, start=2):
                parts = gensim_utils.to_unicode(raw).rstrip().split(" ")
                if parts == [""]:
                    continue
                n_lines += 1
                word, values = parts[0], parts[1:]
                if len(values) != dim:
                    raise DataError(
                        f"{path}, line {line_number}: expected {dim} values for "
                        f"{word!r}, got {len(values)}"
                    )
                if word not in wanted or word in found:
                    continue
                try:
                    vector = np.array([float(v) for v in values], dtype=np.float64)
                except ValueError as e:
                    raise DataError(f"{path}, line {line_number}: {e}") from e
                if not np.all(np.isfinite(vector)):
                    raise DataError(f"{path}, line {line_number}: NaN or Inf in {word!r}")
                found[word] = vector
    except UnicodeDecodeError as e:
        raise DataError(f"{path}: not valid UTF-8, {e}") from e

    if n_lines != count:
        logger.warning(f"{path}: header announces {count} words, found {n_lines}")
    if len(found) == 0:
        raise DataError(f"{path}: no vocabulary word has a vector")

    ordered = [t for t in vocab.unigrams().terms if t in found]
    dropped = [t for t in vocab.unigrams().terms if t not in found]
    if len(dropped) > 0:
        logger.warning(
            f"{len(dropped)} of {len(wanted)} vocabulary words have no vector in {path}"
        )
    kv = KeyedVectors(vector_size=dim, dtype=np.float64)
    kv.add_vectors(ordered, np.vstack([found[w] for w in ordered]))
    logger.info(f"Loaded {len(ordered)} vectors of dimension {dim} from {path}")
    return EmbeddingTable(kv, path, dropped)


def export_embeddings(table: EmbeddingTable, path: str | Path) -> Path:
    """Write the table in word2vec text format."""
    table.keyed_vectors.save_word2vec_format(str(path), binary=False)
    return Path(path)


def _plusplus(x: np.ndarray, fixed: np.ndarray, K: int, seed: int) -> np.ndarray:
    """
    Greedy k-means++ continued from the `fixed` centroids up to K.

    Each new centroid is the best of `2 + log(K)` candidates drawn by squared distance
    to the nearest centroid so far, the one leaving the smallest potential. With no
    fixed centroids the first is a uniformly drawn point.
    """
    rng = np.random.default_rng(seed)
    centers = np.empty((K, x.shape[1]))
    centers[: len(fixed)] = fixed
    n_fixed = len(fixed)
    if n_fixed == 0:
        centers[0] = x[rng.integers(len(x))]
        n_fixed = 1
    closest = euclidean_distances(x, centers[:n_fixed], squared=True).min(axis=1)
    n_trials = 2 + int(np.log(K))
    for c in range(n_fixed, K):
        draws = rng.random(n_trials) * closest.sum()
        candidates = np.minimum(np.searchsorted(np.cumsum(closest), draws), len(x) - 1)
        distances = np.minimum(
            closest, euclidean_distances(x[candidates], x, squared=True)
        )
        best = np.argmin(distances.sum(axis=1))
        centers[c] = x[candidates[best]]
        closest = distances[best]
    return centers


def init_centroids(
    guidance: Optional[GuidanceSpec],
    table: EmbeddingTable,
    K: int,
    seed: int = DEFAULT_SEED,
) -> np.ndarray:
    """
    Starting centroids for K-means.

    Each guidance line gives the mean of its keywords' vectors; the remaining
    centroids are drawn by greedy k-means++ continued from the guided ones. Without
    guidance the same sampler draws all K.

    Args:
        guidance (GuidanceSpec | None): Keyword lines, at most K.
        table (EmbeddingTable): The points.
        K (int): Number of centroids.
        seed (int): Random seed.

    Returns:
        (numpy.ndarray): K x dim.
    """
    x = table.vectors
    if K > len(x):
        raise ConfigError(f"K={K} exceeds the {len(x)} words with vectors")
    if guidance is None or len(guidance) == 0:
        return _plusplus(x, np.empty((0, table.dim)), K, seed)
    if len(guidance) > K:
        raise ConfigError(
            f"{len(guidance)} guidance lines need at least as many clusters, got K={K}"
        )

    guided = [
        np.mean([table[w] for w in keywords], axis=0)
        for keywords in guidance.restrict(table, source="embedding table")
    ]
    return _plusplus(x, np.array(guided), K, seed)


@dataclass(frozen=True, eq=False)
class ClusterModel(TopicModel):
    """
    Attributes:
        K (int): Number of clusters.
        centroids (numpy.ndarray): K x dim.
        words (tuple[str, ...]): The clustered words, table order.
        labels (numpy.ndarray): Cluster id per word.
        inertia (float): Sum of squared distances to the assigned centroids.
        seeded (bool): Whether guidance fixed the initialization.
        n_iter (int): Lloyd iterations of the kept run.
        seed (int): The random seed.
    """

    K: int
    centroids: np.ndarray
    words: tuple
    labels: np.ndarray
    inertia: float
    seeded: bool
    n_iter: int
    seed: int = DEFAULT_SEED

    engine = "cluster"

    @property
    def n_topics(self) -> int:
        return self.K

    @property
    def assignment(self) -> dict[str, int]:
        return {w: int(c) for w, c in zip(self.words, self.labels)}

    def members(self, cluster_id: int) -> list[str]:
        return [w for w, c in zip(self.words, self.labels) if c == cluster_id]

    def parameters(self) -> dict:
        return {"K": self.K, "seed": self.seed, "seeded": self.seeded, "n_iter": self.n_iter}


def _lloyd(x: np.ndarray, init: np.ndarray, max_iter: int, seed: int) -> KMeans:
    # tol=0 runs until the assignment no longer changes
    return KMeans(
        n_clusters=len(init),
        init=init,
        n_init=1,
        max_iter=max_iter,
        tol=0.0,
        algorithm="lloyd",
        random_state=seed,
    ).fit(x)


def fit_kmeans(
    table: EmbeddingTable,
    K: int,
    init: Optional[np.ndarray] = None,
    restarts: int = 10,
    seed: int = DEFAULT_SEED,
    seeded: bool = False,
    max_iter: int = 300,
) -> ClusterModel:
    """
    Lloyd's algorithm with Euclidean distances.

    A seeded run (guidance present) runs once from `init`. Otherwise `restarts` runs
    are made, the first from `init` (k-means++ when None) and the rest from fresh
    k-means++ draws, and the one with the lowest inertia is kept. Empty clusters are
    refilled with the points farthest from their centroids.

    Args:
        table (EmbeddingTable): The points.
        K (int): Number of clusters, at most the number of words.
        init (numpy.ndarray | None): K x dim starting centroids.
        restarts (int): Runs without guidance. (Default is 10.)
        seed (int): Random seed.
        seeded (bool): Whether `init` comes from guidance. (Default is False.)
        max_iter (int): Iteration cap per run. (Default is 300.)

    Returns:
        (ClusterModel): The best run.
    """
    x = table.vectors
    if K < 1:
        raise ConfigError(f"K must be >= 1, got {K}")
    if K > len(x):
        raise ConfigError(f"K={K} exceeds the {len(x)} words with vectors")
    if restarts < 1:
        raise ConfigError(f"restarts must be >= 1, got {restarts}")
    if init is not None and np.shape(init) != (K, table.dim):
        raise ConfigError(f"init must have shape {(K, table.dim)}, got {np.shape(init)}")
    if seeded and init is None:
        raise ConfigError("A seeded run needs initial centroids")

    n_runs = 1 if seeded else restarts
    best = None
    for run in range(n_runs):
        run_seed = derive_seed(seed, run)
        if run == 0 and init is not None:
            start = np.asarray(init, dtype=np.float64)
        else:
            start = _plusplus(x, np.empty((0, table.dim)), K, run_seed)
        km = _lloyd(x, start, max_iter, run_seed)
        logger.debug(f"k-means run {run}: inertia {km.inertia_:.6g} after {km.n_iter_} iterations")
        if best is None or km.inertia_ < best.inertia_:
            best = km
    logger.info(
        f"K-means K={K} over {len(x)} words: inertia {best.inertia_:.6g} "
        f"({n_runs} run{'s' if n_runs > 1 else ''})"
    )
    return ClusterModel(
        K=K,
        centroids=best.cluster_centers_,
        words=tuple(table.words),
        labels=best.labels_,
        inertia=float(best.inertia_),
        seeded=seeded,
        n_iter=int(best.n_iter_),
        seed=seed,
    )


def cosine_similarities(vectors: np.ndarray, centroids: np.ndarray) -> np.ndarray:
    """Words x centroids cosine matrix; a zero vector on either side gives -1."""
    vector_norms = np.linalg.norm(vectors, axis=1)
    centroid_norms = np.linalg.norm(centroids, axis=1)
    denominator = np.outer(vector_norms, centroid_norms)
    with np.errstate(divide="ignore", invalid="ignore"):
        similarities = (vectors @ centroids.T) / denominator
    similarities[denominator == 0] = -1.0
    return similarities


def cluster_topics(model: ClusterModel, table: EmbeddingTable, top_n: int = 5) -> Topics:
    """
    The `top_n` words of the whole table closest to each centroid by cosine.

    Args:
        model (ClusterModel): The clusters.
        table (EmbeddingTable): Candidate words.
        top_n (int): Words per cluster. (Default is 5.)

    Returns:
        (Topics): Most similar first, ties in lexicographic word order.
    """
    if top_n < 1:
        raise ValueError(f"top_n must be >= 1, got {top_n}")
    words = table.words
    similarities = cosine_similarities(table.vectors, model.centroids)
    alphabetical = np.empty(len(words), dtype=np.int64)
    alphabetical[np.argsort(np.array(words, dtype=object), kind="stable")] = np.arange(len(words))
    topics = []
    for c in range(model.K):
        order = np.lexsort((alphabetical, -similarities[:, c]))[:top_n]
        topics.append((c, [(words[i], float(similarities[i, c])) for i in order]))
    return topics


def export_clusters(
    model: ClusterModel, table: EmbeddingTable, stem: str | Path, top_n: int = 5
) -> list[Path]:
    """Write `<stem>.json` with centroids, members and the retrieved words."""
    stem = Path(stem)
    summary = {
        "engine": model.engine,
        "parameters": model.parameters(),
        "inertia": model.inertia,
        "centroids": model.centroids.tolist(),
        "clusters": [
            {
                "cluster": c,
                "members": model.members(c),
                "closest": [{"word": w, "cosine": s} for w, s in terms],
            }
            for c, terms in cluster_topics(model, table, top_n)
        ],
        "dropped_words": list(table.dropped),
    }
    return [write_json(summary, stem.with_name(stem.name + ".json"))]
