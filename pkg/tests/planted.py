# coding: utf-8
# Copyright (c) Max-Planck-Institut für Eisenforschung GmbH - Computational Materials Design (CM) Department
# Distributed under the terms of "New BSD License", see the LICENSE file.
"""
Synthetic data with known structure, shared by the unit, integration and benchmark
tests.
"""

from __future__ import annotations

import string
from pathlib import Path

import numpy as np
import pandas as pd

from topicflow.model.preprocess import TokenDocument, Vocabulary

LETTERS = string.ascii_lowercase


def block_words(n_topics: int, words_per_topic: int) -> list[list[str]]:
    """Disjoint alphabetic word blocks, e.g. 'wbac' is word 2 of block 1."""
    return [
        [f"w{LETTERS[t]}{LETTERS[i // 26]}{LETTERS[i % 26]}" for i in range(words_per_topic)]
        for t in range(n_topics)
    ]


def planted_corpus(
    seed: int,
    n_topics: int = 5,
    words_per_topic: int = 40,
    n_docs: int = 200,
    doc_len: int = 50,
    purity: float = 0.9,
) -> tuple[list[TokenDocument], Vocabulary, list[list[str]]]:
    """
    Each document belongs to one block (round robin); a token is drawn from that
    block with probability `purity`, otherwise uniformly from all words.

    Returns:
        (list[TokenDocument]): The documents.
        (Vocabulary): Their vocabulary.
        (list[list[str]]): The planted blocks.
    """
    rng = np.random.default_rng(seed)
    blocks = block_words(n_topics, words_per_topic)
    everything = [w for block in blocks for w in block]
    docs = []
    for d in range(n_docs):
        block = blocks[d % n_topics]
        tokens = [
            block[rng.integers(words_per_topic)]
            if rng.random() < purity
            else everything[rng.integers(len(everything))]
            for _ in range(doc_len)
        ]
        docs.append(TokenDocument(f"doc-{d}", tokens))
    return docs, Vocabulary.from_documents(docs), blocks


def write_planted_posts(path, seed: int, **kwargs) -> list[list[str]]:
    """A planted corpus written as an `id,text` CSV; returns the blocks."""
    docs, _, blocks = planted_corpus(seed, **kwargs)
    pd.DataFrame(
        {"id": [doc.id for doc in docs], "text": [" ".join(doc.tokens) for doc in docs]}
    ).to_csv(path, index=False, lineterminator="\n")
    return blocks


def write_block_vectors(path, blocks: list[list[str]], seed: int, noise: float = 0.3) -> None:
    """word2vec text vectors placing block `b` around `5 * e_b`."""
    rng = np.random.default_rng(seed)
    dim = len(blocks)
    lines = [f"{sum(len(b) for b in blocks)} {dim}"]
    for b, block in enumerate(blocks):
        for word in block:
            vector = noise * rng.standard_normal(dim)
            vector[b] += 5.0
            lines.append(word + " " + " ".join(f"{x:.6f}" for x in vector))
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def best_matching_overlap(
    learned: list[list[str]], planted: list[list[str]], top_n: int
) -> list[int]:
    """Top-n overlaps per planted block under the best one-to-one matching."""
    from scipy.optimize import linear_sum_assignment

    overlaps = np.array(
        [[len(set(l[:top_n]) & set(p)) for l in learned] for p in planted]
    )
    rows, cols = linear_sum_assignment(overlaps, maximize=True)
    return [int(overlaps[r, c]) for r, c in zip(rows, cols)]


def gaussian_blobs(
    seed: int, n_blobs: int = 3, per_blob: int = 10, scale: float = 5.0, noise: float = 0.3
) -> tuple[list[str], np.ndarray, list[list[str]]]:
    """
    Points around orthogonal centers `scale * e_i`; word 'b<blob><index>'.

    Returns:
        (list[str]): Words.
        (numpy.ndarray): Their vectors, n_blobs x per_blob rows of dimension n_blobs.
        (list[list[str]]): Words per blob.
    """
    rng = np.random.default_rng(seed)
    words, vectors, groups = [], [], []
    for b in range(n_blobs):
        center = np.zeros(n_blobs)
        center[b] = scale
        group = [f"b{LETTERS[b]}{LETTERS[i]}" for i in range(per_blob)]
        words += group
        groups.append(group)
        vectors.append(center + noise * rng.standard_normal((per_blob, n_blobs)))
    return words, np.vstack(vectors), groups
