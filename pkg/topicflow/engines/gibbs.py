# coding: utf-8
# Copyright (c) Max-Planck-Institut für Eisenforschung GmbH - Computational Materials Design (CM) Department
# Distributed under the terms of "New BSD License", see the LICENSE file.
"""
Compiled kernels of the collapsed Gibbs sampler.

The sweep is compiled with `numba` in nopython mode and releases the GIL, so
independent samplers can run on a thread pool. Uniform draws are made by the caller
from a numpy `Generator` and passed in, which keeps the random stream identical to a
pure numpy run with the same seed.
"""

from __future__ import annotations

import numpy as np
from numba import njit
from scipy.special import gammaln


@njit(nogil=True)
def gibbs_sweep(words, docs, z, n_dk, n_kw, n_k, alpha, beta, beta_sum, uniforms):
    """
    Resample every token's topic once, in token order, updating the counts in place.

    Args:
        words (numpy.ndarray): int64 term index per token.
        docs (numpy.ndarray): int64 document index per token.
        z (numpy.ndarray): int64 current topic per token.
        n_dk (numpy.ndarray): int64 document-topic counts.
        n_kw (numpy.ndarray): int64 topic-term counts.
        n_k (numpy.ndarray): int64 tokens per topic.
        alpha (float): Symmetric document-topic prior.
        beta (numpy.ndarray): K x n_w topic-term Dirichlet parameters.
        beta_sum (numpy.ndarray): Row sums of `beta`.
        uniforms (numpy.ndarray): One draw in [0, 1) per token.
    """
    n_topics = n_k.shape[0]
    cumulative = np.empty(n_topics)
    for i in range(words.shape[0]):
        w = words[i]
        d = docs[i]
        t = z[i]
        n_dk[d, t] -= 1
        n_kw[t, w] -= 1
        n_k[t] -= 1

        total = 0.0
        for k in range(n_topics):
            total += (n_dk[d, k] + alpha) * (n_kw[k, w] + beta[k, w]) / (n_k[k] + beta_sum[k])
            cumulative[k] = total
        threshold = uniforms[i] * total
        t = 0
        while t < n_topics - 1 and cumulative[t] <= threshold:
            t += 1

        z[i] = t
        n_dk[d, t] += 1
        n_kw[t, w] += 1
        n_k[t] += 1


class JointLogLikelihood:
    """
    log p(w, z) under a symmetric document prior and an asymmetric topic-term prior.

    Terms that only depend on the priors are computed once.
    """

    def __init__(self, alpha: float, beta: np.ndarray, n_d: np.ndarray):
        self.alpha = alpha
        self.beta = beta
        self.beta_sum = beta.sum(axis=1)
        self.n_d = n_d
        n_topics = beta.shape[0]
        self._word_constant = np.sum(gammaln(self.beta_sum)) - np.sum(gammaln(beta))
        self._doc_constant = len(n_d) * (
            gammaln(n_topics * alpha) - n_topics * gammaln(alpha)
        ) - np.sum(gammaln(n_d + n_topics * alpha))

    def __call__(self, n_dk: np.ndarray, n_kw: np.ndarray, n_k: np.ndarray) -> float:
        words = np.sum(gammaln(n_kw + self.beta)) - np.sum(gammaln(n_k + self.beta_sum))
        topics = np.sum(gammaln(n_dk + self.alpha))
        return float(self._word_constant + words + self._doc_constant + topics)
