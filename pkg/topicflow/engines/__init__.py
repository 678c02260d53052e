# coding: utf-8
# Copyright (c) Max-Planck-Institut für Eisenforschung GmbH - Computational Materials Design (CM) Department
# Distributed under the terms of "New BSD License", see the LICENSE file.
"""
The three interchangeable topic engines: truncated SVD (`lsa`), Gibbs-sampled LDA with
an optional keyword prior (`guided_lda`), and K-means over word vectors
(`embed_cluster`).
"""
