# coding: utf-8
# Copyright (c) Max-Planck-Institut für Eisenforschung GmbH - Computational Materials Design (CM) Department
# Distributed under the terms of "New BSD License", see the LICENSE file.
"""
topicflow - extract candidate discussion codes from small discussion-board corpora.
"""

from topicflow._version import __version__
from topicflow.errors import (
    ConfigError,
    DataError,
    NumericError,
    StageError,
    TopicflowError,
)
from topicflow.model.corpus import RawCorpus, RawPost, load_corpus, save_corpus
from topicflow.model.guidance import GuidanceSpec, load_guidance
from topicflow.model.preprocess import TokenDocument, Vocabulary, build_documents

__all__ = [
    "__version__",
    "ConfigError",
    "DataError",
    "GuidanceSpec",
    "NumericError",
    "RawCorpus",
    "RawPost",
    "StageError",
    "TokenDocument",
    "TopicflowError",
    "Vocabulary",
    "build_documents",
    "load_corpus",
    "load_guidance",
    "save_corpus",
]
