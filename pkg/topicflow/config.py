# coding: utf-8
# Copyright (c) Max-Planck-Institut für Eisenforschung GmbH - Computational Materials Design (CM) Department
# Distributed under the terms of "New BSD License", see the LICENSE file.
"""
Configurable parameter groups.

Every parameter is a `traitlets` trait tagged `config=True`, so it can be set from the
command line, from a config file (`c.LdaConfig.iterations = 500`), or directly as a
keyword argument when using the library. `RunConfig` owns one instance of each other
group and passes its config down to them.
"""

from __future__ import annotations

import hashlib
import json
from pathlib import Path

from traitlets import (
    Bool,
    CaselessStrEnum,
    Float,
    Integer,
    TraitError,
    Unicode,
    validate,
)
from traitlets.config import Configurable

from topicflow.errors import ConfigError

DEFAULT_SEED = 20220
ENGINES = ("lsa", "lda", "cluster")
REPORT_FORMATS = ("markdown", "json", "csv")
MEASURES = ("c_v", "u_mass")
DEFAULT_TOP_N = {"lsa": 10, "lda": 10, "cluster": 5}


class TopicflowConfigurable(Configurable):
    """Surfaces trait validation failures at construction as `ConfigError`."""

    def __init__(self, **kwargs):
        try:
            super().__init__(**kwargs)
        except TraitError as e:
            raise ConfigError(f"{self.__class__.__name__}: {e}") from e
        self.check()

    def check(self):
        """Cross-parameter validation, run after construction."""
        pass

    def to_dict(self) -> dict:
        return {
            name: getattr(self, name)
            for name in sorted(self.class_trait_names(config=True))
        }


def _positive(proposal, minimum=1):
    if proposal.value is not None and proposal.value < minimum:
        raise TraitError(
            f"{proposal.trait.name} must be >= {minimum}, got {proposal.value}"
        )
    return proposal.value


class PreprocessConfig(TopicflowConfigurable):
    stopword_path = Unicode(
        None,
        allow_none=True,
        help="Stop-word file, one token per line. None uses the bundled English list.",
    ).tag(config=True)
    name_blocklist_path = Unicode(
        None,
        allow_none=True,
        help="Blocklist of person and work names to remove. None disables the filter.",
    ).tag(config=True)
    min_token_len = Integer(3, help="Shortest kept token.").tag(config=True)
    max_token_len = Integer(15, help="Longest kept unigram.").tag(config=True)
    max_doc_freq_fraction = Float(
        0.10, help="Drop terms found in more than this fraction of documents."
    ).tag(config=True)
    min_doc_freq = Integer(
        2, help="Drop terms found in fewer than this many documents."
    ).tag(config=True)
    ngram_min_count = Integer(
        5, help="Minimum corpus count for a bigram or trigram to be kept."
    ).tag(config=True)
    enable_ngrams = Bool(
        True, help="Append bigrams and trigrams to every document."
    ).tag(config=True)

    @validate("min_token_len", "min_doc_freq", "ngram_min_count")
    def _validate_counts(self, proposal):
        return _positive(proposal)

    @validate("max_doc_freq_fraction")
    def _validate_fraction(self, proposal):
        if not 0 < proposal.value <= 1:
            raise TraitError(
                f"max_doc_freq_fraction must be in (0, 1], got {proposal.value}"
            )
        return proposal.value

    def check(self):
        if self.max_token_len < self.min_token_len:
            raise ConfigError(
                f"max_token_len ({self.max_token_len}) is smaller than min_token_len "
                f"({self.min_token_len})"
            )


class LsaConfig(TopicflowConfigurable):
    unigrams_only = Bool(
        False, help="Build the term-document matrix from unigrams only."
    ).tag(config=True)
    solver = CaselessStrEnum(
        ("auto", "dense", "arpack"),
        default_value="auto",
        help="SVD path; auto picks dense LAPACK for small matrices.",
    ).tag(config=True)
    maxiter = Integer(
        None, allow_none=True, help="Iteration budget of the sparse SVD solver."
    ).tag(config=True)

    @validate("maxiter")
    def _validate_maxiter(self, proposal):
        return _positive(proposal)


class LdaConfig(TopicflowConfigurable):
    alpha = Float(
        None, allow_none=True, help="Symmetric document-topic prior, None means 1/K."
    ).tag(config=True)
    eta_strength = Float(
        200.0, help="Concentration multiplying the topic-word prior probabilities."
    ).tag(config=True)
    keywords_total_probability = Float(
        0.5, help="Prior mass a guided topic puts on its keywords."
    ).tag(config=True)
    iterations = Integer(1000, help="Gibbs sweeps.").tag(config=True)

    @validate("alpha", "eta_strength")
    def _validate_positive_real(self, proposal):
        if proposal.value is not None and not proposal.value > 0:
            raise TraitError(f"{proposal.trait.name} must be > 0, got {proposal.value}")
        return proposal.value

    @validate("keywords_total_probability")
    def _validate_probability(self, proposal):
        if not 0 < proposal.value < 1:
            raise TraitError(
                f"keywords_total_probability must be in (0, 1), got {proposal.value}"
            )
        return proposal.value

    @validate("iterations")
    def _validate_iterations(self, proposal):
        return _positive(proposal)


class ClusterConfig(TopicflowConfigurable):
    embeddings = Unicode(
        None, allow_none=True, help="Word vectors in word2vec text format (.gz ok)."
    ).tag(config=True)
    restarts = Integer(10, help="K-means runs without guidance.").tag(config=True)
    max_iter = Integer(300, help="Lloyd iterations per run.").tag(config=True)
    export_vectors = Unicode(
        None,
        allow_none=True,
        help="Write the vocabulary-restricted vectors to this word2vec text file.",
    ).tag(config=True)

    @validate("restarts", "max_iter")
    def _validate_counts(self, proposal):
        return _positive(proposal)


class CoherenceConfig(TopicflowConfigurable):
    measure = CaselessStrEnum(MEASURES, default_value="c_v", help="Coherence measure.").tag(
        config=True
    )
    window = Integer(110, help="Sliding window size for c_v.").tag(config=True)
    k_min = Integer(2, help="Smallest K scanned.").tag(config=True)
    k_max = Integer(10, help="Largest K scanned.").tag(config=True)
    runs_per_k = Integer(3, help="Fits per K; the median score is kept.").tag(config=True)
    top_n = Integer(10, help="Top terms per topic that are scored.").tag(config=True)
    jobs = Integer(1, help="Concurrent fits during a scan.").tag(config=True)
    plot = Unicode(None, allow_none=True, help="Save the scan curve to this image.").tag(
        config=True
    )

    @validate("window")
    def _validate_window(self, proposal):
        return _positive(proposal, minimum=2)

    @validate("k_min")
    def _validate_k_min(self, proposal):
        return _positive(proposal, minimum=2)

    @validate("runs_per_k", "top_n", "jobs", "k_max")
    def _validate_counts(self, proposal):
        return _positive(proposal)

    def check(self):
        if self.k_max < self.k_min:
            raise ConfigError(f"k_max ({self.k_max}) is smaller than k_min ({self.k_min})")


class RunConfig(TopicflowConfigurable):
    """
    Everything needed to reproduce one run.

    Output locations are excluded from `config_hash`, so writing the same run to two
    places yields the same provenance.
    """

    corpus = Unicode(None, allow_none=True, help="Corpus file (CSV or JSONL).").tag(
        config=True
    )
    corpus_format = CaselessStrEnum(
        ("csv", "jsonl"), default_value=None, allow_none=True, help="Corpus format."
    ).tag(config=True)
    synthesize_ids = Bool(False, help="Generate row-<n> ids when absent.").tag(
        config=True
    )
    engine = CaselessStrEnum(ENGINES, default_value="lda", help="Topic engine.").tag(
        config=True
    )
    k = Integer(5, help="Number of topics or clusters.").tag(config=True)
    seed = Integer(DEFAULT_SEED, help="Random seed.").tag(config=True)
    top_n = Integer(
        None, allow_none=True, help="Terms per topic, None means the engine default."
    ).tag(config=True)
    guidance = Unicode(None, allow_none=True, help="Keyword guidance file.").tag(
        config=True
    )
    codebook = Unicode(
        None, allow_none=True, help="Reference code lists to match the topics against."
    ).tag(config=True)
    coherence = Bool(False, help="Score the reported topics.").tag(config=True)
    output = Unicode(None, allow_none=True, help="Report destination, stdout if unset.").tag(
        config=True
    )
    format = CaselessStrEnum(
        REPORT_FORMATS, default_value="markdown", help="Report format."
    ).tag(config=True)
    doc_topics = Unicode(
        None, allow_none=True, help="Write per-post topic weights to this CSV."
    ).tag(config=True)
    export_model = Unicode(
        None, allow_none=True, help="Path stem for the engine's model export."
    ).tag(config=True)

    _output_traits = ("output", "doc_topics", "export_model", "format")

    def __init__(self, **kwargs):
        super().__init__(**kwargs)
        self.preprocess = PreprocessConfig(parent=self)
        self.lsa = LsaConfig(parent=self)
        self.lda = LdaConfig(parent=self)
        self.cluster = ClusterConfig(parent=self)
        self.scan = CoherenceConfig(parent=self)

    @validate("k")
    def _validate_k(self, proposal):
        return _positive(proposal)

    @validate("top_n")
    def _validate_top_n(self, proposal):
        return _positive(proposal)

    @property
    def effective_top_n(self) -> int:
        return DEFAULT_TOP_N[self.engine] if self.top_n is None else self.top_n

    def validate_paths(self):
        """Check that every referenced input file exists."""
        inputs = {
            "corpus": self.corpus,
            "guidance": self.guidance,
            "codebook": self.codebook,
            "stopword_path": self.preprocess.stopword_path,
            "name_blocklist_path": self.preprocess.name_blocklist_path,
        }
        if self.engine == "cluster":
            inputs["embeddings"] = self.cluster.embeddings
            if self.cluster.embeddings is None:
                raise ConfigError("The cluster engine needs --embeddings")
        if self.corpus is None:
            raise ConfigError("No corpus given")
        for name, path in inputs.items():
            if path is not None and not Path(path).is_file():
                raise ConfigError(f"{name} file {path} does not exist")

    def to_dict(self) -> dict:
        d = {
            name: value
            for name, value in super().to_dict().items()
            if name not in self._output_traits
        }
        for child in (self.preprocess, self.lsa, self.lda, self.cluster, self.scan):
            values = child.to_dict()
            if child is self.cluster:
                values.pop("export_vectors")
            if child is self.scan:
                values.pop("plot")
            d[child.__class__.__name__] = values
        return d

    def config_hash(self) -> str:
        canonical = json.dumps(self.to_dict(), sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(canonical.encode("utf-8")).hexdigest()
