# coding: utf-8
# Copyright (c) Max-Planck-Institut für Eisenforschung GmbH - Computational Materials Design (CM) Department
# Distributed under the terms of "New BSD License", see the LICENSE file.
"""
End-to-end runs: ingest, preprocess, fit an engine, evaluate, and report.

Errors raised inside a stage surface as `StageError` naming that stage, with the
exit code of the underlying error.
"""

from __future__ import annotations

import logging
from contextlib import contextmanager
from pathlib import Path
from typing import Optional, Sequence

import pandas as pd
from traitlets import TraitError

from topicflow._version import __version__
from topicflow.config import RunConfig
from topicflow.engines.embed_cluster import (
    cluster_topics,
    export_clusters,
    export_embeddings,
    fit_kmeans,
    init_centroids,
    load_embeddings,
)
from topicflow.engines.guided_lda import build_eta, export_lda, fit_lda, lda_topics
from topicflow.engines.lsa import build_term_doc_matrix, export_lsa, fit_lsa, lsa_topics
from topicflow.errors import ConfigError, DataError, StageError, TopicflowError
from topicflow.evaluation.codebook import match_codebook
from topicflow.evaluation.coherence import (
    CoherenceReport,
    coherence_scan,
    plot_coherence,
    score_topics,
    topic_terms,
)
from topicflow.model.corpus import RawCorpus, load_corpus, save_corpus
from topicflow.model.guidance import GuidanceSpec, load_guidance
from topicflow.model.preprocess import (
    TokenDocument,
    Vocabulary,
    build_documents,
    save_documents,
)
from topicflow.report import TopicReport, render

logger = logging.getLogger(__name__)


@contextmanager
def stage(name: str):
    try:
        yield
    except StageError:
        raise
    except TopicflowError as e:
        raise StageError(name, e) from e
    except TraitError as e:
        raise StageError(name, ConfigError(str(e))) from e
    except OSError as e:
        raise StageError(name, DataError(str(e))) from e


def _write(data: bytes, path: Optional[str]) -> None:
    if path is None:
        return
    Path(path).write_bytes(data)
    logger.info(f"Wrote {path}")


def ingest(config: RunConfig, output: Optional[str] = None) -> RawCorpus:
    """Load the configured corpus, optionally re-saving it as canonical JSONL."""
    with stage("ingest"):
        if config.corpus is None:
            raise ConfigError("No corpus given")
        corpus = load_corpus(config.corpus, config.corpus_format, config.synthesize_ids)
        if output is not None:
            save_corpus(corpus, output)
    return corpus


def preprocess(
    config: RunConfig, output: Optional[str] = None
) -> tuple[list[TokenDocument], Vocabulary]:
    corpus = ingest(config)
    with stage("preprocess"):
        docs, vocab = build_documents(corpus, config.preprocess)
        if vocab.n_w == 0:
            raise DataError(
                f"preprocess produced no terms from {len(corpus)} documents"
            )
        if output is not None:
            save_documents(docs, output)
    return docs, vocab


def _load_guidance(config: RunConfig) -> Optional[GuidanceSpec]:
    if config.guidance is None:
        return None
    with stage("guidance"):
        return load_guidance(config.guidance, config.lda.keywords_total_probability)


def _write_doc_topics(
    weights, docs: Sequence[TokenDocument], path: str, digits: int = 6
) -> None:
    frame = pd.DataFrame(weights, columns=[f"topic_{t}" for t in range(weights.shape[1])])
    frame.insert(0, "id", [doc.id for doc in docs])
    frame.to_csv(path, index=False, lineterminator="\n", float_format=f"%.{digits}g")
    logger.info(f"Wrote per-post topic weights to {path}")


def run(config: RunConfig) -> TopicReport:
    """
    Execute ingest, preprocess, engine and report for one configuration.

    Args:
        config (RunConfig): The run parameters; identical configurations give
            identical reports.

    Returns:
        (TopicReport): The report, also written to `config.output` when set.
    """
    with stage("config"):
        config.validate_paths()
        if config.engine == "cluster" and config.doc_topics is not None:
            raise ConfigError(
                "The cluster engine has no document view, --doc-topics is unavailable"
            )

    docs, vocab = preprocess(config)
    guidance = _load_guidance(config)
    top_n = config.effective_top_n
    extras = {}

    with stage(config.engine):
        if config.engine == "lsa":
            if guidance is not None:
                logger.warning("The lsa engine ignores keyword guidance")
            fit_docs, fit_vocab = docs, vocab
            if config.lsa.unigrams_only:
                fit_docs = [doc.unigrams() for doc in docs]
                fit_vocab = vocab.unigrams()
            if fit_vocab.n_w == 0:
                raise DataError("preprocess produced no unigram terms")
            matrix = build_term_doc_matrix(fit_docs, fit_vocab)
            model = fit_lsa(
                matrix,
                config.k,
                config.seed,
                solver=config.lsa.solver,
                maxiter=config.lsa.maxiter,
            )
            topics = lsa_topics(model, fit_vocab, top_n)
            if config.export_model is not None:
                export_lsa(model, fit_vocab, config.export_model, top_n)
            extras["singular_values"] = model.singular_values.tolist()
        elif config.engine == "lda":
            eta = build_eta(guidance, vocab, config.k, config.lda.eta_strength)
            model = fit_lda(
                docs,
                vocab,
                config.k,
                eta,
                config.lda.alpha,
                config.lda.iterations,
                config.seed,
            )
            topics = lda_topics(model, vocab, top_n)
            if config.export_model is not None:
                export_lda(model, vocab, docs, config.export_model, top_n)
        else:
            table = load_embeddings(config.cluster.embeddings, vocab)
            init = init_centroids(guidance, table, config.k, config.seed)
            model = fit_kmeans(
                table,
                config.k,
                init,
                restarts=config.cluster.restarts,
                seed=config.seed,
                seeded=guidance is not None,
                max_iter=config.cluster.max_iter,
            )
            topics = cluster_topics(model, table, top_n)
            if config.export_model is not None:
                export_clusters(model, table, config.export_model, top_n)
            if config.cluster.export_vectors is not None:
                export_embeddings(table, config.cluster.export_vectors)
            extras["dropped_words"] = list(table.dropped)
            extras["inertia"] = model.inertia

        if config.doc_topics is not None:
            _write_doc_topics(model.document_topics(), docs, config.doc_topics)

    with stage("evaluate"):
        if config.coherence:
            extras["coherence"] = {
                "measure": config.scan.measure,
                "score": score_topics(
                    topic_terms(topics), docs, config.scan.measure, config.scan.window
                ),
            }
        if config.codebook is not None:
            codebook = load_guidance(config.codebook)
            extras["codebook"] = match_codebook(topic_terms(topics), codebook).to_dict()

    with stage("report"):
        report = TopicReport(
            engine=config.engine,
            k=config.k,
            topics=topics,
            top_n=top_n,
            provenance={
                "config": config.to_dict(),
                "config_hash": config.config_hash(),
                "documents": len(docs),
                "engine_parameters": model.parameters(),
                "n_w": vocab.n_w,
                "seed": config.seed,
                "version": __version__,
            },
            extras=extras,
        )
        _write(render(report, config.format), config.output)
    return report


def scan(config: RunConfig) -> CoherenceReport:
    """Coherence scan over `config.scan.k_min..k_max` with the lda engine."""
    with stage("config"):
        if config.corpus is None:
            raise ConfigError("No corpus given")
        config.validate_paths()
    docs, vocab = preprocess(config)
    guidance = _load_guidance(config)
    with stage("coherence-scan"):
        report = coherence_scan(
            docs,
            vocab,
            config.scan.k_min,
            config.scan.k_max,
            engine=config.engine,
            runs_per_k=config.scan.runs_per_k,
            seed=config.seed,
            measure=config.scan.measure,
            window=config.scan.window,
            top_n=config.scan.top_n,
            iterations=config.lda.iterations,
            alpha=config.lda.alpha,
            eta_strength=config.lda.eta_strength,
            guidance=guidance,
            jobs=config.scan.jobs,
        )
        if config.scan.plot is not None:
            plot_coherence(report, config.scan.plot)
    return report
