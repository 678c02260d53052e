# coding: utf-8
# Copyright (c) Max-Planck-Institut für Eisenforschung GmbH - Computational Materials Design (CM) Department
# Distributed under the terms of "New BSD License", see the LICENSE file.
"""
The `topicflow` command: a `traitlets` application with one subcommand per task.

Every flag sets a configurable trait, so the same parameters can be given in a config
file (`topicflow_config.py` or `.json` in the working directory, or the file named by
`TOPICFLOW_CONFIG` or `--config-file`). Command-line values win over file values.

Exit codes: 0 success, 2 configuration error, 3 data error, 4 numerical failure.
"""

from __future__ import annotations

import json
import os
import sys
from pathlib import Path

from traitlets import CaselessStrEnum, Integer, Unicode, default
from traitlets.config import Application
from traitlets.config.application import default_aliases, default_flags

from topicflow._version import __version__
from topicflow.cli.log import LogController
from topicflow.config import (
    ClusterConfig,
    CoherenceConfig,
    LdaConfig,
    LsaConfig,
    PreprocessConfig,
    RunConfig,
)
from topicflow.errors import ConfigError, TopicflowError
from topicflow.pipeline import ingest, preprocess, run, scan
from topicflow.report import render, round_floats

CONFIG_ENV = "TOPICFLOW_CONFIG"
DEFAULT_CONFIG_FILE = "topicflow_config"

aliases = {
    **default_aliases,
    "config-file": "BaseApp.config_file",
    "log-file": "BaseApp.log_file",
    "corpus": "RunConfig.corpus",
    "corpus-format": "RunConfig.corpus_format",
    "engine": "RunConfig.engine",
    "k": "RunConfig.k",
    "seed": "RunConfig.seed",
    "top-n": "RunConfig.top_n",
    "guidance": "RunConfig.guidance",
    "codebook": "RunConfig.codebook",
    "output": "RunConfig.output",
    "format": "RunConfig.format",
    "doc-topics": "RunConfig.doc_topics",
    "export-model": "RunConfig.export_model",
    "stopwords": "PreprocessConfig.stopword_path",
    "name-blocklist": "PreprocessConfig.name_blocklist_path",
    "min-token-len": "PreprocessConfig.min_token_len",
    "max-token-len": "PreprocessConfig.max_token_len",
    "max-doc-freq-fraction": "PreprocessConfig.max_doc_freq_fraction",
    "min-doc-freq": "PreprocessConfig.min_doc_freq",
    "ngram-min-count": "PreprocessConfig.ngram_min_count",
    "svd-solver": "LsaConfig.solver",
    "svd-maxiter": "LsaConfig.maxiter",
    "alpha": "LdaConfig.alpha",
    "eta-strength": "LdaConfig.eta_strength",
    "keywords-total-probability": "LdaConfig.keywords_total_probability",
    "iterations": "LdaConfig.iterations",
    "embeddings": "ClusterConfig.embeddings",
    "restarts": "ClusterConfig.restarts",
    "max-iter": "ClusterConfig.max_iter",
    "export-vectors": "ClusterConfig.export_vectors",
    "measure": "CoherenceConfig.measure",
    "window": "CoherenceConfig.window",
    "k-min": "CoherenceConfig.k_min",
    "k-max": "CoherenceConfig.k_max",
    "runs-per-k": "CoherenceConfig.runs_per_k",
    "jobs": "CoherenceConfig.jobs",
    "plot": "CoherenceConfig.plot",
    "sort": "InspectVocabApp.sort",
    "top": "InspectVocabApp.top",
}

flags = {
    **default_flags,
    "unigrams-only": (
        {"LsaConfig": {"unigrams_only": True}},
        "Build the LSA matrix from unigrams only.",
    ),
    "no-ngrams": (
        {"PreprocessConfig": {"enable_ngrams": False}},
        "Do not append bigrams and trigrams.",
    ),
    "synthesize-ids": (
        {"RunConfig": {"synthesize_ids": True}},
        "Generate row-<n> ids for input without an id column.",
    ),
    "coherence": (
        {"RunConfig": {"coherence": True}},
        "Attach the coherence of the reported topics.",
    ),
}

config_classes = [
    RunConfig,
    PreprocessConfig,
    LsaConfig,
    LdaConfig,
    ClusterConfig,
    CoherenceConfig,
]


class BaseApp(Application):
    """Shared config-file handling, logging and error-to-exit-code mapping."""

    version = __version__
    aliases = aliases
    flags = flags
    raise_config_file_errors = True
    classes = config_classes

    config_file = Unicode(
        "",
        help=f"Config file (.py or .json). Defaults to ${CONFIG_ENV}, then "
        f"{DEFAULT_CONFIG_FILE}.py/.json in the working directory if present.",
    ).tag(config=True)
    log_file = Unicode(None, allow_none=True, help="Write logs to this file.").tag(
        config=True
    )

    @default("config_file")
    def _config_file_default(self):
        return os.environ.get(CONFIG_ENV, "")

    def exit(self, exit_status=0):
        # traitlets reports bad arguments with status 1
        if exit_status == 1:
            exit_status = ConfigError.exit_code
        super().exit(exit_status)

    def initialize(self, argv=None):
        super().initialize(argv)
        try:
            self._load_config_file()
        except ConfigError as e:
            self.log.error(str(e))
            self.exit(e.exit_code)
        except Exception as e:
            self.log.error(f"Could not load config file: {e}")
            self.exit(ConfigError.exit_code)
        self._configure_logging()

    def _load_config_file(self):
        if self.config_file == "":
            self.load_config_file(DEFAULT_CONFIG_FILE, path=os.getcwd())
            return
        path = Path(self.config_file)
        candidates = [path] if path.suffix in (".py", ".json") else [
            path.with_name(path.name + ".py"),
            path.with_name(path.name + ".json"),
        ]
        if not any(c.is_file() for c in candidates):
            raise ConfigError(f"Config file {self.config_file} does not exist")
        stem = path.with_suffix("") if path.suffix in (".py", ".json") else path
        self.load_config_file(stem.name, path=str(stem.parent.resolve()))

    def _configure_logging(self):
        controller = LogController()
        controller.set_level(self.log_level)
        if self.log_file is not None:
            controller.log_to_file(self.log_file)
        else:
            controller.log_to_stream()

    def run_config(self) -> RunConfig:
        return RunConfig(parent=self)

    def start(self):
        try:
            self.execute()
        except TopicflowError as e:
            self.log.error(str(e))
            self.exit(e.exit_code)

    def execute(self):
        raise NotImplementedError

    def emit(self, data: bytes, output: str | None = None):
        """Write to `output`, or to stdout when it is None."""
        if output is None:
            sys.stdout.write(data.decode("utf-8"))
            sys.stdout.flush()
        else:
            Path(output).write_bytes(data)


class IngestApp(BaseApp):
    name = "topicflow-ingest"
    description = "Convert a CSV or JSONL corpus to canonical JSONL."

    def execute(self):
        config = self.run_config()
        if config.output is None:
            raise ConfigError("ingest needs --output")
        corpus = ingest(config, config.output)
        self.log.info(f"Wrote {len(corpus)} posts to {config.output}")


class PreprocessApp(BaseApp):
    name = "topicflow-preprocess"
    description = "Tokenize and filter a corpus, writing token documents as JSONL."

    def execute(self):
        config = self.run_config()
        if config.output is None:
            raise ConfigError("preprocess needs --output")
        docs, vocab = preprocess(config, config.output)
        self.log.info(f"{len(docs)} documents, {vocab.n_w} terms")


class RunApp(BaseApp):
    name = "topicflow-run"
    description = "Extract topics with the lsa, lda or cluster engine and report them."

    def execute(self):
        config = self.run_config()
        report = run(config)
        if config.output is None:
            self.emit(render(report, config.format))


class CoherenceScanApp(BaseApp):
    name = "topicflow-coherence-scan"
    description = "Score K = k-min..k-max by topic coherence and pick the best."

    def execute(self):
        config = self.run_config()
        report = scan(config)
        self.emit(report.render_table().encode("utf-8"))
        if config.output is not None:
            text = json.dumps(round_floats(report.to_dict()), sort_keys=True, indent=2)
            self.emit((text + "\n").encode("utf-8"), config.output)


class InspectVocabApp(BaseApp):
    name = "topicflow-inspect-vocab"
    description = "List the vocabulary with document frequencies."

    sort = CaselessStrEnum(
        ("df", "term", "index"), default_value="df", help="Sort order."
    ).tag(config=True)
    top = Integer(None, allow_none=True, help="Show only the first rows.").tag(config=True)

    def execute(self):
        config = self.run_config()
        _, vocab = preprocess(config)
        frame = vocab.to_frame()
        if self.sort == "df":
            frame = frame.sort_values(["doc_freq", "index"], ascending=[False, True])
        elif self.sort == "term":
            frame = frame.sort_values("term", kind="stable")
        if self.top is not None:
            frame = frame.head(self.top)
        if config.output is None:
            self.emit((frame.to_string(index=False) + "\n").encode("utf-8"))
        else:
            frame.to_csv(config.output, index=False, lineterminator="\n")


subapps = [IngestApp, PreprocessApp, RunApp, CoherenceScanApp, InspectVocabApp]


class TopicflowApp(Application):
    name = "topicflow"
    description = "Extract candidate discussion codes from discussion-board posts."
    version = __version__

    subcommands = {
        "ingest": (IngestApp, IngestApp.description),
        "preprocess": (PreprocessApp, PreprocessApp.description),
        "run": (RunApp, RunApp.description),
        "coherence-scan": (CoherenceScanApp, CoherenceScanApp.description),
        "inspect-vocab": (InspectVocabApp, InspectVocabApp.description),
    }

    def exit(self, exit_status=0):
        if exit_status == 1:
            exit_status = ConfigError.exit_code
        super().exit(exit_status)

    def start(self):
        if self.subapp is None:
            self.print_subcommands()
            self.exit(ConfigError.exit_code)
        return self.subapp.start()


def main(argv=None):
    try:
        TopicflowApp.launch_instance(argv)
    finally:
        for cls in [TopicflowApp, BaseApp] + subapps:
            cls.clear_instance()
        LogController().clear_log()
        LogController.clear_instance()
