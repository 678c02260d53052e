# coding: utf-8
# Copyright (c) Max-Planck-Institut für Eisenforschung GmbH - Computational Materials Design (CM) Department
# Distributed under the terms of "New BSD License", see the LICENSE file.
"""
Exceptions raised across topicflow.

Each class carries the process exit code the command line reports when it escapes a
subcommand. The concrete classes also derive from the matching builtin, so callers
that only know about `ValueError` or `RuntimeError` keep working.
"""

from __future__ import annotations


class TopicflowError(Exception):
    exit_code = 1


class ConfigError(TopicflowError, ValueError):
    """Invalid parameters or missing configured files."""

    exit_code = 2


class DataError(TopicflowError, ValueError):
    """Input data that cannot be parsed or that leaves nothing to model."""

    exit_code = 3


class NumericError(TopicflowError, RuntimeError):
    """A numerical routine failed, e.g. an iterative solver did not converge."""

    exit_code = 4


class StageError(TopicflowError):
    """
    Wraps an error raised inside one stage of a pipeline run.

    Args:
        stage (str): The stage name, e.g. "preprocess".
        cause (Exception): The original error.
    """

    def __init__(self, stage: str, cause: Exception):
        super().__init__(f"{stage}: {cause}")
        self.stage = stage
        self.cause = cause
        self.exit_code = getattr(cause, "exit_code", TopicflowError.exit_code)
