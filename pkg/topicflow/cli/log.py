# coding: utf-8
# Copyright (c) Max-Planck-Institut für Eisenforschung GmbH - Computational Materials Design (CM) Department
# Distributed under the terms of "New BSD License", see the LICENSE file.
"""
Route the package's log records to stderr or to a file.

Library modules only ever call `logging.getLogger(__name__)`; the command line owns
handler setup through the `LogController`.
"""

from __future__ import annotations

import logging
import sys
from pathlib import Path
from typing import Optional

from topicflow.utils import Singleton

PACKAGE_LOGGER = "topicflow"
LOG_FORMAT = "%(asctime)s %(levelname)s [%(name)s] %(message)s"


class LogController(metaclass=Singleton):
    """
    Singleton pattern ensures that handlers are attached to the package logger only
    once per process, and that its original state can be restored.
    """

    def __init__(self, stream=None):
        self.logger = logging.getLogger(PACKAGE_LOGGER)
        self._standard_level = self.logger.level
        self._standard_propagate = self.logger.propagate
        self.stream_handler = logging.StreamHandler(sys.stderr if stream is None else stream)
        self.stream_handler.setFormatter(logging.Formatter(LOG_FORMAT))
        self.file_handler: Optional[logging.FileHandler] = None

    @property
    def handlers(self) -> list[logging.Handler]:
        return [h for h in (self.stream_handler, self.file_handler) if h is not None]

    def set_level(self, level: int | str):
        self.logger.setLevel(level)

    def log_to_stream(self):
        self._close_file()
        if self.stream_handler not in self.logger.handlers:
            self.logger.addHandler(self.stream_handler)
        self.logger.propagate = False

    def log_to_file(self, path: str | Path):
        self._close_file()
        self.logger.removeHandler(self.stream_handler)
        self.file_handler = logging.FileHandler(path, encoding="utf-8")
        self.file_handler.setFormatter(logging.Formatter(LOG_FORMAT))
        self.logger.addHandler(self.file_handler)
        self.logger.propagate = False

    def _close_file(self):
        if self.file_handler is not None:
            self.logger.removeHandler(self.file_handler)
            self.file_handler.close()
            self.file_handler = None

    def clear_log(self):
        """Detach every handler and restore the logger's original level and propagation."""
        self._close_file()
        self.logger.removeHandler(self.stream_handler)
        self.stream_handler.flush()
        self.logger.setLevel(self._standard_level)
        self.logger.propagate = self._standard_propagate
