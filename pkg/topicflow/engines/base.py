# coding: utf-8
# Copyright (c) Max-Planck-Institut für Eisenforschung GmbH - Computational Materials Design (CM) Department
# Distributed under the terms of "New BSD License", see the LICENSE file.
"""
Common ground for the fitted models of every engine.
"""

from __future__ import annotations

import json
from abc import ABC, abstractmethod
from pathlib import Path
from typing import Optional

import numpy as np

# (topic_id, [(term, weight), ...]) per topic
Topics = list[tuple[int, list[tuple[str, float]]]]


class TopicModel(ABC):
    """
    A fitted model. Immutable after fit and safe to share read-only.
    """

    engine: str

    @property
    @abstractmethod
    def n_topics(self) -> int:
        pass

    @abstractmethod
    def parameters(self) -> dict:
        """Engine parameters that, together with the input, reproduce the fit."""
        pass

    def document_topics(self) -> Optional[np.ndarray]:
        """Per-document topic weights, None when the engine has no document view."""
        return None


def top_indices(scores: np.ndarray, top_n: int) -> np.ndarray:
    """
    Indices of the `top_n` largest scores, ties broken by ascending index.

    Args:
        scores (numpy.ndarray): 1d scores.
        top_n (int): How many to keep; clipped to the length of `scores`.

    Returns:
        (numpy.ndarray): Indices, best first.
    """
    if top_n < 1:
        raise ValueError(f"top_n must be >= 1, got {top_n}")
    scores = np.asarray(scores)
    # lexsort sorts by the last key first
    order = np.lexsort((np.arange(len(scores)), -scores))
    return order[:top_n]


def write_matrix(array: np.ndarray, path: str | Path) -> list[Path]:
    """
    Dump a dense 2d array as little-endian float64, C order, with a JSON sidecar.

    Args:
        array (numpy.ndarray): The matrix.
        path (str | Path): Binary destination; the sidecar is `<path>.json`.

    Returns:
        (list[Path]): The binary and the sidecar paths.
    """
    path = Path(path)
    array = np.ascontiguousarray(array, dtype="<f8")
    array.tofile(path)
    sidecar = path.with_name(path.name + ".json")
    sidecar.write_text(
        json.dumps({"dtype": "<f8", "order": "C", "shape": list(array.shape)}, sort_keys=True)
        + "\n",
        encoding="utf-8",
    )
    return [path, sidecar]


def read_matrix(path: str | Path) -> np.ndarray:
    path = Path(path)
    meta = json.loads(path.with_name(path.name + ".json").read_text(encoding="utf-8"))
    return np.fromfile(path, dtype=meta["dtype"]).reshape(meta["shape"])


def write_json(data: dict, path: str | Path) -> Path:
    path = Path(path)
    path.write_text(
        json.dumps(data, sort_keys=True, ensure_ascii=False, indent=2) + "\n",
        encoding="utf-8",
    )
    return path
