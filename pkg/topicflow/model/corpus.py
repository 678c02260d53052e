# coding: utf-8
# Copyright (c) Max-Planck-Institut für Eisenforschung GmbH - Computational Materials Design (CM) Department
# Distributed under the terms of "New BSD License", see the LICENSE file.
"""
Raw discussion posts: ingest from CSV or JSONL, persist as canonical JSONL.

Post text is kept exactly as read; normalization belongs to `topicflow.model.preprocess`.
"""

from __future__ import annotations

import csv
import json
import logging
from dataclasses import dataclass, field
from pathlib import Path
from types import MappingProxyType
from typing import Iterator, Mapping, Optional

import pandas as pd

from topicflow.errors import ConfigError, DataError

logger = logging.getLogger(__name__)

FORMATS = ("csv", "jsonl")


@dataclass(frozen=True)
class RawPost:
    id: str
    text: str
    meta: Mapping[str, str] = field(default_factory=dict)

    def __post_init__(self):
        if not isinstance(self.id, str) or self.id == "":
            raise DataError(f"Post ids must be non-empty strings, got {self.id!r}")
        if not isinstance(self.text, str):
            raise DataError(f"Post {self.id} has non-string text {self.text!r}")
        object.__setattr__(self, "meta", MappingProxyType(dict(self.meta)))

    def __eq__(self, other):
        if not isinstance(other, RawPost):
            return NotImplemented
        return (
            self.id == other.id
            and self.text == other.text
            and dict(self.meta) == dict(other.meta)
        )

    def __hash__(self):
        return hash((self.id, self.text, tuple(sorted(self.meta.items()))))


@dataclass(frozen=True)
class RawCorpus:
    """
    An ordered, immutable collection of posts with unique ids.

    Iteration order is input file order.
    """

    posts: tuple[RawPost, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "posts", tuple(self.posts))
        seen = set()
        for post in self.posts:
            if post.id in seen:
                raise DataError(f"Duplicate post id {post.id!r}")
            seen.add(post.id)

    def __len__(self) -> int:
        return len(self.posts)

    def __iter__(self) -> Iterator[RawPost]:
        return iter(self.posts)

    def __getitem__(self, item: int) -> RawPost:
        return self.posts[item]

    @property
    def ids(self) -> list[str]:
        return [post.id for post in self.posts]

    def by_id(self, post_id: str) -> RawPost:
        for post in self.posts:
            if post.id == post_id:
                return post
        raise KeyError(f"No post with id {post_id!r}")


def _infer_format(path: Path) -> str:
    suffix = path.suffix.lower()
    if suffix == ".csv":
        return "csv"
    if suffix in (".jsonl", ".json", ".ndjson"):
        return "jsonl"
    raise ConfigError(
        f"Cannot infer corpus format from {path.name}, choose one of {FORMATS}"
    )


def load_corpus(
    path: str | Path, format: Optional[str] = None, synthesize_ids: bool = False
) -> RawCorpus:
    """
    Read posts from a CSV (header `id,text`, extra columns become meta) or a JSONL file.

    Args:
        path (str | Path): The input file.
        format (str | None): "csv" or "jsonl". Inferred from the suffix when None.
        synthesize_ids (bool): Generate `row-<n>` ids (1-based) when the input has no
            id column/field. (Default is False.)

    Returns:
        (RawCorpus): One post per row or line, in input order.
    """
    path = Path(path)
    if not path.is_file():
        raise DataError(f"Corpus file {path} does not exist")
    format = _infer_format(path) if format is None else format.lower()
    if format == "csv":
        corpus = _load_csv(path, synthesize_ids)
    elif format == "jsonl":
        corpus = _load_jsonl(path, synthesize_ids)
    else:
        raise ConfigError(f"Unknown corpus format {format!r}, choose one of {FORMATS}")
    logger.info(f"Loaded {len(corpus)} posts from {path}")
    return corpus


def _scan_csv(path: Path) -> tuple[list[str], list[int]]:
    """
    The header and the physical line each record starts on.

    Rejects duplicate header columns and records whose field count differs from the
    header's, both of which `pandas.read_csv` would otherwise repair silently.
    """
    header, starts = None, []
    previous_line = 0
    try:
        with open(path, encoding="utf-8", newline="") as f:
            reader = csv.reader(f, strict=True)
            for fields in reader:
                start, previous_line = previous_line + 1, reader.line_num
                if len(fields) == 0:
                    continue
                if header is None:
                    duplicates = sorted({c for c in fields if fields.count(c) > 1})
                    if len(duplicates) > 0:
                        raise DataError(f"{path}, line {start}: duplicate columns {duplicates}")
                    header = fields
                    continue
                if len(fields) != len(header):
                    raise DataError(
                        f"{path}, line {start}: expected {len(header)} fields, "
                        f"found {len(fields)}"
                    )
                starts.append(start)
    except csv.Error as e:
        raise DataError(f"{path}, line {previous_line + 1}: malformed CSV, {e}") from e
    except UnicodeDecodeError as e:
        raise DataError(f"{path}: not valid UTF-8, {e}") from e
    if header is None:
        raise DataError(f"{path}: CSV input needs a header line")
    return header, starts


def _load_csv(path: Path, synthesize_ids: bool) -> RawCorpus:
    _, lines = _scan_csv(path)
    try:
        frame = pd.read_csv(
            path,
            dtype=str,
            keep_default_na=False,
            na_filter=False,
            encoding="utf-8",
        )
    except pd.errors.EmptyDataError as e:
        raise DataError(f"{path}: CSV input needs a header line") from e
    except pd.errors.ParserError as e:
        raise DataError(f"{path}: malformed CSV, {e}") from e
    if len(frame) != len(lines):
        raise DataError(f"{path}: read {len(frame)} records, expected {len(lines)}")

    columns = list(frame.columns)
    if "text" not in columns:
        raise DataError(f"{path}: missing required column 'text' (found {columns})")
    if "id" not in columns and not synthesize_ids:
        raise DataError(
            f"{path}: missing required column 'id' (use --synthesize-ids to generate)"
        )
    meta_columns = [c for c in columns if c not in ("id", "text")]

    posts = []
    for n, (line, values) in enumerate(zip(lines, frame.to_dict("records")), start=1):
        post_id = values["id"] if "id" in columns else f"row-{n}"
        if post_id == "":
            raise DataError(f"{path}, line {line}: empty id")
        posts.append(
            RawPost(
                id=post_id,
                text=values["text"],
                meta={c: values[c] for c in meta_columns},
            )
        )
    return RawCorpus(tuple(posts))


def _load_jsonl(path: Path, synthesize_ids: bool) -> RawCorpus:
    posts = []
    n_row = 0
    with open(path, encoding="utf-8") as f:
        for line_number, line in enumerate(f, start=1):
            if line.strip() == "":
                continue
            n_row += 1
            try:
                record = json.loads(line)
            except json.JSONDecodeError as e:
                raise DataError(f"{path}, line {line_number}: malformed JSON, {e}") from e
            if not isinstance(record, dict):
                raise DataError(f"{path}, line {line_number}: expected a JSON object")
            if "id" not in record:
                if not synthesize_ids:
                    raise DataError(f"{path}, line {line_number}: missing field 'id'")
                record["id"] = f"row-{n_row}"
            if "text" not in record:
                raise DataError(f"{path}, line {line_number}: missing field 'text'")
            post_id, text = record["id"], record["text"]
            if not isinstance(post_id, str) or post_id == "":
                raise DataError(
                    f"{path}, line {line_number}: 'id' must be a non-empty string"
                )
            if not isinstance(text, str):
                raise DataError(f"{path}, line {line_number}: 'text' must be a string")
            meta = record.get("meta", {})
            if not isinstance(meta, dict) or not all(
                isinstance(v, str) for v in meta.values()
            ):
                raise DataError(
                    f"{path}, line {line_number}: 'meta' must be a flat string map"
                )
            posts.append(RawPost(id=post_id, text=text, meta=meta))
    return RawCorpus(tuple(posts))


def save_corpus(corpus: RawCorpus, path: str | Path) -> None:
    """
    Write the corpus as canonical JSONL, one post per line.

    Args:
        corpus (RawCorpus): The posts.
        path (str | Path): Destination file; an empty corpus gives an empty file.
    """
    path = Path(path)
    try:
        with open(path, "w", encoding="utf-8", newline="\n") as f:
            for post in corpus:
                record = {"id": post.id, "text": post.text}
                if len(post.meta) > 0:
                    record["meta"] = dict(post.meta)
                f.write(json.dumps(record, ensure_ascii=False) + "\n")
    except OSError as e:
        raise DataError(f"Could not write corpus to {path}: {e}") from e
    logger.info(f"Saved {len(corpus)} posts to {path}")
