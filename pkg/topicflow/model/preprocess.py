# coding: utf-8
# Copyright (c) Max-Planck-Institut für Eisenforschung GmbH - Computational Materials Design (CM) Department
# Distributed under the terms of "New BSD License", see the LICENSE file.
"""
Turn raw posts into token documents and the shared vocabulary.

The pipeline, in order:

1. tokenize (URLs, digits, punctuation, non-breaking spaces and uppercase roman
   numerals removed; lowercase runs of letters within the length bounds)
2. stop-word filter
3. name filter (gazetteer blocklist)
4. document-frequency filter on unigrams
5. bigram and trigram extension (optional)
6. n-gram filter: corpus count and document-frequency bounds

Documents emptied by filtering are kept so indices stay aligned with post ids.
"""

from __future__ import annotations

import json
import logging
from collections import Counter
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Optional, Sequence

import pandas as pd
import regex

from topicflow.config import PreprocessConfig
from topicflow.errors import DataError
from topicflow.model.corpus import RawCorpus
from topicflow.utils import default_stopword_path, read_word_list

logger = logging.getLogger(__name__)

NGRAM_JOIN = "_"

URL_PATTERN = regex.compile(r"(?:https?://|www\.)\S+", regex.IGNORECASE)
LETTER_RUN = regex.compile(r"\p{L}+")
ROMAN_NUMERAL = regex.compile(r"M*(?:CM|CD|D?C{0,3})(?:XC|XL|L?X{0,3})(?:IX|IV|V?I{0,3})")


def _is_roman_numeral(token: str) -> bool:
    return (
        len(token) >= 2
        and token.isupper()
        and ROMAN_NUMERAL.fullmatch(token) is not None
    )


def tokenize(text: str, min_len: int = 3, max_len: int = 15) -> list[str]:
    """
    Split text into lowercase letter runs.

    Args:
        text (str): Raw post text.
        min_len (int): Shortest kept token. (Default is 3.)
        max_len (int): Longest kept token. (Default is 15.)

    Returns:
        (list[str]): The tokens in text order.
    """
    text = URL_PATTERN.sub(" ", text).replace("\u00a0", " ")
    tokens = []
    for run in LETTER_RUN.findall(text):
        if _is_roman_numeral(run):
            continue
        token = run.lower()
        if min_len <= len(token) <= max_len:
            tokens.append(token)
    return tokens


def filter_stopwords(tokens: Sequence[str], stopwords: Iterable[str]) -> list[str]:
    stopwords = stopwords if isinstance(stopwords, (set, frozenset)) else set(stopwords)
    return [t for t in tokens if t not in stopwords]


def filter_names(
    tokens: Sequence[str], blocklist: Optional[Iterable[str]] = None
) -> list[str]:
    """Remove person and work names; without a blocklist the tokens pass unchanged."""
    if blocklist is None:
        return list(tokens)
    return filter_stopwords(tokens, blocklist)


def extend_ngrams(tokens: Sequence[str]) -> list[str]:
    """
    Append consecutive bigrams, then trigrams, joined with `_`.

    Args:
        tokens (Sequence[str]): Filtered unigrams.

    Returns:
        (list[str]): n + max(0, n-1) + max(0, n-2) tokens.
    """
    tokens = list(tokens)
    bigrams = [NGRAM_JOIN.join(tokens[i : i + 2]) for i in range(len(tokens) - 1)]
    trigrams = [NGRAM_JOIN.join(tokens[i : i + 3]) for i in range(len(tokens) - 2)]
    return tokens + bigrams + trigrams


def is_ngram(term: str) -> bool:
    return NGRAM_JOIN in term


@dataclass(frozen=True)
class TokenDocument:
    id: str
    tokens: tuple[str, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "tokens", tuple(self.tokens))

    def __len__(self) -> int:
        return len(self.tokens)

    def unigrams(self) -> TokenDocument:
        """This document without its appended n-grams."""
        return TokenDocument(self.id, tuple(t for t in self.tokens if not is_ngram(t)))


@dataclass(frozen=True)
class Vocabulary:
    """
    Terms in first-appearance order with their document frequencies.

    Attributes:
        terms (tuple[str, ...]): Term `i` has index `i`.
        doc_freq (dict[str, int]): Number of documents containing each term.
    """

    terms: tuple[str, ...]
    doc_freq: dict
    index: dict = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "terms", tuple(self.terms))
        index = {term: i for i, term in enumerate(self.terms)}
        if len(index) != len(self.terms):
            raise ValueError("Vocabulary terms must be unique")
        object.__setattr__(self, "index", index)

    @classmethod
    def from_documents(cls, docs: Sequence[TokenDocument]) -> Vocabulary:
        order = {}
        doc_freq = Counter()
        for doc in docs:
            for token in doc.tokens:
                order.setdefault(token, len(order))
            doc_freq.update(set(doc.tokens))
        return cls(tuple(order), {term: doc_freq[term] for term in order})

    @property
    def n_w(self) -> int:
        return len(self.terms)

    def __len__(self) -> int:
        return len(self.terms)

    def __contains__(self, term: str) -> bool:
        return term in self.index

    def unigrams(self) -> Vocabulary:
        terms = tuple(t for t in self.terms if not is_ngram(t))
        return Vocabulary(terms, {t: self.doc_freq[t] for t in terms})

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame(
            {
                "term": list(self.terms),
                "index": range(self.n_w),
                "doc_freq": [self.doc_freq[t] for t in self.terms],
            }
        )


def _within_doc_freq_bounds(
    doc_freq: int, n_docs: int, config: PreprocessConfig
) -> bool:
    # Small slack so e.g. 0.1 * 30 still admits 3.
    upper = config.max_doc_freq_fraction * n_docs + 1e-9
    return config.min_doc_freq <= doc_freq <= upper


def build_documents(
    corpus: RawCorpus, config: Optional[PreprocessConfig] = None
) -> tuple[list[TokenDocument], Vocabulary]:
    """
    Run the full preprocessing pipeline.

    Args:
        corpus (RawCorpus): The posts.
        config (PreprocessConfig | None): Parameters; defaults when None.

    Returns:
        (list[TokenDocument]): One document per post, same order and ids.
        (Vocabulary): All surviving terms.
    """
    config = PreprocessConfig() if config is None else config
    stopwords = read_word_list(config.stopword_path or default_stopword_path())
    blocklist = (
        read_word_list(config.name_blocklist_path)
        if config.name_blocklist_path is not None
        else None
    )
    n_docs = len(corpus)

    token_lists = []
    for post in corpus:
        tokens = tokenize(post.text, config.min_token_len, config.max_token_len)
        tokens = filter_stopwords(tokens, stopwords)
        tokens = filter_names(tokens, blocklist)
        token_lists.append(tokens)

    unigram_df = Counter()
    for tokens in token_lists:
        unigram_df.update(set(tokens))
    kept = {
        term
        for term, df in unigram_df.items()
        if _within_doc_freq_bounds(df, n_docs, config)
    }
    logger.info(
        f"Document-frequency filter kept {len(kept)} of {len(unigram_df)} unigrams"
    )
    token_lists = [[t for t in tokens if t in kept] for tokens in token_lists]

    if config.enable_ngrams:
        token_lists = [extend_ngrams(tokens) for tokens in token_lists]
        ngram_count = Counter()
        ngram_df = Counter()
        for tokens in token_lists:
            ngrams = [t for t in tokens if is_ngram(t)]
            ngram_count.update(ngrams)
            ngram_df.update(set(ngrams))
        kept_ngrams = {
            term
            for term, count in ngram_count.items()
            if count >= config.ngram_min_count
            and _within_doc_freq_bounds(ngram_df[term], n_docs, config)
        }
        logger.info(f"Kept {len(kept_ngrams)} of {len(ngram_count)} n-grams")
        token_lists = [
            [t for t in tokens if not is_ngram(t) or t in kept_ngrams]
            for tokens in token_lists
        ]

    docs = [TokenDocument(post.id, tokens) for post, tokens in zip(corpus, token_lists)]
    vocab = Vocabulary.from_documents(docs)
    n_empty = sum(1 for doc in docs if len(doc) == 0)
    logger.info(
        f"Preprocessed {n_docs} posts into a vocabulary of {vocab.n_w} terms "
        f"({n_empty} empty documents)"
    )
    return docs, vocab


def save_documents(docs: Sequence[TokenDocument], path: str | Path) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as f:
        for doc in docs:
            f.write(
                json.dumps({"id": doc.id, "tokens": list(doc.tokens)}, ensure_ascii=False)
                + "\n"
            )


def load_documents(path: str | Path) -> list[TokenDocument]:
    docs = []
    with open(path, encoding="utf-8") as f:
        for line_number, line in enumerate(f, start=1):
            if line.strip() == "":
                continue
            try:
                record = json.loads(line)
                docs.append(TokenDocument(record["id"], record["tokens"]))
            except (json.JSONDecodeError, KeyError, TypeError) as e:
                raise DataError(f"{path}, line {line_number}: {e}") from e
    return docs
