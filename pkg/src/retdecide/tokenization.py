"""Deterministic tokenizers for queries and passages.

Two modes:

* ``word`` (default): lowercase, split on runs of non-alphanumeric
  characters, drop empty pieces. No external resources required.
* ``subword``: word-level pre-tokenization followed by greedy
  longest-match segmentation against a supplied vocabulary file.
  Continuation pieces are looked up and emitted with a ``##`` prefix
  (WordPiece convention). Words that cannot be segmented collapse to a
  single ``[unk]`` token.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from pathlib import Path

from .errors import ConfigError

# Unicode-aware alphanumeric runs; \w minus underscore.
_WORD_RE = re.compile(r"[^\W_]+", re.UNICODE)

UNKNOWN_TOKEN = "[unk]"
CONTINUATION_PREFIX = "##"


@dataclass(frozen=True)
class Tokenizer:
    """Immutable tokenizer configuration; callable on text."""

    mode: str = "word"  # "word" | "subword"
    vocabulary: frozenset[str] = field(default_factory=frozenset)
    max_piece_length: int = 0  # longest vocab entry, cached for the greedy scan

    def __call__(self, text: str) -> list[str]:
        return self.tokenize(text)

    def tokenize(self, text: str) -> list[str]:
        words = _WORD_RE.findall(text.lower())
        if self.mode == "word":
            return words
        pieces: list[str] = []
        for word in words:
            pieces.extend(self._segment(word))
        return pieces

    def _segment(self, word: str) -> list[str]:
        """Greedy longest-match WordPiece segmentation of one word."""
        pieces: list[str] = []
        start = 0
        while start < len(word):
            end = min(len(word), start + self.max_piece_length)
            match = None
            while end > start:
                piece = word[start:end]
                key = piece if start == 0 else CONTINUATION_PREFIX + piece
                if key in self.vocabulary:
                    match = key
                    break
                end -= 1
            if match is None:
                return [UNKNOWN_TOKEN]
            pieces.append(match)
            start = end
        return pieces


def make_tokenizer(mode: str = "word", vocabulary_path: str | Path | None = None) -> Tokenizer:
    """Build a tokenizer; subword mode requires a vocabulary file (one piece per line)."""
    if mode == "word":
        return Tokenizer(mode="word")
    if mode != "subword":
        raise ConfigError(f"unknown tokenizer mode {mode!r} (expected 'word' or 'subword')")
    if vocabulary_path is None:
        raise ConfigError("subword tokenizer requires a vocabulary file")
    vocab: set[str] = set()
    with open(vocabulary_path, encoding="utf-8") as handle:
        for raw in handle:
            piece = raw.strip()
            if piece:
                vocab.add(piece)
    if not vocab:
        raise ConfigError(f"vocabulary file {vocabulary_path} is empty")
    max_len = max(len(p) - len(CONTINUATION_PREFIX) if p.startswith(CONTINUATION_PREFIX) else len(p) for p in vocab)
    return Tokenizer(mode="subword", vocabulary=frozenset(vocab), max_piece_length=max_len)


def tokenize(text: str, tokenizer: Tokenizer | None = None) -> list[str]:
    """Tokenize with the given tokenizer (default word mode)."""
    return (tokenizer or Tokenizer()).tokenize(text)
