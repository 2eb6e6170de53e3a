"""Sentence preprocessing: bracket stripping, tokenization, stopwords, stemming.

Two tokenizers and two stopword lists are supported, selected by the
short names used in config strings:

* ``word_punct`` (alias ``nltk_tok``): maximal runs of word characters or
  of non-space punctuation.
* ``pattern`` (alias ``sk_tok``): tokens of two or more word characters,
  everything else discarded.
* ``list_a`` (alias ``nltk_stop``) and ``list_b`` (alias ``sk_stop``):
  frozen snapshots shipped as data files so results never drift.

All functions are pure; configs are immutable dataclasses.
"""

from __future__ import annotations

import re
from collections.abc import Mapping
from dataclasses import dataclass, replace
from functools import lru_cache
from importlib import resources

from .errors import ConfigError
from . import stemmer

TokenSequence = list[str]

_WORD_PUNCT_RE = re.compile(r"\w+|[^\w\s]+")
_PATTERN_RE = re.compile(r"\b\w\w+\b")
_BOUNDS_RE = re.compile(r"^\((\d+),(\d+)\)$")

_OPENERS = {"(": ")", "[": "]", "{": "}"}

TOKENIZERS = ("word_punct", "pattern")
STOPWORD_LISTS = ("list_a", "list_b")

_TOKENIZER_ALIASES = {"nltk_tok": "word_punct", "sk_tok": "pattern"}
_STOPWORD_ALIASES = {"nltk_stop": "list_a", "sk_stop": "list_b"}
# Reverse maps used when rendering config strings.
_TOKENIZER_NAMES = {"word_punct": "nltk_tok", "pattern": "sk_tok"}
_STOPWORD_NAMES = {"list_a": "nltk_stop", "list_b": "sk_stop"}


class BadConfigString(ConfigError):
    """A config string failed to parse; carries the offending token."""

    def __init__(self, message: str, token: str | None = None, position: int | None = None):
        if token is not None and position is not None:
            message = f"{message} (token {token!r} at position {position})"
        super().__init__(message)
        self.token = token
        self.position = position


def strip_brackets(text: str) -> str:
    """Remove every maximal span enclosed in matched (), [] or {}.

    Nested brackets vanish with their enclosing span; an unmatched opening
    bracket removes everything through the end of the string. Unmatched
    closing brackets at depth zero are ordinary text.
    """
    out: list[str] = []
    stack: list[str] = []
    for ch in text:
        if ch in _OPENERS:
            stack.append(_OPENERS[ch])
        elif stack:
            if ch == stack[-1]:
                stack.pop()
        else:
            out.append(ch)
    return "".join(out)


def _resolve_tokenizer(name: str) -> str:
    kind = _TOKENIZER_ALIASES.get(name, name)
    if kind not in TOKENIZERS:
        raise ConfigError(f"unknown tokenizer {name!r}")
    return kind


def _resolve_stopwords(name: str) -> str:
    kind = _STOPWORD_ALIASES.get(name, name)
    if kind not in STOPWORD_LISTS:
        raise ConfigError(f"unknown stopword list {name!r}")
    return kind


def tokenize(text: str, tokenizer: str = "word_punct") -> TokenSequence:
    """Split text into lowercase tokens with the named tokenizer."""
    kind = _resolve_tokenizer(tokenizer)
    if kind == "word_punct":
        return [t.lower() for t in _WORD_PUNCT_RE.findall(text)]
    return [t.lower() for t in _PATTERN_RE.findall(text)]


def stopword_set(name: str = "list_a") -> frozenset[str]:
    """Load one of the bundled stopword lists (cached per canonical name)."""
    return _load_stopwords(_resolve_stopwords(name))


@lru_cache(maxsize=None)
def _load_stopwords(kind: str) -> frozenset[str]:
    fname = "stopwords_a.txt" if kind == "list_a" else "stopwords_b.txt"
    text = resources.files("refspan.data").joinpath(fname).read_text(encoding="utf-8")
    return frozenset(line.strip() for line in text.splitlines() if line.strip())


def remove_stopwords(tokens: TokenSequence, stopwords: str = "list_a") -> TokenSequence:
    """Drop exact stopword matches, preserving order of the rest."""
    sw = stopword_set(stopwords)
    return [t for t in tokens if t not in sw]


def stem(tokens: TokenSequence) -> TokenSequence:
    """Replace each token with its Porter2 stem."""
    return [stemmer.stem(t) for t in tokens]


def length_filter(
    sentences: Mapping[int, str],
    bounds: tuple[int, int],
    config: "PreprocessConfig | None" = None,
) -> list[int]:
    """Return the sids whose token count lies inside inclusive bounds.

    Counts come from token_count, so length is measured after bracket
    stripping and tokenization but before stopword removal: bounds
    describe sentence length, not content-word count. Sids come back
    ascending. Bounds must satisfy 1 <= lower <= upper.
    """
    lo, up = bounds
    if not (1 <= lo <= up):
        raise ConfigError(f"invalid length bounds ({lo},{up})")
    if config is None:
        config = PreprocessConfig()
    return sorted(
        sid for sid, text in sentences.items() if lo <= token_count(text, config) <= up
    )


@dataclass(frozen=True)
class PreprocessConfig:
    """Names the full text-normalization pipeline for one run."""

    tokenizer: str = "word_punct"
    stopwords: str = "list_a"
    stem: bool = False
    strip_brackets: bool = True
    length_bounds: tuple[int, int] | None = None

    def __post_init__(self):
        object.__setattr__(self, "tokenizer", _resolve_tokenizer(self.tokenizer))
        object.__setattr__(self, "stopwords", _resolve_stopwords(self.stopwords))
        if self.length_bounds is not None:
            lo, up = self.length_bounds
            if not (1 <= lo <= up):
                raise ConfigError(f"length bounds require 1 <= l <= u, got ({lo},{up})")
            object.__setattr__(self, "length_bounds", (int(lo), int(up)))

    @classmethod
    def from_string(cls, spec: str) -> "PreprocessConfig":
        """Parse a '+'-joined config string, e.g. ``nltk_stop+sk_tok+st+(8,70)``."""
        config = cls()
        for pos, token in enumerate(t.strip() for t in spec.split("+")):
            if not token:
                raise BadConfigString("empty config token", token, pos)
            config = _apply_token(config, token, pos)
        return config

    def to_string(self) -> str:
        parts = [_STOPWORD_NAMES[self.stopwords], _TOKENIZER_NAMES[self.tokenizer]]
        if self.stem:
            parts.append("st")
        if not self.strip_brackets:
            parts.append("keepbr")
        if self.length_bounds is not None:
            parts.append(f"({self.length_bounds[0]},{self.length_bounds[1]})")
        return "+".join(parts)


def apply_config_token(config: PreprocessConfig, token: str) -> PreprocessConfig | None:
    """Fold one config-string token into a config; None if not ours.

    Shared with the ranker grammar, which handles scorer and expansion
    tokens itself and routes the rest here.
    """
    if token in _TOKENIZER_ALIASES or token in TOKENIZERS:
        return replace(config, tokenizer=token)
    if token in _STOPWORD_ALIASES or token in STOPWORD_LISTS:
        return replace(config, stopwords=token)
    if token == "st":
        return replace(config, stem=True)
    if token == "keepbr":
        return replace(config, strip_brackets=False)
    m = _BOUNDS_RE.match(token)
    if m:
        lo, up = int(m.group(1)), int(m.group(2))
        if not (1 <= lo <= up):
            raise BadConfigString(f"length bounds require 1 <= l <= u, got ({lo},{up})")
        return replace(config, length_bounds=(lo, up))
    return None


def _apply_token(config: PreprocessConfig, token: str, pos: int) -> PreprocessConfig:
    updated = apply_config_token(config, token)
    if updated is None:
        raise BadConfigString("unknown preprocess config token", token, pos)
    return updated


def token_count(text: str, config: PreprocessConfig) -> int:
    """Sentence length as seen by the length filter: post-tokenize, pre-stopword."""
    if config.strip_brackets:
        text = strip_brackets(text)
    return len(tokenize(text, config.tokenizer))


def preprocess_sentence(text: str, config: PreprocessConfig) -> TokenSequence:
    """Full pipeline: strip brackets, tokenize, drop stopwords, then stem."""
    if config.strip_brackets:
        text = strip_brackets(text)
    tokens = tokenize(text, config.tokenizer)
    tokens = remove_stopwords(tokens, config.stopwords)
    if config.stem:
        tokens = stem(tokens)
    return tokens
