"""Six-stage text preprocessing: lowercase, strip non-characters, tokenize,
remove stopwords, stem, recombine.

Every stage is a pure function so each can be tested on its own; `preprocess`
is exactly their composition. The character-removal stage keeps letters,
digits, whitespace and apostrophes and turns everything else (including
HTML tags, '@' and '_') into single spaces.
"""

from __future__ import annotations

import hashlib
import re
from dataclasses import dataclass
from importlib import resources
from pathlib import Path
from typing import Iterable

from . import porter

REMOVAL_CLASS_VERSION = "keep-letter-digit-space-apostrophe/1"

_TAG_RE = re.compile(r"<[^>]*>")
_NONCHAR_RE = re.compile(r"_|[^\w\s']")
_WS_RE = re.compile(r"\s+")

TokenList = list[str]


def load_stopwords(source: str | Path | Iterable[str]) -> frozenset[str]:
    """Read a stopword file: one token per line, '#' comments allowed."""
    if isinstance(source, (str, Path)):
        lines = Path(source).read_text(encoding="utf-8").splitlines()
    else:
        lines = list(source)
    words = set()
    for line in lines:
        token = line.strip()
        if not token or token.startswith("#"):
            continue
        words.add(token.lower())
    return frozenset(words)


def default_stopwords() -> frozenset[str]:
    text = resources.files("stresskit.data").joinpath("stopwords_en.txt").read_text("utf-8")
    return load_stopwords(text.splitlines())


@dataclass(frozen=True)
class PipelineConfig:
    """Immutable preprocessing configuration.

    stemmer is either "porter" or "none". The removal-class version string
    participates in the fingerprint so a change to the character policy
    invalidates saved models.
    """

    stopwords: frozenset[str]
    stemmer: str = "porter"
    removal_class: str = REMOVAL_CLASS_VERSION

    def __post_init__(self):
        if self.stemmer not in ("porter", "none"):
            raise ValueError(f"unknown stemmer: {self.stemmer!r}")
        for word in self.stopwords:
            if word != word.lower():
                raise ValueError(f"stopword not lowercase: {word!r}")

    @staticmethod
    def default() -> "PipelineConfig":
        return PipelineConfig(stopwords=default_stopwords())

    def fingerprint(self) -> str:
        """Stable hash of (stopword content, stemmer, removal class)."""
        h = hashlib.sha256()
        for word in sorted(self.stopwords):
            h.update(word.encode("utf-8"))
            h.update(b"\n")
        h.update(b"\x00" + self.stemmer.encode("utf-8"))
        h.update(b"\x00" + self.removal_class.encode("utf-8"))
        return h.hexdigest()


def lowercase(text: str) -> str:
    return text.lower()


def strip_noncharacters(text: str) -> str:
    """Drop HTML tags, '@', '_' and anything outside letters/digits/
    whitespace/apostrophe; collapse whitespace runs to single spaces."""
    text = _TAG_RE.sub(" ", text)
    text = _NONCHAR_RE.sub(" ", text)
    return _WS_RE.sub(" ", text).strip()


def tokenize(text: str) -> TokenList:
    return text.split()


def remove_stopwords(tokens: TokenList, config: PipelineConfig) -> TokenList:
    return [t for t in tokens if t not in config.stopwords]


def stem(tokens: TokenList, config: PipelineConfig) -> TokenList:
    if config.stemmer == "none":
        return list(tokens)
    return [porter.stem_word(t) for t in tokens]


def preprocess_stages(text: str, config: PipelineConfig) -> dict[str, object]:
    """Run the pipeline keeping every intermediate, for inspection/tests."""
    lowered = lowercase(text)
    stripped = strip_noncharacters(lowered)
    tokens = tokenize(stripped)
    kept = remove_stopwords(tokens, config)
    stemmed = stem(kept, config)
    return {
        "lowercased": lowered,
        "stripped": stripped,
        "tokens": tokens,
        "without_stopwords": kept,
        "stemmed": stemmed,
        "text": " ".join(stemmed),
    }


def preprocess(text: str, config: PipelineConfig) -> str:
    """stem . remove_stopwords . tokenize . strip_noncharacters . lowercase,
    joined with single spaces."""
    return preprocess_stages(text, config)["text"]  # type: ignore[return-value]
