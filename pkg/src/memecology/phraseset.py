"""The meme lexicon and the background word set used for normalization."""

from __future__ import annotations

import logging
import os
import random
from collections import Counter
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Iterable, Mapping

from .corpus import tokenize

log = logging.getLogger(__name__)

MAX_TOKENS = 8


class PhraseLoadError(ValueError):
    pass


@dataclass(frozen=True)
class Phrase:
    phrase_id: int
    tokens: tuple[str, ...]
    label: str

    @property
    def text(self) -> str:
        return " ".join(self.tokens)


@dataclass(frozen=True)
class PhraseSet:
    phrases: tuple[Phrase, ...]
    background: frozenset[str] = frozenset()
    rng_seed: int | None = None
    duplicates: tuple[tuple[int, str], ...] = field(default=(), compare=False)
    truncated: tuple[tuple[int, str], ...] = field(default=(), compare=False)

    def __len__(self) -> int:
        return len(self.phrases)

    def with_background(self, words: Iterable[str], seed: int | None = None) -> PhraseSet:
        words = frozenset(words)
        bad = sorted(w for w in words if tokenize(w) != [w])
        if bad:
            raise PhraseLoadError(f"background entries must be single lowercase tokens: {bad[:5]}")
        return replace(self, background=words, rng_seed=seed)

    def length_histogram(self) -> dict[int, int]:
        return dict(sorted(Counter(len(p.tokens) for p in self.phrases).items()))

    def labels(self) -> list[str]:
        return [p.label for p in self.phrases]


def load_phrases(source: str | os.PathLike | Iterable[str]) -> PhraseSet:
    """Read one phrase per line into a :class:`PhraseSet` (memes only).

    Blank lines and ``#`` comments are ignored. Phrases longer than eight
    tokens keep their eight-token prefix; repeated token sequences keep the
    first occurrence. Both events are logged and recorded on the result.
    """
    if isinstance(source, (str, os.PathLike)):
        with open(source, encoding="utf-8") as fh:
            lines = fh.read().splitlines()
    else:
        lines = list(source)

    phrases: list[Phrase] = []
    seen: dict[tuple[str, ...], int] = {}
    duplicates: list[tuple[int, str]] = []
    truncated: list[tuple[int, str]] = []
    for lineno, raw in enumerate(lines, 1):
        label = raw.strip()
        if not label or label.startswith("#"):
            continue
        tokens = tokenize(label)
        if not tokens:
            raise PhraseLoadError(f"line {lineno}: phrase {label!r} has no tokens")
        if len(tokens) > MAX_TOKENS:
            log.warning("line %d: truncating %d-token phrase to its %d-token prefix", lineno, len(tokens), MAX_TOKENS)
            truncated.append((lineno, label))
            tokens = tokens[:MAX_TOKENS]
        key = tuple(tokens)
        if key in seen:
            log.warning("line %d: duplicate of phrase %d (%r) skipped", lineno, seen[key], label)
            duplicates.append((lineno, label))
            continue
        seen[key] = len(phrases)
        phrases.append(Phrase(len(phrases), key, label))
    return PhraseSet(tuple(phrases), duplicates=tuple(duplicates), truncated=tuple(truncated))


def load_background(path: str | os.PathLike) -> frozenset[str]:
    """One background word per line; blank lines and ``#`` comments ignored."""
    words = set()
    for lineno, raw in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), 1):
        w = raw.strip()
        if not w or w.startswith("#"):
            continue
        toks = tokenize(w)
        if len(toks) != 1:
            raise PhraseLoadError(f"line {lineno}: background entry {w!r} is not a single token")
        words.add(toks[0])
    return frozenset(words)


def sample_background(
    vocabulary: Mapping[str, int], n: int, min_count: int = 100, seed: int = 0
) -> frozenset[str]:
    """Uniform sample of ``n`` words with corpus count >= ``min_count``.

    Deterministic for a given seed. Returns every eligible word, with a
    warning, when fewer than ``n`` qualify.
    """
    if n < 1:
        raise ValueError("background sample size must be >= 1")
    if not vocabulary:
        raise ValueError("cannot sample background from an empty vocabulary")
    eligible = sorted(w for w, c in vocabulary.items() if c >= min_count)
    if len(eligible) <= n:
        if len(eligible) < n:
            log.warning("only %d words have count >= %d; using all of them (requested %d)", len(eligible), min_count, n)
        return frozenset(eligible)
    return frozenset(random.Random(seed).sample(eligible, n))
