"""Token-level multi-pattern matching and the corpus scan.

Memes are recognized by an Aho-Corasick automaton whose alphabet is the
set of interned meme tokens; every match position is reported, so
overlapping and nested occurrences all count. Background words are
single tokens and are counted directly.
"""

from __future__ import annotations

import logging
import os
from collections import Counter, deque
from concurrent.futures import ProcessPoolExecutor
from itertools import islice
from pathlib import Path
from typing import Iterable, Iterator, Sequence

from .corpus import Document, ParseError, is_gzip, iter_input_files, open_binary, parse_record, tokenize
from .phraseset import PhraseSet
from .table import CountTable

log = logging.getLogger(__name__)

COUNT_MODES = ("all", "per-document")


class ScanError(OSError):
    pass


class Matcher:
    """Immutable dictionary automaton over the tokens of a :class:`PhraseSet`."""

    def __init__(self, phrases: PhraseSet, count_mode: str = "all"):
        if count_mode not in COUNT_MODES:
            raise ValueError(f"count_mode must be one of {COUNT_MODES}")
        self.count_mode = count_mode
        self.n_phrases = len(phrases)
        self.background = frozenset(phrases.background)

        ids: dict[str, int] = {}
        goto: list[dict[int, int]] = [{}]
        terminal: list[list[int]] = [[]]
        for phrase in phrases.phrases:
            state = 0
            for tok in phrase.tokens:
                t = ids.setdefault(tok, len(ids))
                nxt = goto[state].get(t)
                if nxt is None:
                    nxt = len(goto)
                    goto[state][t] = nxt
                    goto.append({})
                    terminal.append([])
                state = nxt
            terminal[state].append(phrase.phrase_id)

        # failure links by BFS; outputs fold in the failure target's outputs
        fail = [0] * len(goto)
        out: list[tuple[int, ...]] = [()] * len(goto)
        queue = deque()
        for s in goto[0].values():
            out[s] = tuple(terminal[s])
            queue.append(s)
        while queue:
            s = queue.popleft()
            for t, nxt in goto[s].items():
                f = fail[s]
                while f and t not in goto[f]:
                    f = fail[f]
                fail[nxt] = goto[f].get(t, 0)
                out[nxt] = tuple(terminal[nxt]) + out[fail[nxt]]
                queue.append(nxt)

        self._ids = ids
        self._goto = goto
        self._fail = fail
        self._out = out
        self._first = frozenset(p.tokens[0] for p in phrases.phrases)

    @property
    def n_states(self) -> int:
        return len(self._goto)

    def match_tokens(self, tokens: Sequence[str]) -> list[int]:
        """Phrase ids of every match, one entry per match position."""
        if self._first.isdisjoint(tokens):
            return []
        ids, goto, fail, out = self._ids, self._goto, self._fail, self._out
        hits: list[int] = []
        state = 0
        for tok in tokens:
            t = ids.get(tok)
            if t is None:
                state = 0
                continue
            while True:
                nxt = goto[state].get(t)
                if nxt is not None:
                    state = nxt
                    break
                if not state:
                    break
                state = fail[state]
            if out[state]:
                hits.extend(out[state])
        return hits

    def count_tokens(self, tokens: Sequence[str]) -> tuple[Counter, Counter]:
        """Meme counts by phrase id and background counts by word."""
        hits = self.match_tokens(tokens)
        memes = Counter(set(hits) if self.count_mode == "per-document" else hits)
        bg = self.background
        words = Counter(filter(bg.__contains__, tokens)) if bg else Counter()
        return memes, words


def build_matcher(phrases: PhraseSet, count_mode: str = "all") -> Matcher:
    return Matcher(phrases, count_mode)


def scan_document(m: Matcher, d: Document | str) -> list[tuple[int | str, int]]:
    """Counts in one document as ``(id, count)`` pairs.

    Meme ids are ints (phrase ids) and come first; background words follow
    as strings. Both groups are sorted.
    """
    text = d.text if isinstance(d, Document) else d
    memes, words = m.count_tokens(tokenize(text))
    return sorted(memes.items()) + sorted(words.items())


# -- corpus scan -----------------------------------------------------------


class _Accumulator:
    """Scan state; background words are gathered per day and folded in once."""

    def __init__(self, m: Matcher):
        self.m = m
        self.table = CountTable(m.n_phrases)
        self.words_by_day: dict[int, Counter] = {}

    def add(self, day: int, community: str, kind: str, text: str) -> None:
        m, table = self.m, self.table
        tokens = tokenize(text)
        table.tokens += len(tokens)
        table.documents[(day, kind)] += 1
        hits = m.match_tokens(tokens)
        if hits:
            if m.count_mode == "per-document":
                hits = set(hits)
            memes = table.memes
            for pid in hits:
                memes[(pid, day, community)] += 1
        if m.background:
            words = self.words_by_day.get(day)
            if words is None:
                words = self.words_by_day[day] = Counter()
            words.update(filter(m.background.__contains__, tokens))

    def finish(self) -> CountTable:
        bg = self.table.background
        for day, words in self.words_by_day.items():
            for w, n in words.items():
                bg[(w, day)] += n
        self.words_by_day = {}
        return self.table


def scan_documents(m: Matcher, docs: Iterable[Document]) -> CountTable:
    acc = _Accumulator(m)
    for d in docs:
        acc.add(d.created_utc // 86400, d.community, d.kind, d.text)
    return acc.finish()


def scan_lines(m: Matcher, lines: Iterable[bytes | str], source: str = "<lines>") -> CountTable:
    """Scan raw records; malformed or invalid ones are counted in ``skipped``."""
    acc = _Accumulator(m)
    for line in lines:
        if not line.strip():
            continue
        try:
            d = parse_record(line)
        except ParseError as exc:
            acc.table.skipped += 1
            log.debug("%s: skipped record: %s", source, exc)
            continue
        acc.add(d.created_utc // 86400, d.community, d.kind, d.text)
    return acc.finish()


_WORKER_MATCHER: Matcher | None = None


def _init_worker(m: Matcher) -> None:
    global _WORKER_MATCHER
    _WORKER_MATCHER = m


def _scan_doc_chunk(docs: list[Document]) -> CountTable:
    assert _WORKER_MATCHER is not None
    return scan_documents(_WORKER_MATCHER, docs)


def _chunks(it: Iterable, size: int) -> Iterator[list]:
    it = iter(it)
    while chunk := list(islice(it, size)):
        yield chunk


def _merge_all(n_phrases: int, parts: Iterable[CountTable]) -> CountTable:
    total = CountTable(n_phrases)
    for part in parts:
        total.update(part)
    return total


def scan_corpus(m: Matcher, docs: Iterable[Document], shards: int = 1, chunk_size: int = 20000) -> CountTable:
    """Count every meme and background occurrence across ``docs``.

    With ``shards > 1`` chunks are scanned by worker processes, each into a
    private table; the result is the key-wise sum and does not depend on
    the shard count.
    """
    if shards <= 1:
        return scan_documents(m, docs)
    with ProcessPoolExecutor(max_workers=shards, initializer=_init_worker, initargs=(m,)) as pool:
        return _merge_all(m.n_phrases, pool.map(_scan_doc_chunk, _chunks(docs, chunk_size)))


# -- file input ------------------------------------------------------------


def _iter_range(path: Path, start: int, end: int | None) -> Iterator[bytes]:
    """Lines whose first byte lies in ``[start, end)``."""
    with open(path, "rb") as fh:
        if start:
            fh.seek(start - 1)
            if fh.read(1) != b"\n":
                fh.readline()
        pos = fh.tell()
        for line in fh:
            if end is not None and pos >= end:
                break
            yield line
            pos += len(line)


def split_inputs(paths: Iterable[str | os.PathLike], pieces: int) -> list[tuple[str, int, int | None]]:
    """Work units ``(path, start, end)``; gzip files are never split."""
    files = iter_input_files(paths)
    plain = [f for f in files if not is_gzip(f)]
    total = sum(f.stat().st_size for f in plain)
    target = max(1 << 20, total // max(pieces, 1) + 1)
    units: list[tuple[str, int, int | None]] = []
    for f in files:
        if f not in plain:
            units.append((str(f), 0, None))
            continue
        size = f.stat().st_size
        start = 0
        while start < size:
            end = min(start + target, size)
            units.append((str(f), start, end))
            start = end
    return units


def _read_unit(unit: tuple[str, int, int | None]) -> Iterator[bytes]:
    path, start, end = unit
    if end is None:
        with open_binary(path) as fh:
            yield from fh
    else:
        yield from _iter_range(Path(path), start, end)


def _scan_unit_with(m: Matcher, unit: tuple[str, int, int | None]) -> CountTable:
    try:
        return scan_lines(m, _read_unit(unit), source=unit[0])
    except OSError as exc:
        raise ScanError(f"{unit[0]} (offset {unit[1]}): {exc}") from exc


def _scan_unit(unit: tuple[str, int, int | None]) -> CountTable:
    assert _WORKER_MATCHER is not None
    return _scan_unit_with(_WORKER_MATCHER, unit)


def scan_paths(m: Matcher, paths: Iterable[str | os.PathLike], shards: int = 1) -> CountTable:
    """Scan newline-delimited JSON files (plain or gzip), optionally in parallel."""
    units = split_inputs(paths, pieces=max(shards, 1) * 4)
    if shards <= 1:
        return _merge_all(m.n_phrases, (_scan_unit_with(m, u) for u in units))
    with ProcessPoolExecutor(max_workers=shards, initializer=_init_worker, initargs=(m,)) as pool:
        return _merge_all(m.n_phrases, pool.map(_scan_unit, units))


def count_vocabulary(paths: Iterable[str | os.PathLike]) -> Counter:
    """Corpus-wide token counts, used to sample the background word set."""
    vocab: Counter = Counter()
    for unit in split_inputs(paths, 1):
        for line in _read_unit(unit):
            if not line.strip():
                continue
            try:
                d = parse_record(line)
            except ParseError:
                continue
            vocab.update(tokenize(d.text))
    return vocab
