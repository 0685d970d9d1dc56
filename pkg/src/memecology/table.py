"""Mergeable occurrence counts and their on-disk formats.

The binary cache starts with the magic ``MEC1`` followed by a JSON header
and three little-endian int64 blocks (meme, background and document
counts), all sorted by key so equal tables serialize to equal bytes.
"""

from __future__ import annotations

import csv
import json
import os
import struct
from collections import Counter
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .corpus import KINDS

MAGIC = b"MEC1"
FORMAT_VERSION = 1


class CacheVersionError(ValueError):
    """The cache was written by an incompatible version; re-scan required."""


@dataclass
class CountTable:
    """Occurrence counts keyed by (phrase_id, day, community).

    Also holds background-word counts keyed by (word, day) and document
    counts keyed by (day, kind). Absent keys mean zero.
    """

    n_phrases: int = 0
    memes: Counter = field(default_factory=Counter)
    background: Counter = field(default_factory=Counter)
    documents: Counter = field(default_factory=Counter)
    tokens: int = 0
    skipped: int = 0

    def update(self, other: CountTable) -> CountTable:
        if other.n_phrases != self.n_phrases:
            raise ValueError("cannot merge tables over different phrase sets")
        self.memes.update(other.memes)
        self.background.update(other.background)
        self.documents.update(other.documents)
        self.tokens += other.tokens
        self.skipped += other.skipped
        return self

    def merge(self, other: CountTable) -> CountTable:
        return CountTable(self.n_phrases).update(self).update(other)

    __add__ = merge

    @property
    def n_documents(self) -> int:
        return sum(self.documents.values())

    def day_range(self) -> tuple[int, int] | None:
        days = {k[1] for k in self.memes}
        days.update(k[1] for k in self.background)
        days.update(k[0] for k in self.documents)
        if not days:
            return None
        return min(days), max(days)

    def phrase_days(self) -> dict[int, Counter]:
        """Per phrase, counts summed over communities and keyed by day."""
        out: dict[int, Counter] = {}
        for (pid, day, _), n in self.memes.items():
            out.setdefault(pid, Counter())[day] += n
        return out

    def background_days(self) -> Counter:
        out: Counter = Counter()
        for (_, day), n in self.background.items():
            out[day] += n
        return out

    def communities(self) -> list[str]:
        return sorted({k[2] for k in self.memes})


# -- binary cache ----------------------------------------------------------


def _pack(rows: list[tuple[int, ...]], width: int) -> bytes:
    arr = np.asarray(rows, dtype="<i8").reshape(len(rows), width)
    return arr.tobytes()


def _unpack(buf: bytes, offset: int, count: int, width: int) -> tuple[np.ndarray, int]:
    size = count * width * 8
    arr = np.frombuffer(buf, dtype="<i8", count=count * width, offset=offset).reshape(count, width)
    return arr, offset + size


def dump_cache(table: CountTable, meta: dict | None = None) -> bytes:
    """Serialize ``table`` (plus free-form ``meta``) deterministically."""
    communities = sorted({k[2] for k in table.memes})
    words = sorted({k[0] for k in table.background})
    cidx = {c: i for i, c in enumerate(communities)}
    widx = {w: i for i, w in enumerate(words)}
    kidx = {k: i for i, k in enumerate(KINDS)}

    meme_rows = sorted((pid, day, cidx[c], n) for (pid, day, c), n in table.memes.items())
    bg_rows = sorted((widx[w], day, n) for (w, day), n in table.background.items())
    doc_rows = sorted((day, kidx[k], n) for (day, k), n in table.documents.items())

    header = {
        "format": FORMAT_VERSION,
        "n_phrases": table.n_phrases,
        "tokens": table.tokens,
        "skipped": table.skipped,
        "communities": communities,
        "words": words,
        "counts": [len(meme_rows), len(bg_rows), len(doc_rows)],
        "meta": meta or {},
    }
    hbytes = json.dumps(header, sort_keys=True, ensure_ascii=False, separators=(",", ":")).encode("utf-8")
    return b"".join(
        [
            MAGIC,
            struct.pack("<Q", len(hbytes)),
            hbytes,
            _pack(meme_rows, 4),
            _pack(bg_rows, 3),
            _pack(doc_rows, 3),
        ]
    )


def load_cache_bytes(buf: bytes) -> tuple[CountTable, dict]:
    if buf[:4] != MAGIC:
        raise CacheVersionError(
            f"unrecognized count cache (magic {buf[:4]!r}, expected {MAGIC!r}); re-scan required"
        )
    (hlen,) = struct.unpack_from("<Q", buf, 4)
    header = json.loads(buf[12 : 12 + hlen].decode("utf-8"))
    if header.get("format") != FORMAT_VERSION:
        raise CacheVersionError(
            f"count cache format {header.get('format')} != {FORMAT_VERSION}; re-scan required"
        )
    n_meme, n_bg, n_doc = header["counts"]
    off = 12 + hlen
    memes, off = _unpack(buf, off, n_meme, 4)
    bg, off = _unpack(buf, off, n_bg, 3)
    docs, off = _unpack(buf, off, n_doc, 3)

    communities = header["communities"]
    words = header["words"]
    table = CountTable(header["n_phrases"], tokens=header["tokens"], skipped=header["skipped"])
    table.memes.update({(int(p), int(d), communities[c]): int(n) for p, d, c, n in memes.tolist()})
    table.background.update({(words[w], int(d)): int(n) for w, d, n in bg.tolist()})
    table.documents.update({(int(d), KINDS[k]): int(n) for d, k, n in docs.tolist()})
    return table, header["meta"]


def save_cache(path: str | os.PathLike, table: CountTable, meta: dict | None = None) -> None:
    Path(path).write_bytes(dump_cache(table, meta))


def load_cache(path: str | os.PathLike) -> tuple[CountTable, dict]:
    return load_cache_bytes(Path(path).read_bytes())


# -- CSV -------------------------------------------------------------------


def write_csv(table: CountTable, meme_path: str | os.PathLike, background_path: str | os.PathLike) -> None:
    with open(meme_path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["phrase_id", "day", "community", "count"])
        for (pid, day, c), n in sorted(table.memes.items()):
            w.writerow([pid, day, c, n])
    with open(background_path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["background_word", "day", "count"])
        for (word, day), n in sorted(table.background.items()):
            w.writerow([word, day, n])


def read_csv(meme_path: str | os.PathLike, background_path: str | os.PathLike, n_phrases: int) -> CountTable:
    table = CountTable(n_phrases)
    with open(meme_path, newline="", encoding="utf-8") as fh:
        for row in csv.DictReader(fh):
            table.memes[(int(row["phrase_id"]), int(row["day"]), row["community"])] += int(row["count"])
    with open(background_path, newline="", encoding="utf-8") as fh:
        for row in csv.DictReader(fh):
            table.background[(row["background_word"], int(row["day"]))] += int(row["count"])
    return table
