"""Documents, tokenization, calendar helpers and newline-delimited JSON input."""

from __future__ import annotations

import datetime as dt
import gzip
import json
import logging
import os
import re
import string
from collections import Counter
from dataclasses import dataclass
from pathlib import Path
from typing import IO, Iterable, Iterator

log = logging.getLogger(__name__)

SECONDS_PER_DAY = 86400
POST = "post"
COMMENT = "comment"
KINDS = (POST, COMMENT)

_EPOCH = dt.date(1970, 1, 1)
_GZIP_MAGIC = b"\x1f\x8b"


class ParseError(ValueError):
    """A line that is not a well-formed record."""

    def __init__(self, message: str, lineno: int | None = None):
        self.lineno = lineno
        where = f"line {lineno}: " if lineno is not None else ""
        super().__init__(where + message)


class ValidationError(ParseError):
    """A well-formed record that lacks or misstates a required field."""


@dataclass(frozen=True, slots=True)
class Document:
    id: str
    created_utc: int
    community: str
    kind: str
    text: str

    @property
    def day(self) -> int:
        return self.created_utc // SECONDS_PER_DAY


# -- calendar --------------------------------------------------------------


def day_of(created_utc: int) -> int:
    return created_utc // SECONDS_PER_DAY


def day_to_date(day: int) -> dt.date:
    return _EPOCH + dt.timedelta(days=day)


def date_to_day(date: dt.date) -> int:
    return (date - _EPOCH).days


def month_of(day: int) -> tuple[int, int]:
    d = day_to_date(day)
    return d.year, d.month


def year_of(day: int) -> int:
    return day_to_date(day).year


def month_label(month: tuple[int, int]) -> str:
    return f"{month[0]:04d}-{month[1]:02d}"


def month_ordinal(month: tuple[int, int]) -> int:
    """Months since 1970-01; consecutive months differ by one."""
    return (month[0] - 1970) * 12 + month[1] - 1


def month_bounds(month: tuple[int, int]) -> tuple[int, int]:
    """First and last day index of a calendar month."""
    year, mon = month
    first = dt.date(year, mon, 1)
    nxt = dt.date(year + (mon == 12), mon % 12 + 1, 1)
    return date_to_day(first), date_to_day(nxt) - 1


def months_between(first_day: int, last_day: int) -> list[tuple[int, int]]:
    months = []
    m = month_of(first_day)
    end = month_of(last_day)
    while m <= end:
        months.append(m)
        m = (m[0] + (m[1] == 12), m[1] % 12 + 1)
    return months


# -- tokenization ----------------------------------------------------------

_TOKEN_RE = re.compile(r"(?:[^\W_]|')+")
_KEEP = set(string.ascii_lowercase + string.ascii_uppercase + string.digits + "'")
_ASCII_SEP = str.maketrans({chr(c): " " for c in range(128) if chr(c) not in _KEEP})


def tokenize(text: str) -> list[str]:
    """Lowercase ``text`` and split it into runs of letters, digits and apostrophes.

    The typographic apostrophe U+2019 is folded to ``'``.
    """
    if text.isascii():
        return text.lower().translate(_ASCII_SEP).split()
    return _TOKEN_RE.findall(text.lower().replace("’", "'"))


# -- records ---------------------------------------------------------------


def _as_int(value, field: str, lineno: int | None) -> int:
    if isinstance(value, bool):
        raise ValidationError(f"{field} must be an integer", lineno)
    if isinstance(value, int):
        return value
    if isinstance(value, float) and value.is_integer():
        return int(value)
    if isinstance(value, str) and value.strip().isdigit():
        return int(value)
    raise ValidationError(f"{field} must be an integer, got {value!r}", lineno)


def _text_field(obj: dict, key: str) -> str:
    value = obj.get(key)
    return value if isinstance(value, str) else ""


def parse_record(line: str | bytes, lineno: int | None = None) -> Document:
    """Parse one newline-delimited JSON record into a validated :class:`Document`.

    Posts (``kind == "post"``) get ``title + " " + selftext``; comments get
    ``body``. A record without ``kind`` is a post when it carries a title.
    """
    try:
        obj = json.loads(line)
    except (json.JSONDecodeError, UnicodeDecodeError) as exc:
        raise ParseError(f"malformed record ({exc})", lineno) from None
    if not isinstance(obj, dict):
        raise ParseError("record is not a JSON object", lineno)

    if obj.get("created_utc") is None:
        raise ValidationError("missing created_utc", lineno)
    created = _as_int(obj["created_utc"], "created_utc", lineno)
    if created < 0:
        raise ValidationError("created_utc must be >= 0", lineno)

    community = obj.get("subreddit")
    if not isinstance(community, str) or not community:
        raise ValidationError("missing subreddit", lineno)
    if any(c.isspace() for c in community):
        raise ValidationError(f"subreddit contains whitespace: {community!r}", lineno)

    kind = obj.get("kind")
    if kind is None:
        kind = POST if "title" in obj else COMMENT
    if kind not in KINDS:
        raise ValidationError(f"kind must be 'post' or 'comment', got {kind!r}", lineno)

    if kind == POST:
        text = _text_field(obj, "title") + " " + _text_field(obj, "selftext")
    else:
        text = _text_field(obj, "body")

    doc_id = obj.get("id")
    return Document(
        id="" if doc_id is None else str(doc_id),
        created_utc=created,
        community=community.lower(),
        kind=kind,
        text=text,
    )


# -- input files -----------------------------------------------------------


def iter_input_files(paths: Iterable[str | os.PathLike]) -> list[Path]:
    """Expand files and directories (recursively, sorted) into a file list."""
    files: list[Path] = []
    for p in paths:
        p = Path(p)
        if p.is_dir():
            files.extend(sorted(f for f in p.rglob("*") if f.is_file() and not f.name.startswith(".")))
        elif p.is_file():
            files.append(p)
        else:
            raise FileNotFoundError(f"input not found: {p}")
    return files


def is_gzip(path: str | os.PathLike) -> bool:
    with open(path, "rb") as fh:
        return fh.read(2) == _GZIP_MAGIC


def open_binary(path: str | os.PathLike) -> IO[bytes]:
    """Open a possibly gzip-compressed file; compression is detected by magic bytes."""
    if is_gzip(path):
        return gzip.open(path, "rb")
    return open(path, "rb")


@dataclass
class ReadStats:
    records: int = 0
    skipped: int = 0


def iter_documents(
    paths: Iterable[str | os.PathLike], stats: ReadStats | None = None
) -> Iterator[Document]:
    """Stream valid documents from input files, counting and skipping bad records."""
    stats = stats if stats is not None else ReadStats()
    for path in iter_input_files(paths):
        with open_binary(path) as fh:
            for lineno, line in enumerate(fh, 1):
                if not line.strip():
                    continue
                try:
                    doc = parse_record(line, lineno)
                except ParseError as exc:
                    stats.skipped += 1
                    log.debug("%s: %s", path, exc)
                    continue
                stats.records += 1
                yield doc


def write_documents(docs: Iterable[Document], fh: IO[str]) -> int:
    """Write documents in the input record format; returns the record count."""
    n = 0
    for d in docs:
        rec = {"id": d.id, "created_utc": d.created_utc, "subreddit": d.community, "kind": d.kind}
        if d.kind == POST:
            title, _, selftext = d.text.partition(" ")
            rec["title"] = title
            rec["selftext"] = selftext
        else:
            rec["body"] = d.text
        fh.write(json.dumps(rec, ensure_ascii=False, separators=(",", ":")))
        fh.write("\n")
        n += 1
    return n


# -- activity --------------------------------------------------------------


@dataclass(frozen=True)
class MonthActivity:
    month: tuple[int, int]
    posts: int
    comments: int

    @property
    def total(self) -> int:
        return self.posts + self.comments


def activity_from_counts(day_kind_counts: dict[tuple[int, str], int]) -> list[MonthActivity]:
    """Monthly post/comment counts from per-(day, kind) document counts."""
    posts: Counter = Counter()
    comments: Counter = Counter()
    for (day, kind), n in day_kind_counts.items():
        m = month_of(day)
        (posts if kind == POST else comments)[m] += n
    months = sorted(set(posts) | set(comments))
    return [MonthActivity(m, posts[m], comments[m]) for m in months]


def corpus_stats(documents: Iterable[Document]) -> list[MonthActivity]:
    """Posts and comments per UTC calendar month, one row per month present."""
    counts: Counter = Counter()
    for d in documents:
        counts[(d.day, d.kind)] += 1
    return activity_from_counts(counts)
