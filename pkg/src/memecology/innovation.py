"""Meme entry events and per-year community innovation rankings."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping

from . import stats
from .corpus import year_of
from .table import CountTable

MAX_ENTRIES = 1000
MRR_MODES = ("restart", "global")


class InnovationError(ValueError):
    pass


@dataclass(frozen=True)
class Entry:
    community: str
    first_use_day: int


@dataclass(frozen=True)
class EntryList:
    phrase_id: int
    entries: tuple[Entry, ...]

    @property
    def beachhead(self) -> Entry | None:
        return self.entries[0] if self.entries else None

    def __len__(self) -> int:
        return len(self.entries)


def entry_events(table: CountTable, limit: int = MAX_ENTRIES) -> dict[int, EntryList]:
    """First-use day of each meme in each community, earliest first.

    Same-day entries are ordered by community name. Lists keep at most
    ``limit`` entries. Memes that never occur get an empty list.
    """
    first: dict[int, dict[str, int]] = {pid: {} for pid in range(table.n_phrases)}
    for (pid, day, community), n in table.memes.items():
        if n < 1:
            continue
        seen = first.setdefault(pid, {})
        if community not in seen or day < seen[community]:
            seen[community] = day
    out = {}
    for pid, seen in first.items():
        ordered = sorted(seen.items(), key=lambda kv: (kv[1], kv[0]))[:limit]
        out[pid] = EntryList(pid, tuple(Entry(c, d) for c, d in ordered))
    return out


@dataclass(frozen=True)
class InnovationRanking:
    year: int
    scores: dict[str, float] = field(default_factory=dict)
    n_memes: int = 0

    @property
    def ordered(self) -> list[tuple[str, float]]:
        return sorted(self.scores.items(), key=lambda kv: (-kv[1], kv[0]))

    def top(self, k: int = 10) -> list[tuple[str, float]]:
        return self.ordered[:k]


def innovation_ranking(entries: Mapping[int, EntryList], year: int, mode: str = "restart") -> InnovationRanking:
    """Mean reciprocal rank of each community over the memes it entered in ``year``.

    In ``restart`` mode ranks are recomputed within the year (the first
    community to use a meme that year has rank 1); in ``global`` mode the
    meme's all-time entry rank is kept. Each meme with at least one entry
    in the year contributes ``1/rank`` to the communities listed and 0 to
    every other community.
    """
    if mode not in MRR_MODES:
        raise InnovationError(f"mrr mode must be one of {MRR_MODES}")
    sums: dict[str, float] = {}
    n_memes = 0
    for pid in sorted(entries):
        ranked = [
            (rank, e.community)
            for rank, e in enumerate(entries[pid].entries, 1)
            if year_of(e.first_use_day) == year
        ]
        if not ranked:
            continue
        n_memes += 1
        for k, (global_rank, community) in enumerate(ranked, 1):
            rank = k if mode == "restart" else global_rank
            sums[community] = sums.get(community, 0.0) + 1.0 / rank
    if not n_memes:
        return InnovationRanking(year)
    return InnovationRanking(year, {c: s / n_memes for c, s in sums.items()}, n_memes)


def years_with_entries(entries: Mapping[int, EntryList]) -> list[int]:
    return sorted({year_of(e.first_use_day) for el in entries.values() for e in el.entries})


def rank_shift(r1: InnovationRanking, r2: InnovationRanking) -> tuple[float, float, int]:
    """Kendall tau-b between two years' scores over their common communities."""
    common = sorted(set(r1.scores) & set(r2.scores))
    if len(common) < 3:
        raise InnovationError(f"rank shift needs >= 3 common communities, got {len(common)}")
    tau, p = stats.kendall_tau_b([r1.scores[c] for c in common], [r2.scores[c] for c in common])
    return tau, p, len(common)
