"""Seeded synthetic corpora with planted phrase-frequency profiles.

Everything that ends up in the ground truth (background token counts,
planted insertions, documents per day, community and kind) is realized up
front from the seed. Text is rendered lazily, one day at a time, from a
per-day generator, so the truth can be used without materializing text.

Planted phrases are always separated from each other by at least one
token that belongs to neither the vocabulary nor any phrase, so the only
matches a scan can find are the ones recorded here.
"""

from __future__ import annotations

import csv
import datetime as dt
import json
import math
import os
from collections import Counter
from dataclasses import dataclass, field
from functools import cached_property
from typing import IO, Any, Iterator, Mapping, Sequence

import numpy as np

from .corpus import COMMENT, POST, SECONDS_PER_DAY, Document, date_to_day, tokenize, write_documents
from .phraseset import MAX_TOKENS, Phrase, PhraseSet
from .table import CountTable

SEPARATOR = "sep"


class SpecError(ValueError):
    """Invalid generator spec; the message starts with the offending field path."""

    def __init__(self, path: str, message: str):
        self.path = path
        super().__init__(f"{path}: {message}")


# -- profiles --------------------------------------------------------------


@dataclass(frozen=True)
class Constant:
    rate: float

    def expected(self, days: np.ndarray, background: np.ndarray) -> np.ndarray:
        return np.full(len(days), float(self.rate))


@dataclass(frozen=True)
class Ramp:
    start_rate: float
    end_rate: float

    def expected(self, days: np.ndarray, background: np.ndarray) -> np.ndarray:
        if len(days) == 1:
            return np.array([float(self.start_rate)])
        return np.linspace(self.start_rate, self.end_rate, len(days))


@dataclass(frozen=True)
class Trapezoid:
    """Rises over ``rise`` days from ``start``, holds ``height`` for
    ``plateau`` days, then falls over ``fall`` days; zero elsewhere."""

    start: int
    rise: int
    plateau: int
    fall: int
    height: float

    @property
    def end(self) -> int:
        return self.start + self.rise + self.plateau + self.fall - 1

    def expected(self, days: np.ndarray, background: np.ndarray) -> np.ndarray:
        out = np.zeros(len(days))
        for k in range(self.rise):
            out[self.start + k - days[0]] = self.height * (k + 1) / (self.rise + 1)
        top = self.start + self.rise
        out[top - days[0] : top - days[0] + self.plateau] = self.height
        down = top + self.plateau
        for k in range(self.fall):
            out[down + k - days[0]] = self.height * (self.fall - k) / (self.fall + 1)
        return out


@dataclass(frozen=True)
class Proportional:
    """Each background token of a day is matched by a plant with probability ``p``."""

    p: float

    def expected(self, days: np.ndarray, background: np.ndarray) -> np.ndarray:
        return self.p * background.astype(np.float64)


Profile = Constant | Ramp | Trapezoid | Proportional


@dataclass(frozen=True)
class Plant:
    phrase: str
    profile: Profile
    communities: Mapping[str, float] | None = None  # weights; None = document rates


@dataclass(frozen=True)
class PlantSpec:
    start_day: int
    end_day: int
    communities: Mapping[str, float]
    vocab_size: int = 1000
    background_rate: float = 1.0
    word_rates: Sequence[float] | None = None
    growth: float = 1.0
    plants: Sequence[Plant] = ()
    post_fraction: float = 0.1
    noise: bool = True
    seed: int = 0

    @property
    def vocabulary(self) -> list[str]:
        width = max(4, len(str(self.vocab_size - 1)))
        return [f"w{i:0{width}d}" for i in range(self.vocab_size)]

    @property
    def days(self) -> np.ndarray:
        return np.arange(self.start_day, self.end_day + 1)


# -- validation ------------------------------------------------------------


def _check_rate(path: str, value: float) -> None:
    if not isinstance(value, (int, float)) or not math.isfinite(value) or value < 0:
        raise SpecError(path, f"must be a finite rate >= 0, got {value!r}")


def _phrase_tokens(label: str) -> tuple[str, ...]:
    return tuple(tokenize(label)[:MAX_TOKENS])


def validate(spec: PlantSpec) -> None:
    if not isinstance(spec.seed, int) or spec.seed < 0:
        raise SpecError("seed", "must be a non-negative integer")
    if spec.start_day < 0 or spec.end_day < spec.start_day:
        raise SpecError("window", f"invalid day range [{spec.start_day}, {spec.end_day}]")
    if not spec.communities:
        raise SpecError("communities", "at least one community is required")
    for name, rate in spec.communities.items():
        if not name or name != name.lower() or any(c.isspace() for c in name):
            raise SpecError(f"communities.{name}", "names must be lowercase without whitespace")
        _check_rate(f"communities.{name}", rate)
    if spec.vocab_size < 1:
        raise SpecError("vocab_size", "must be >= 1")
    _check_rate("background_rate", spec.background_rate)
    if spec.word_rates is not None:
        if len(spec.word_rates) != spec.vocab_size:
            raise SpecError("word_rates", "needs one rate per vocabulary word")
        for i, r in enumerate(spec.word_rates):
            _check_rate(f"word_rates[{i}]", r)
    if not spec.growth > 0:
        raise SpecError("growth", "must be > 0")
    if not 0.0 <= spec.post_fraction <= 1.0:
        raise SpecError("post_fraction", "must lie in [0, 1]")

    vocab = set(spec.vocabulary)
    seen: set[tuple[str, ...]] = set()
    for i, plant in enumerate(spec.plants):
        where = f"plants[{i}]"
        toks = _phrase_tokens(plant.phrase)
        if not toks:
            raise SpecError(f"{where}.phrase", "has no tokens")
        if toks in seen:
            raise SpecError(f"{where}.phrase", f"duplicate phrase {plant.phrase!r}")
        seen.add(toks)
        clash = sorted(set(toks) & (vocab | {SEPARATOR}))
        if clash:
            raise SpecError(f"{where}.phrase", f"tokens {clash} collide with background vocabulary")
        prof = plant.profile
        if isinstance(prof, Constant):
            _check_rate(f"{where}.profile.rate", prof.rate)
        elif isinstance(prof, Ramp):
            _check_rate(f"{where}.profile.start_rate", prof.start_rate)
            _check_rate(f"{where}.profile.end_rate", prof.end_rate)
        elif isinstance(prof, Trapezoid):
            for name in ("rise", "fall"):
                if getattr(prof, name) < 0:
                    raise SpecError(f"{where}.profile.{name}", "must be >= 0")
            if prof.plateau < 1:
                raise SpecError(f"{where}.profile.plateau", "must be >= 1")
            _check_rate(f"{where}.profile.height", prof.height)
            if prof.start < spec.start_day or prof.end > spec.end_day:
                raise SpecError(f"{where}.profile", "trapezoid must lie inside the window")
        elif isinstance(prof, Proportional):
            if not 0.0 < prof.p < 1.0:
                raise SpecError(f"{where}.profile.p", "must lie in (0, 1)")
        else:
            raise SpecError(f"{where}.profile", f"unknown profile {prof!r}")
        if plant.communities is not None:
            if not plant.communities:
                raise SpecError(f"{where}.communities", "must not be empty")
            for name, w in plant.communities.items():
                if name not in spec.communities:
                    raise SpecError(f"{where}.communities.{name}", "unknown community")
                _check_rate(f"{where}.communities.{name}", w)
            if sum(plant.communities.values()) <= 0:
                raise SpecError(f"{where}.communities", "weights sum to zero")


# -- realization -----------------------------------------------------------


def _occurrences(needle: tuple[str, ...], hay: tuple[str, ...]) -> int:
    k = len(needle)
    return sum(1 for i in range(len(hay) - k + 1) if hay[i : i + k] == needle)


@dataclass
class GroundTruth:
    """Exact counts of what the generated corpus contains."""

    phrases: PhraseSet
    memes: Counter = field(default_factory=Counter)  # (phrase_id, day, community)
    background: Counter = field(default_factory=Counter)  # (word, day)
    documents: Counter = field(default_factory=Counter)  # (day, kind)

    def to_table(self, background: set[str] | frozenset[str] | None = None) -> CountTable:
        """The count table a scan with ``background`` words (default: all) must produce."""
        table = CountTable(len(self.phrases))
        table.memes.update(self.memes)
        if background is None:
            table.background.update(self.background)
        else:
            table.background.update({k: n for k, n in self.background.items() if k[0] in background})
        table.documents.update(self.documents)
        return table

    def phrase_day_counts(self) -> Counter:
        out: Counter = Counter()
        for (pid, day, _), n in self.memes.items():
            out[(pid, day)] += n
        return out

    def write_csv(self, fh: IO[str]) -> None:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["phrase", "day", "count"])
        labels = self.phrases.labels()
        for (pid, day), n in sorted(self.phrase_day_counts().items()):
            w.writerow([labels[pid], day, n])


def _realize(rng: np.random.Generator, expected: np.ndarray, noise: bool) -> np.ndarray:
    if noise:
        return rng.poisson(expected)
    return np.floor(expected + 0.5).astype(np.int64)


class SyntheticCorpus:
    """Realized corpus: exact ground truth plus lazily rendered documents."""

    def __init__(self, spec: PlantSpec):
        validate(spec)
        self.spec = spec
        self.vocab = spec.vocabulary
        self._vocab_arr = np.asarray(self.vocab)
        days = spec.days
        n_days = len(days)
        rng = np.random.default_rng(spec.seed)
        span = max(n_days - 1, 1)
        self.growth = spec.growth ** ((days - days[0]) / span)

        rates = np.asarray(spec.word_rates if spec.word_rates is not None else [spec.background_rate] * spec.vocab_size, dtype=np.float64)
        self.bg_counts = _realize(rng, rates[:, None] * self.growth[None, :], spec.noise).astype(np.int64)
        self.bg_totals = self.bg_counts.sum(axis=0)

        self.communities = sorted(spec.communities)
        cidx = {c: i for i, c in enumerate(self.communities)}
        doc_rates = np.array([spec.communities[c] for c in self.communities], dtype=np.float64)
        self.n_docs = _realize(rng, doc_rates[:, None] * self.growth[None, :], spec.noise).astype(np.int64)

        # insertions[p] : (n_communities, n_days)
        self.plant_tokens = [_phrase_tokens(p.phrase) for p in spec.plants]
        self.insertions = []
        for plant in spec.plants:
            exp = plant.profile.expected(days, self.bg_totals)
            if isinstance(plant.profile, Proportional):
                per_day = rng.binomial(self.bg_totals, plant.profile.p) if spec.noise else np.floor(exp + 0.5).astype(np.int64)
            else:
                per_day = _realize(rng, exp, spec.noise)
            weights = np.zeros(len(self.communities))
            source = plant.communities if plant.communities is not None else spec.communities
            for c, w in source.items():
                weights[cidx[c]] = w
            if weights.sum() <= 0:
                weights[:] = 1.0
            weights = weights / weights.sum()
            ins = np.zeros((len(self.communities), n_days), dtype=np.int64)
            for d in np.flatnonzero(per_day):
                ins[:, d] = rng.multinomial(int(per_day[d]), weights)
            self.insertions.append(ins)

        # a community-day with planted text needs a document to hold it
        for ins in self.insertions:
            self.n_docs = np.where((ins > 0) & (self.n_docs == 0), 1, self.n_docs)
        empty_days = (self.n_docs.sum(axis=0) == 0) & (self.bg_totals > 0)
        self.n_docs[0, empty_days] = 1
        self.n_posts = rng.binomial(self.n_docs, spec.post_fraction)
        self.phraseset = PhraseSet(
            tuple(Phrase(i, toks, p.phrase) for i, (p, toks) in enumerate(zip(spec.plants, self.plant_tokens))),
            background=frozenset(self.vocab),
            rng_seed=spec.seed,
        )

    @cached_property
    def truth(self) -> GroundTruth:
        """Exact counts, built on first use (large for big vocabularies)."""
        spec = self.spec
        truth = GroundTruth(self.phraseset)
        days = spec.days
        nested = [[_occurrences(q, p) for q in self.plant_tokens] for p in self.plant_tokens]
        for pi, ins in enumerate(self.insertions):
            for ci, d in zip(*np.nonzero(ins)):
                n = int(ins[ci, d])
                for qi, k in enumerate(nested[pi]):
                    if k:
                        truth.memes[(qi, int(days[d]), self.communities[ci])] += k * n
        wi, di = np.nonzero(self.bg_counts)
        vocab = np.asarray(self.vocab)
        truth.background.update(
            dict(zip(zip(vocab[wi].tolist(), days[di].tolist()), self.bg_counts[wi, di].tolist()))
        )
        for ci, d in zip(*np.nonzero(self.n_docs)):
            posts = int(self.n_posts[ci, d])
            day = int(days[d])
            if posts:
                truth.documents[(day, POST)] += posts
            if self.n_docs[ci, d] - posts:
                truth.documents[(day, COMMENT)] += int(self.n_docs[ci, d] - posts)
        return truth

    def _plant_text(self, i: int) -> str:
        label = self.spec.plants[i].phrase
        if len(tokenize(label)) <= MAX_TOKENS:
            return label
        return " ".join(self.plant_tokens[i])

    def documents_for_day(self, d: int) -> list[Document]:
        """Render day index ``d`` (0-based within the window)."""
        spec = self.spec
        day = int(spec.start_day + d)
        rng = np.random.default_rng([spec.seed, day])
        n_per = self.n_docs[:, d]
        n_total = int(n_per.sum())
        if n_total == 0:
            return []
        offsets = np.concatenate([[0], np.cumsum(n_per)])

        # shuffle the day's background tokens and deal them out uniformly
        words = rng.permutation(np.repeat(np.arange(len(self.vocab)), self.bg_counts[:, d]))
        lengths = rng.multinomial(len(words), np.full(n_total, 1.0 / n_total))
        bounds = np.concatenate([[0], np.cumsum(lengths)]).tolist()
        strs = self._vocab_arr[words].tolist()
        doc_words = [strs[bounds[i] : bounds[i + 1]] for i in range(n_total)]

        slots: list[dict[int, list[str]]] = [{} for _ in range(n_total)]
        for pi, ins in enumerate(self.insertions):
            text = self._plant_text(pi)
            for ci in np.flatnonzero(ins[:, d]):
                lo, hi = int(offsets[ci]), int(offsets[ci + 1])
                for doc in rng.integers(lo, hi, size=int(ins[ci, d])).tolist():
                    slot = int(rng.integers(0, len(doc_words[doc]) + 1))
                    slots[doc].setdefault(slot, []).append(text)

        seconds = rng.integers(0, SECONDS_PER_DAY, size=n_total)
        docs = []
        for ci, community in enumerate(self.communities):
            posts = int(self.n_posts[ci, d])
            for j, doc in enumerate(range(int(offsets[ci]), int(offsets[ci + 1]))):
                bw = doc_words[doc]
                placed = slots[doc]
                if placed:
                    pieces: list[str] = []
                    prev = 0
                    for k in sorted(placed):
                        pieces.extend(bw[prev:k])
                        pieces.append(f" {SEPARATOR} ".join(placed[k]))
                        prev = k
                    pieces.extend(bw[prev:])
                else:
                    pieces = bw
                kind = POST if j < posts else COMMENT
                if kind == POST:
                    text = (pieces[0] if pieces else "") + " " + " ".join(pieces[1:])
                else:
                    text = " ".join(pieces)
                docs.append(
                    Document(
                        id=f"s{spec.seed}-{day}-{doc}",
                        created_utc=day * SECONDS_PER_DAY + int(seconds[doc]),
                        community=community,
                        kind=kind,
                        text=text,
                    )
                )
        return docs

    def documents(self) -> Iterator[Document]:
        for d in range(len(self.spec.days)):
            yield from self.documents_for_day(d)

    def write(self, fh: IO[str]) -> int:
        n = 0
        for d in range(len(self.spec.days)):
            n += write_documents(self.documents_for_day(d), fh)
        return n


def generate(spec: PlantSpec) -> tuple[Iterator[Document], GroundTruth]:
    corpus = SyntheticCorpus(spec)
    return corpus.documents(), corpus.truth


# -- spec files ------------------------------------------------------------


def _day(value: Any, path: str) -> int:
    if isinstance(value, bool):
        raise SpecError(path, "expected a day index or ISO date")
    if isinstance(value, int):
        return value
    if isinstance(value, str):
        try:
            return date_to_day(dt.date.fromisoformat(value))
        except ValueError:
            pass
    raise SpecError(path, f"expected a day index or ISO date, got {value!r}")


def _profile(obj: Any, path: str) -> Profile:
    if not isinstance(obj, dict):
        raise SpecError(path, "must be an object")
    shape = obj.get("shape")
    try:
        if shape == "constant":
            return Constant(float(obj["rate"]))
        if shape == "ramp":
            return Ramp(float(obj["start_rate"]), float(obj["end_rate"]))
        if shape == "trapezoid":
            return Trapezoid(
                _day(obj["start"], f"{path}.start"),
                int(obj["rise"]),
                int(obj["plateau"]),
                int(obj["fall"]),
                float(obj["height"]),
            )
        if shape == "proportional":
            return Proportional(float(obj["p"]))
    except KeyError as exc:
        raise SpecError(f"{path}.{exc.args[0]}", "missing") from None
    except (TypeError, ValueError) as exc:
        raise SpecError(path, str(exc)) from None
    raise SpecError(f"{path}.shape", f"unknown shape {shape!r}")


_SPEC_KEYS = {
    "window", "communities", "vocab_size", "background_rate", "word_rates",
    "growth", "plants", "post_fraction", "noise", "seed",
}


def spec_from_dict(obj: Mapping[str, Any]) -> PlantSpec:
    """Build a :class:`PlantSpec` from its JSON form."""
    if not isinstance(obj, Mapping):
        raise SpecError("$", "spec must be an object")
    unknown = sorted(set(obj) - _SPEC_KEYS)
    if unknown:
        raise SpecError(unknown[0], "unknown field")
    window = obj.get("window")
    if not isinstance(window, (list, tuple)) or len(window) != 2:
        raise SpecError("window", "must be [first_day, last_day]")
    communities = obj.get("communities")
    if not isinstance(communities, Mapping):
        raise SpecError("communities", "must map community name to documents per day")
    plants = []
    for i, p in enumerate(obj.get("plants", [])):
        if not isinstance(p, Mapping) or "phrase" not in p:
            raise SpecError(f"plants[{i}].phrase", "missing")
        plants.append(Plant(str(p["phrase"]), _profile(p.get("profile"), f"plants[{i}].profile"), p.get("communities")))
    spec = PlantSpec(
        start_day=_day(window[0], "window[0]"),
        end_day=_day(window[1], "window[1]"),
        communities=dict(communities),
        vocab_size=int(obj.get("vocab_size", 1000)),
        background_rate=float(obj.get("background_rate", 1.0)),
        word_rates=obj.get("word_rates"),
        growth=float(obj.get("growth", 1.0)),
        plants=tuple(plants),
        post_fraction=float(obj.get("post_fraction", 0.1)),
        noise=bool(obj.get("noise", True)),
        seed=int(obj.get("seed", 0)),
    )
    validate(spec)
    return spec


def load_spec(path: str | os.PathLike) -> PlantSpec:
    with open(path, encoding="utf-8") as fh:
        try:
            obj = json.load(fh)
        except json.JSONDecodeError as exc:
            raise SpecError("$", f"invalid JSON ({exc})") from None
    return spec_from_dict(obj)
