from __future__ import annotations

import math
from collections import Counter

import pytest

from memecology.corpus import Document, tokenize
from memecology.phraseset import PhraseSet, load_phrases


def naive_counts(phrases: PhraseSet, docs, count_mode: str = "all") -> tuple[Counter, Counter]:
    """Sliding-window reference for the matcher, keyed like CountTable."""
    memes: Counter = Counter()
    background: Counter = Counter()
    for d in docs:
        toks = tokenize(d.text)
        for p in phrases.phrases:
            k = len(p.tokens)
            hits = sum(1 for i in range(len(toks) - k + 1) if tuple(toks[i:i + k]) == p.tokens)
            if count_mode == "per-document":
                hits = min(hits, 1)
            if hits:
                memes[(p.phrase_id, d.day, d.community)] += hits
        for t in toks:
            if t in phrases.background:
                background[(t, d.day)] += 1
    return memes, background


def simpson_pairs(counts) -> float:
    """Ordered-pair enumeration of the probability that two draws differ."""
    labels = [s for s, n in enumerate(counts) for _ in range(n)]
    n = len(labels)
    differ = sum(1 for i in range(n) for j in range(n) if i != j and labels[i] != labels[j])
    return differ / (n * (n - 1))


def kendall_pairs(a, b) -> float:
    """O(n^2) tau-b."""
    n = len(a)
    conc = disc = ta = tb = 0
    for i in range(n):
        for j in range(i + 1, n):
            da = (a[i] > a[j]) - (a[i] < a[j])
            db = (b[i] > b[j]) - (b[i] < b[j])
            if da == 0 and db == 0:
                continue
            if da == 0:
                ta += 1
            elif db == 0:
                tb += 1
            elif da == db:
                conc += 1
            else:
                disc += 1
    return (conc - disc) / math.sqrt((conc + disc + ta) * (conc + disc + tb))


def doc(text: str, day: int = 0, community: str = "pics", kind: str = "comment", i: int = 0) -> Document:
    return Document(str(i), day * 86400 + 3600, community, kind, text)


@pytest.fixture
def small_phrases() -> PhraseSet:
    return load_phrases(["na na", "na na na", "y u no", "such wow", "wow"]).with_background(["the", "cat", "wow"])


LENGTH_HISTOGRAM = {1: 69, 2: 80, 3: 69, 4: 48, 5: 25, 6: 25, 7: 18, 8: 18}
_SEEDS = {
    1: ["thicc", "yeet", "wat", "mfw", "impossibru"],
    2: ["moms spaghetti", "zerg rush", "y tho"],
    3: ["winter is coming", "u wot m8"],
    4: ["do you even lift", "kill it with fire"],
    5: ["hello darkness my old friend"],
    6: ["shrek is love shrek is life"],
    7: ["still a better love story than twilight"],
    8: ["this is why we cant have nice things"],
}


def lexicon_lines() -> list[str]:
    """A 352-phrase lexicon with the 1..8 token length mix of a real meme list."""
    lines = []
    for k, count in LENGTH_HISTOGRAM.items():
        seeds = _SEEDS[k]
        lines += seeds
        lines += [" ".join(f"m{k}x{i}t{j}" for j in range(k)) for i in range(count - len(seeds))]
    return lines


ACCEPTANCE: list[tuple[str, bool, str]] = []


def record(name: str, ok: bool, detail: str) -> None:
    ACCEPTANCE.append((name, ok, detail))


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for name, ok, detail in ACCEPTANCE:
        terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'}  {name}: {detail}")
