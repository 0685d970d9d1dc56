"""Acceptance gate. Each test records one PASS/FAIL line, printed at the end
of the run under "acceptance criteria"."""

import datetime as dt
import itertools
import math
import os
import random
import time
from collections import Counter
from fractions import Fraction

import numpy as np
import pytest

from memecology import cli
from memecology.corpus import Document, date_to_day, tokenize
from memecology.dynamics import fit_lognormal, peak_aligned, raw_peak, relative_curve
from memecology.ecology import DEFAULT_ALPHAS, LifespanParams, lifespan, lifespan_trend, lifespans, simpson_diversity
from memecology.matcher import build_matcher, scan_corpus
from memecology.phraseset import load_phrases
from memecology.series import DailySeries, NormalizedSeries, Window, aggregate_attention, all_daily_series, normalized_matrix
from memecology.stats import kendall_tau_b
from memecology.synth import Constant, Plant, PlantSpec, Proportional, SyntheticCorpus, Trapezoid
from conftest import kendall_pairs, lexicon_lines, record, simpson_pairs

pytestmark = pytest.mark.acceptance


def check(name, ok, detail):
    record(name, bool(ok), detail)
    assert ok, f"{name}: {detail}"


# -- matcher ---------------------------------------------------------------


def ngram_oracle(phrases, docs):
    """Sliding-window reference: count every window of every phrase length."""
    lengths = sorted({len(p.tokens) for p in phrases.phrases})
    memes, bg = Counter(), Counter()
    for d in docs:
        toks = tokenize(d.text)
        grams = Counter()
        for k in lengths:
            for i in range(len(toks) - k + 1):
                grams[tuple(toks[i : i + k])] += 1
        for p in phrases.phrases:
            if grams[p.tokens]:
                memes[(p.phrase_id, d.day, d.community)] += grams[p.tokens]
        for t in toks:
            if t in phrases.background:
                bg[(t, d.day)] += 1
    return memes, bg


def random_corpus(rng: random.Random):
    vocab = [f"{rng.choice('abcdefgh')}{i}" for i in range(rng.randint(3, 25))] + ["can't", "y'all"]
    phrases = [" ".join(rng.choice(vocab) for _ in range(rng.randint(1, 8))) for _ in range(rng.randint(1, 50))]
    seps = [" ", "  ", ", ", "! ", " - ", "\n"]
    docs = []
    for i in range(rng.randint(1, 1000)):
        toks = [rng.choice(vocab) for _ in range(rng.randint(0, 30))]
        toks = [t.upper() if rng.random() < 0.1 else t for t in toks]
        text = "".join(t + rng.choice(seps) for t in toks)
        docs.append(Document(str(i), rng.randint(0, 5) * 86400 + rng.randint(0, 86399),
                             rng.choice(["a", "b", "c"]), rng.choice(["post", "comment"]), text))
    ps = load_phrases(phrases).with_background(rng.sample(vocab, rng.randint(0, len(vocab))))
    return ps, docs


def test_matcher_oracle():
    rng = random.Random(20240601)
    t0 = time.perf_counter()
    bad = 0
    for _ in range(200):
        ps, docs = random_corpus(rng)
        table = scan_corpus(build_matcher(ps), docs)
        memes, bg = ngram_oracle(ps, docs)
        bad += table.memes != memes or table.background != bg or table.n_documents != len(docs)
    elapsed = time.perf_counter() - t0
    check("matcher oracle", bad == 0 and elapsed < 60, f"{200 - bad}/200 corpora exact, {elapsed:.1f}s (< 60s)")


# -- shard invariance ------------------------------------------------------


def shard_spec():
    plants = tuple(Plant(p, Constant(0.4)) for p in lexicon_lines())
    return PlantSpec(date_to_day(dt.date(2015, 3, 1)), date_to_day(dt.date(2015, 3, 1)) + 99,
                     {"pics": 500.0, "funny": 300.0, "aww": 200.0}, vocab_size=2000, background_rate=10.0,
                     growth=1.5, plants=plants, seed=11)


def test_shard_invariance(tmp_path):
    corpus = SyntheticCorpus(shard_spec())
    src = tmp_path / "corpus.jsonl"
    with open(src, "w", encoding="utf-8") as fh:
        n = corpus.write(fh)
    (tmp_path / "phrases.txt").write_text("\n".join(lexicon_lines()) + "\n")
    (tmp_path / "bg.txt").write_text("\n".join(corpus.vocab[::4]) + "\n")
    caches = {}
    for shards in (1, 2, 8):
        out = tmp_path / f"s{shards}"
        cfg = cli.RunConfig(inputs=[str(src)], phrases=str(tmp_path / "phrases.txt"),
                            background=str(tmp_path / "bg.txt"), shards=shards, out=str(out))
        cli.cmd_scan(cfg)
        caches[shards] = (out / "counts.mec").read_bytes()
    same = len(set(caches.values())) == 1
    from memecology.table import load_cache_bytes
    table, _ = load_cache_bytes(caches[1])
    truth_ok = table.memes == corpus.truth.memes
    check("shard invariance", n >= 100_000 and same and truth_ok,
          f"{n} docs, caches identical for shards 1/2/8: {same}, memes equal ground truth: {truth_ok}")


# -- Simpson ---------------------------------------------------------------


def test_simpson_oracle():
    worst = 0.0
    cases = 0
    for species in range(1, 6):
        for counts in itertools.product(range(13), repeat=species):
            total = sum(counts)
            if total < 2 or total > 12:
                continue
            worst = max(worst, abs(simpson_diversity(counts) - simpson_pairs(counts)))
            cases += 1
    spots = (simpson_diversity([7]) == 0.0, simpson_diversity([1, 1]) == 1.0,
             abs(simpson_diversity([2, 2]) - 2 / 3) < 1e-15)
    check("Simpson oracle", worst < 1e-12 and all(spots),
          f"{cases} vectors, max abs error {worst:.1e}; D({{n}})=0, D({{1,1}})=1, D({{2,2}})=2/3: {all(spots)}")


# -- stationarity ----------------------------------------------------------


def test_stationarity_analogue():
    first, last = date_to_day(dt.date(2010, 1, 1)), date_to_day(dt.date(2019, 12, 31))
    spec = PlantSpec(first, last, {"a": 1.0}, vocab_size=200, background_rate=5.0, growth=10.0,
                     plants=(Plant("y tho", Proportional(0.001)),), seed=0)
    table = SyntheticCorpus(spec).truth.to_table()
    b = table.background_days()
    growth = sum(b[d] for d in range(last - 30, last + 1)) / sum(b[d] for d in range(first, first + 31))
    res = aggregate_attention(table, [0], Window(first, last))
    check("stationarity analogue", len(res.rows) == 120 and abs(res.pearson_r) < 0.05,
          f"120 months, background grew {growth:.1f}x, Pearson r = {res.pearson_r:+.4f} (need |r| < 0.05), seed 0")


# -- lifespans -------------------------------------------------------------


def planted_lifespan(prof: Trapezoid, alpha: float) -> tuple[int, int]:
    """Exact run of a noise-free trapezoid above alpha * height."""
    a = Fraction(str(alpha))
    rise_ok = [k for k in range(prof.rise) if Fraction(k + 1, prof.rise + 1) >= a]
    fall_ok = [k for k in range(prof.fall) if Fraction(prof.fall - k, prof.fall + 1) >= a]
    start = prof.start + (rise_ok[0] if rise_ok else prof.rise)
    end = prof.start + prof.rise + prof.plateau - 1 + (fall_ok[-1] + 1 if fall_ok else 0)
    return start, end


def _shoulder(rng):
    # skip widths where a shoulder value lands exactly on a threshold
    while True:
        w = rng.randint(0, 160)
        if (w + 1) % 50:
            return w


def test_lifespan_recovery():
    rng = random.Random(7)
    first = date_to_day(dt.date(2012, 1, 1))
    plants = []
    for i in range(50):
        rise, fall = _shoulder(rng), _shoulder(rng)
        start = first + rng.randint(0, 600)
        height = float((rise + 1) * (fall + 1))  # integer at every shoulder day
        plants.append(Plant(f"meme{i} x", Trapezoid(start, rise, rng.randint(1, 90), fall, height)))
    last = max(p.profile.end for p in plants) + 5
    spec = PlantSpec(first, last, {"a": 1.0}, vocab_size=10, background_rate=100.0, plants=tuple(plants),
                     noise=False, seed=1)
    table = SyntheticCorpus(spec).truth.to_table()
    spans = lifespans(normalized_matrix(table, range(50), Window(first, last)), DEFAULT_ALPHAS)
    mismatched = [
        (s.phrase_id, s.alpha) for s in spans
        if (s.start_day, s.end_day) != planted_lifespan(plants[s.phrase_id].profile, s.alpha)
    ]
    distinct = len({(s.phrase_id, s.length_days) for s in spans}) - 50

    mono_rng = np.random.default_rng(3)
    violations = 0
    for _ in range(1000):
        n = int(mono_rng.integers(1, 200))
        v = mono_rng.exponential(1.0, n) * (mono_rng.random(n) < 0.8)
        if not v.any():
            v[0] = 1.0
        s = NormalizedSeries(0, Window(0, n - 1), v, np.ones(n, dtype=bool))
        lengths = [lifespan(s, LifespanParams(a)).length_days for a in sorted(mono_rng.uniform(0.001, 0.99, 4))]
        violations += any(x < y for x, y in zip(lengths, lengths[1:]))
    check("lifespan recovery", len(spans) == 150 and not mismatched and violations == 0,
          f"150/150 (meme, alpha) lifespans day-exact: {not mismatched} "
          f"({distinct} where alpha changes the length); alpha-monotonicity violations on 1000 series: {violations}")


def test_trend_analogue():
    births = [date_to_day(dt.date(2010 + m // 12, m % 12 + 1, 5)) for m in range(120)]
    planted = [max(1, round(300 * 0.98 ** m)) for m in range(120)]
    plants = tuple(Plant(f"meme{m}", Trapezoid(b, 0, planted[m], 0, 20.0)) for m, b in enumerate(births))
    first, last = births[0], max(p.profile.end for p in plants)
    spec = PlantSpec(first, last, {"a": 1.0}, vocab_size=50, background_rate=20.0, plants=plants, seed=0)
    table = SyntheticCorpus(spec).truth.to_table()
    window = Window(first, last)
    spans = lifespans(normalized_matrix(table, range(120), window), DEFAULT_ALPHAS)
    trends = lifespan_trend(spans, window)
    ok = all(trends[a].fit.slope < 0 and trends[a].fit.pearson_r < -0.8 for a in DEFAULT_ALPHAS)
    detail = ", ".join(f"alpha={a}: slope {trends[a].fit.slope:+.3f}, r {trends[a].fit.pearson_r:+.3f}"
                       for a in DEFAULT_ALPHAS)
    check("trend analogue", ok, detail + " (need slope < 0, r < -0.8)")


# -- Kendall ---------------------------------------------------------------


def test_kendall_oracle():
    rng = random.Random(5)
    worst = 0.0
    done = 0
    while done < 500:
        n = rng.randint(3, 50)
        k = rng.randint(2, 10)
        a = [rng.randint(1, k) for _ in range(n)]
        b = [rng.randint(1, k) for _ in range(n)]
        if len(set(a)) < 2 or len(set(b)) < 2:
            continue
        worst = max(worst, abs(kendall_tau_b(a, b)[0] - kendall_pairs(a, b)))
        done += 1
    ident = list(range(40))
    exact = kendall_tau_b(ident, ident)[0] == 1.0 and kendall_tau_b(ident, ident[::-1])[0] == -1.0
    check("Kendall oracle", worst < 1e-12 and exact,
          f"500 tied rankings, max abs error {worst:.1e}; identity 1 and reverse -1 exactly: {exact}")


# -- log-normal ------------------------------------------------------------


def test_lognormal_fit():
    xs = np.random.default_rng(0).lognormal(0.5, 1.2, 10_000)
    fit = fit_lognormal(xs.tolist())
    recovered = abs(fit.mu - 0.5) <= 0.05 and abs(fit.sigma - 1.2) <= 0.05
    worst = 0.0
    for c in (1e-3, 0.5, 2.0, 7.3, 1e4):
        scaled = fit_lognormal((c * xs).tolist())
        worst = max(worst, abs(scaled.mu - fit.mu - math.log(c)), abs(scaled.sigma - fit.sigma))
    check("log-normal fit", recovered and worst < 1e-12,
          f"mu {fit.mu:.4f} (0.5 +/- 0.05), sigma {fit.sigma:.4f} (1.2 +/- 0.05); "
          f"scale-equivariance max deviation {worst:.1e}")


# -- peak alignment --------------------------------------------------------


def test_peak_alignment():
    spec = PlantSpec(date_to_day(dt.date(2016, 1, 1)), date_to_day(dt.date(2017, 12, 31)), {"a": 5.0},
                     vocab_size=30, seed=2,
                     plants=tuple(Plant(f"m{i}", Constant(0.2 + 0.3 * i)) for i in range(20))
                     + (Plant("burst", Trapezoid(date_to_day(dt.date(2017, 3, 1)), 5, 3, 9, 12.0)),))
    table = SyntheticCorpus(spec).truth.to_table()
    raw = all_daily_series(table, Window.of_table(table))
    peaks = {pid: raw_peak(s) for pid, s in raw.items() if s.values.any()}
    at_zero = all(relative_curve(raw[pid], peaks[pid], 14)[14] == 1.0 for pid in peaks)
    curves = peak_aligned(raw, peaks, 14)
    means_one = all(c.mean[14] == 1.0 for c in curves)

    # hand-built triangles: rising 1..6 then falling, and its mirror
    first = date_to_day(dt.date(2018, 1, 1))
    up = DailySeries(0, Window(first, first + 8), np.array([1, 2, 3, 4, 5, 6, 3, 2, 1], float))
    down = DailySeries(1, Window(first, first + 8), np.array([1, 2, 3, 6, 5, 4, 3, 2, 1], float))
    (tri,) = peak_aligned({0: up, 1: down}, {0: first + 5, 1: first + 3}, width=3)
    by_hand = {
        -3: [3 / 6, 1 / 6], -2: [4 / 6, 2 / 6], -1: [5 / 6, 3 / 6], 0: [1.0, 1.0],
        1: [3 / 6, 5 / 6], 2: [2 / 6, 4 / 6], 3: [1 / 6, 3 / 6],
    }
    err = max(abs(tri.mean[j] - sum(by_hand[d]) / 2) for j, d in enumerate(range(-3, 4)))
    ci_err = max(
        abs(tri.ci95[j] - 1.96 * abs(by_hand[d][0] - by_hand[d][1]) / math.sqrt(2) / math.sqrt(2))
        for j, d in enumerate(range(-3, 4))
    )
    check("peak alignment", at_zero and means_one and err < 1e-12 and ci_err < 1e-12,
          f"{len(peaks)} memes with R(0) == 1 exactly: {at_zero}; triangle curve max error {err:.1e}, "
          f"ci95 max error {ci_err:.1e}")


# -- end to end ------------------------------------------------------------


def test_end_to_end_determinism(tmp_path):
    spec = PlantSpec(date_to_day(dt.date(2013, 1, 1)), date_to_day(dt.date(2014, 6, 30)),
                     {"pics": 20.0, "funny": 10.0, "aww": 5.0, "gifs": 3.0}, vocab_size=400, background_rate=2.0,
                     growth=3.0, seed=9,
                     plants=(Plant("y tho", Proportional(0.002)),
                             Plant("do you even lift", Trapezoid(date_to_day(dt.date(2013, 4, 1)), 7, 60, 20, 6.0),
                                   {"pics": 3.0, "gifs": 1.0}),
                             Plant("na na", Constant(0.8)),
                             Plant("na na na", Trapezoid(date_to_day(dt.date(2014, 1, 10)), 3, 30, 9, 4.0))))
    corpus = SyntheticCorpus(spec)
    src = tmp_path / "corpus.jsonl"
    with open(src, "w", encoding="utf-8") as fh:
        corpus.write(fh)
    (tmp_path / "p.txt").write_text("\n".join(p.phrase for p in spec.plants) + "\n")
    outputs = []
    for run in ("a", "b"):
        cfg = cli.RunConfig(inputs=[str(src)], phrases=str(tmp_path / "p.txt"), background_sample=200,
                            min_count=5, seed=1, out=str(tmp_path / run))
        cli.cmd_scan(cfg)
        cli.cmd_metrics(cfg)
        files = sorted(p for p in (tmp_path / run).iterdir() if p.suffix in (".csv", ".json", ".mec")
                       and p.name != "scan_summary.json")
        outputs.append({p.name: p.read_bytes() for p in files})
    same = outputs[0] == outputs[1]
    n_csv = sum(name.endswith(".csv") for name in outputs[0])
    nonempty = sum(v.count(b"\n") > 1 for k, v in outputs[0].items() if k.endswith(".csv"))
    check("end-to-end determinism", same and n_csv == len(cli._EMPTY_TABLES) + 1,
          f"{n_csv} CSV tables ({nonempty} with data) plus sidecars and cache byte-identical across runs: {same}")


# -- throughput ------------------------------------------------------------

THROUGHPUT_SHARDS = 4


def test_throughput(tmp_path):
    vocab_size = 20_000
    rates = 1.0 / np.arange(1, vocab_size + 1)
    rates = rates / rates.sum() * 400_000  # ~100 tokens per document
    first = date_to_day(dt.date(2018, 1, 1))
    spec = PlantSpec(first, first + 249, {f"c{i:02d}": 202.0 for i in range(20)}, vocab_size=vocab_size,
                     word_rates=rates.tolist(), plants=tuple(Plant(p, Constant(2.0)) for p in lexicon_lines()),
                     seed=4)
    corpus = SyntheticCorpus(spec)
    src = tmp_path / "corpus.jsonl"
    with open(src, "w", encoding="utf-8") as fh:
        n = corpus.write(fh)
    del corpus
    (tmp_path / "phrases.txt").write_text("\n".join(lexicon_lines()) + "\n")
    words = spec.vocabulary
    (tmp_path / "bg.txt").write_text("\n".join(random.Random(0).sample(words, 5000)) + "\n")
    cfg = cli.RunConfig(inputs=[str(src)], phrases=str(tmp_path / "phrases.txt"), background=str(tmp_path / "bg.txt"),
                        shards=THROUGHPUT_SHARDS, out=str(tmp_path / "out"))
    summary = cli.cmd_scan(cfg)
    cores = len(os.sched_getaffinity(0))
    ok = summary["documents"] >= 1_000_000 and summary["seconds"] < 60
    check("throughput (soft)", ok,
          f"{summary['documents']} docs, {summary['tokens'] / 1e6:.0f}M tokens, 352+5000 patterns, "
          f"{THROUGHPUT_SHARDS} shards on {cores} core(s): {summary['seconds']:.1f}s (need < 60s)")
