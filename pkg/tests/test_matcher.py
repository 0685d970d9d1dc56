import gzip
import json
import random

import pytest
from hypothesis import given, settings, strategies as st

from memecology.corpus import write_documents
from memecology.matcher import (
    build_matcher, count_vocabulary, scan_corpus, scan_document, scan_lines, scan_paths, split_inputs,
)
from memecology.matcher import _iter_range, _read_unit
from memecology.phraseset import load_phrases
from memecology.table import dump_cache
from conftest import doc, naive_counts

WORDS = ["na", "y", "u", "no", "such", "wow", "the", "cat", "lift"]


def test_nested_and_overlapping(small_phrases):
    m = build_matcher(small_phrases)
    got = dict(scan_document(m, "na na na na, such wow!"))
    # "na na" x3, "na na na" x2, "such wow" x1, "wow" x1, background "wow" x1
    ids = {p.text: p.phrase_id for p in small_phrases.phrases}
    assert got[ids["na na"]] == 3
    assert got[ids["na na na"]] == 2
    assert got[ids["such wow"]] == 1
    assert got[ids["wow"]] == 1
    assert got["wow"] == 1


def test_per_document_mode(small_phrases):
    m = build_matcher(small_phrases, "per-document")
    ids = {p.text: p.phrase_id for p in small_phrases.phrases}
    assert dict(scan_document(m, "na na na na"))[ids["na na"]] == 1


def test_scan_document_ordering(small_phrases):
    out = scan_document(build_matcher(small_phrases), "the cat wow na na")
    assert [k for k, _ in out] == sorted(k for k, _ in out if isinstance(k, int)) + sorted(
        k for k, _ in out if isinstance(k, str)
    )


def test_no_tokens_document(small_phrases):
    t = scan_corpus(build_matcher(small_phrases), [doc("!!!")])
    assert t.n_documents == 1 and not t.memes and t.tokens == 0


@settings(max_examples=60, deadline=None)
@given(
    st.lists(st.lists(st.sampled_from(WORDS[:4]), min_size=1, max_size=4), min_size=1, max_size=6),
    st.lists(st.lists(st.sampled_from(WORDS), max_size=25), max_size=8),
    st.sampled_from(["all", "per-document"]),
)
def test_matches_naive_oracle(phrases, texts, mode):
    ps = load_phrases([" ".join(p) for p in phrases]).with_background(["the", "na"])
    docs = [doc(" ".join(t), day=i % 3, community="ab"[i % 2], i=i) for i, t in enumerate(texts)]
    table = scan_corpus(build_matcher(ps, mode), docs)
    memes, bg = naive_counts(ps, docs, mode)
    assert table.memes == memes
    assert table.background == bg


def _write(tmp_path, docs, name="c.jsonl", compress=False):
    p = tmp_path / name
    with open(p, "w", encoding="utf-8") as fh:
        write_documents(docs, fh)
    if compress:
        p.write_bytes(gzip.compress(p.read_bytes()))
    return p


def _random_docs(n, seed=0):
    rng = random.Random(seed)
    return [
        doc(" ".join(rng.choice(WORDS) for _ in range(rng.randint(0, 15))), day=rng.randint(0, 40),
            community=rng.choice(["a", "b", "c"]), kind=rng.choice(["post", "comment"]), i=i)
        for i in range(n)
    ]


def test_paths_equal_memory_and_shard_invariant(tmp_path, small_phrases):
    docs = _random_docs(3000)
    m = build_matcher(small_phrases)
    mem = scan_corpus(m, docs)
    _write(tmp_path, docs[:1000], "a.jsonl")
    _write(tmp_path, docs[1000:2000], "b.jsonl.gz", compress=True)
    _write(tmp_path, docs[2000:], "c.jsonl")
    caches = {dump_cache(scan_paths(m, [tmp_path], shards=s)) for s in (1, 2, 3)}
    assert caches == {dump_cache(mem)}


def test_split_inputs_covers_file(tmp_path):
    p = _write(tmp_path, _random_docs(20000))
    units = split_inputs([p], 4)
    assert len(units) > 1
    assert units[0][1] == 0 and units[-1][2] == p.stat().st_size
    for a, b in zip(units, units[1:]):
        assert a[2] == b[1]
    lines = [line for u in units for line in _read_unit(u)]
    assert lines == p.read_bytes().splitlines(keepends=True)


@pytest.mark.parametrize("cut", [0, 1, 5, 6, 7, 13, 50])
def test_iter_range_boundaries(tmp_path, cut):
    p = tmp_path / "x"
    p.write_bytes(b"aaaaa\nbbbbbb\nc\n\ndddd\n")
    got = list(_iter_range(p, 0, cut)) + list(_iter_range(p, cut, None))
    assert got == p.read_bytes().splitlines(keepends=True)


def test_scan_lines_counts_skipped(small_phrases):
    lines = [json.dumps({"created_utc": 1, "subreddit": "a", "body": "na na"}), "{bad", ""]
    t = scan_lines(build_matcher(small_phrases), lines)
    assert t.skipped == 1 and t.n_documents == 1


def test_count_vocabulary(tmp_path):
    p = _write(tmp_path, [doc("a b a"), doc("B c")])
    assert count_vocabulary([p]) == {"a": 2, "b": 2, "c": 1}


def test_bad_count_mode(small_phrases):
    with pytest.raises(ValueError):
        build_matcher(small_phrases, "some")
