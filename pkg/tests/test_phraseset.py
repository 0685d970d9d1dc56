import logging

import pytest

from memecology.phraseset import MAX_TOKENS, PhraseLoadError, load_background, load_phrases, sample_background
from conftest import LENGTH_HISTOGRAM, lexicon_lines


def test_lexicon_length_histogram():
    ps = load_phrases(lexicon_lines())
    assert len(ps) == 352
    assert ps.length_histogram() == LENGTH_HISTOGRAM


def test_load_normalizes_and_dedups(tmp_path):
    f = tmp_path / "p.txt"
    f.write_text("# comment\nDo You Even Lift\n\ndo you even lift\ny tho\n")
    ps = load_phrases(f)
    assert [p.tokens for p in ps.phrases] == [("do", "you", "even", "lift"), ("y", "tho")]
    assert [p.phrase_id for p in ps.phrases] == [0, 1]
    assert ps.duplicates == ((4, "do you even lift"),)


def test_truncates_long_phrases(caplog):
    with caplog.at_level(logging.WARNING):
        ps = load_phrases(["a b c d e f g h i j"])
    assert len(ps.phrases[0].tokens) == MAX_TOKENS
    assert [n for n, _ in ps.truncated] == [1]
    assert "truncat" in caplog.text


def test_empty_phrase_names_line():
    with pytest.raises(PhraseLoadError, match="line 2"):
        load_phrases(["ok", "?!"])


def test_background_file(tmp_path):
    f = tmp_path / "b.txt"
    f.write_text("The\ncat\n\n")
    assert load_background(f) == frozenset({"the", "cat"})


def test_sample_background_deterministic():
    vocab = {f"w{i}": 100 + i for i in range(50)}
    vocab["rare"] = 3
    a = sample_background(vocab, 10, min_count=100, seed=4)
    assert a == sample_background(vocab, 10, min_count=100, seed=4)
    assert len(a) == 10 and "rare" not in a


def test_sample_background_short(caplog):
    with caplog.at_level(logging.WARNING):
        words = sample_background({"a": 200, "b": 5}, 10, min_count=100)
    assert set(words) == {"a"}
    with pytest.raises(ValueError):
        sample_background({}, 3)
