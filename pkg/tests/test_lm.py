import math

import pytest
from hypothesis import given, settings, strategies as st

from wordconf.errors import FormatError
from wordconf.lm import BOS, EOS, UNK, load_arpa, save_arpa, train_ngram

TOY_ARPA = """\\data\\
ngram 1=3
ngram 2=2
ngram 3=1

\\1-grams:
-0.5\ta\t-0.2
-0.6\tb\t-0.1
-0.7\tc

\\2-grams:
-0.3\ta b\t-0.4
-0.2\tb c

\\3-grams:
-0.1\ta b c

\\end\\
"""


@pytest.fixture
def toy(write):
    return load_arpa(write("toy.arpa", TOY_ARPA))


def test_unigram_with_end_padding():
    model = train_ngram([["a", "a", "a"]], 1, "add-k", 0)
    assert model.word_prob("a") == pytest.approx(0.75, rel=1e-12)


def test_unigram_two_sentences():
    model = train_ngram([["a"], ["b"]], 1, "add-k", 0)
    assert model.word_prob("a") == pytest.approx(0.25)
    assert model.word_prob("b") == pytest.approx(0.25)
    assert model.word_prob(EOS) == pytest.approx(0.5)


def test_training_errors():
    with pytest.raises(ValueError):
        train_ngram([["a"]], 0)
    with pytest.raises(ValueError):
        train_ngram([], 2)
    with pytest.raises(ValueError):
        train_ngram([["a"]], 2, "kneser-ney")


def test_stored_trigram(toy):
    assert toy.word_prob("c", ["a", "b"]) == pytest.approx(10 ** -0.1)


def test_backoff_recursion(toy):
    # P(a | a b): bow(a b) * P(a | b) = bow(a b) * bow(b) * P(a)
    #           = 10^(-0.4 - 0.1 - 0.5) = 0.1
    assert toy.word_prob("a", ["a", "b"]) == pytest.approx(0.1, rel=1e-12)
    # P(c | c b): (c b) unstored so weight 1, then stored bigram (b c)
    assert toy.word_prob("c", ["c", "b"]) == pytest.approx(10 ** -0.2)


def test_missing_backoff_defaults_to_one(toy):
    # c has no backoff weight: P(a | c) = P(a)
    assert toy.word_prob("a", ["c"]) == pytest.approx(10 ** -0.5)


def test_history_padding():
    model = train_ngram([["x", "y"], ["y", "x"]], 3, "add-k", 0)
    assert model.word_prob("x", []) == pytest.approx(0.5)
    assert model.word_prob("x", []) == model.prob("x", (BOS, BOS))
    assert model.word_prob("y", ["x"]) == model.prob("y", (BOS, "x")) == pytest.approx(1.0)


def test_unknown_words_map_to_unk():
    model = train_ngram([["a", "b"], ["a", "c"]], 2, "witten-bell")
    assert model.word_prob("zzz", ["a"]) == model.word_prob(UNK, ["a"])
    assert 0 < model.word_prob("zzz", ["qqq"]) <= 1


def test_min_count_floor():
    model = train_ngram([["a", "b"], ["a", "c"]], 1, "add-k", 0, min_count=2)
    assert "b" not in model.vocabulary
    assert model.word_prob("b") == model.word_prob(UNK) == pytest.approx(2 / 6)


def test_load_arpa_value(write):
    model = load_arpa(write("u.arpa", "\\data\\\nngram 1=1\n\n\\1-grams:\n-0.30103 a\n\n\\end\\\n"))
    assert model.word_prob("a") == pytest.approx(0.5, rel=1e-5)
    assert 10 ** model.logprob("a") == pytest.approx(10 ** -0.30103, rel=1e-9)


def test_load_arpa_count_mismatch(write):
    body = "\\data\\\nngram 1=5\n\n\\1-grams:\n-1 a\n-1 b\n-1 c\n-1 d\n\n\\end\\\n"
    with pytest.raises(FormatError, match="ngram 1=5"):
        load_arpa(write("bad.arpa", body))


@pytest.mark.parametrize("body, match", [
    ("\\data\\\nngram 1=1\n\\1-gram:\n-1 a\n\\end\\\n", "header"),
    ("\\data\\\nngram 1=1\n\\2-grams:\n-1 a b\n\\end\\\n", "not declared"),
    ("\\data\\\nngram 1=1\n\\1-grams:\n-1 a\n", "end"),
    ("\\data\\\nngram 1=1\n\\1-grams:\nx a\n\\end\\\n", "non-numeric"),
    ("ngram 1=1\n", "data"),
])
def test_load_arpa_malformed(write, body, match):
    with pytest.raises(FormatError, match=match):
        load_arpa(write("bad.arpa", body))


def _check_normalized(model, tol=1e-6):
    for ctx in model.contexts():
        total = sum(model.prob(w, ctx) for w in model.vocabulary)
        assert abs(total - 1.0) <= tol, (ctx, total)


sentences = st.lists(st.lists(st.sampled_from("abcde"), min_size=1, max_size=7), min_size=1, max_size=15)


@settings(max_examples=60, deadline=None)
@given(sentences, st.integers(1, 4), st.sampled_from(["witten-bell", "add-k"]), st.sampled_from([0.0, 0.1, 1.0]))
def test_trained_models_are_normalized(corpus, order, smoothing, k):
    _check_normalized(train_ngram(corpus, order, smoothing, k))


@settings(max_examples=30, deadline=None)
@given(sentences, st.integers(1, 4), st.sampled_from(["witten-bell", "add-k"]))
def test_smoothed_models_never_return_zero(corpus, order, smoothing):
    model = train_ngram(corpus, order, smoothing, 0.5)
    for w in list("abcdefz") + [EOS]:
        for hist in ([], ["a"], ["z", "b"], ["c", "a", "e"]):
            assert 0 < model.word_prob(w, hist) <= 1


@settings(max_examples=30, deadline=None)
@given(sentences, st.integers(1, 4), st.sampled_from(["witten-bell", "add-k"]))
def test_arpa_round_trip(tmp_path_factory, corpus, order, smoothing):
    model = train_ngram(corpus, order, smoothing, 0.5)
    path = tmp_path_factory.mktemp("arpa") / "m.arpa"
    save_arpa(model, path)
    loaded = load_arpa(path)
    assert loaded.order == model.order
    for ctx in model.contexts():
        for w in model.vocabulary:
            a, b = model.prob(w, ctx), loaded.prob(w, ctx)
            assert math.isclose(a, b, rel_tol=1e-9)


def test_sentence_logprob():
    model = train_ngram([["a", "b"]], 2, "add-k", 0)
    assert model.sentence_logprob(["a", "b"]) == pytest.approx(0.0)
