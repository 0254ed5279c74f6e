"""Acceptance suite: one test per criterion, each with its runtime budget.

Results are summarised as PASS/FAIL lines at the end of the pytest run.
"""

import itertools
import math
import random
import time
from contextlib import contextmanager
from fractions import Fraction

import numpy as np
from hypothesis import given, settings, strategies as st

from oracles import brute_disambiguate, brute_inter_mi, brute_intra_mi
from pipeline import toy_pipeline, tree_bytes
from wordconf.corpus import Bitext
from wordconf.evaluation import ConfusionCounts, crr_at_car, f_measure, metrics, read_report, roc_sweep
from wordconf.features import FeatureLexicon, FeatureTag, disambiguate
from wordconf.fusion import train_perceptron
from wordconf.lm import BOS, load_arpa, save_arpa, train_ngram
from wordconf.scoring import ScoreVector, WeightFn, intra_mi_confidence, ngram_confidence
from wordconf.triggers import SmoothingParams, build_trigger_list, count_cooccurrences, mutual_information


@contextmanager
def budget(seconds):
    start = time.perf_counter()
    yield
    elapsed = time.perf_counter() - start
    assert elapsed < seconds, f"took {elapsed:.2f} s, budget {seconds} s"


def test_criterion_1_desk_scale_substitute():
    # Results tied to the original translation system and its hand-annotated
    # output cannot be rerun here; criteria 2-10 stand in for them.
    assert True


# (CAR, CRR, published F)
PUBLISHED = {
    "inter-mi": (0.620, 0.724, 0.668),
    "4-gram": (0.619, 0.653, 0.636),
    "linguistic": (0.578, 0.574, 0.576),
    "combined": (0.759, 0.663, 0.708),
    # printed as 0.700, which the harmonic mean of its own rates does not give
    "intra-mi": (0.600, 0.760, 0.671),
}


def test_criterion_2_f_measure_parity():
    with budget(1.0):
        for name, (car, crr, f) in PUBLISHED.items():
            assert abs(f_measure(car, crr) - f) <= 1e-3, name
            counts = ConfusionCounts(CA=round(car * 1000), FR=1000 - round(car * 1000),
                                     CR=round(crr * 1000), FA=1000 - round(crr * 1000))
            assert abs(metrics(counts).F - f) <= 1e-3, name
        assert abs(f_measure(0.600, 0.760) - 0.700) > 0.02


def test_criterion_3_mi_oracle():
    rng = random.Random(3)
    with budget(5.0):
        for trial in range(100):
            vocab = [f"w{i}" for i in range(rng.randint(2, 30))]
            n = rng.randint(1, 50)
            sm = SmoothingParams(rng.choice([0, 1, 2]), rng.choice([0.0, 0.5, 1.0]))
            if trial % 2:
                corpus = [tuple(rng.choices(vocab, k=rng.randint(1, 10))) for _ in range(n)]
                counts = count_cooccurrences(corpus, "intra")
                words = sorted({w for s in corpus for w in s})
                for x, y in itertools.permutations(words, 2):
                    got = mutual_information(counts, x, y, sm)
                    assert abs(got - brute_intra_mi(corpus, x, y, sm.C, sm.alpha)) <= 1e-12
            else:
                pairs = [(tuple(rng.choices(vocab, k=rng.randint(1, 8))),
                          tuple(rng.choices(vocab, k=rng.randint(1, 8)))) for _ in range(n)]
                counts = count_cooccurrences(Bitext(pairs), "inter")
                xs = sorted({w for s, _ in pairs for w in s})
                ys = sorted({w for _, t in pairs for w in t})
                for x, y in itertools.product(xs, ys):
                    got = mutual_information(counts, x, y, sm)
                    assert abs(got - brute_inter_mi(pairs, x, y, sm.C, sm.alpha)) <= 1e-12


def test_criterion_4_dictionary_recovery():
    rng = random.Random(4)
    src_words = [f"s{i:02d}" for i in range(50)]
    dictionary = {s: f"t{s[1:]}" for s in src_words}
    with budget(5.0):
        pairs = []
        for _ in range(1000):
            sent = rng.choices(src_words, k=rng.randint(3, 8))
            pairs.append((tuple(sent), tuple(dictionary[w] for w in sent)))
        triggers = build_trigger_list(count_cooccurrences(Bitext(pairs), "inter"), k=1)
        recovered = sum(triggers.entries[s][0][0] == dictionary[s] for s in src_words)
    assert recovered == 50


def _bigram_world(rng, V=100, fanout=5):
    vocab = [f"w{i}" for i in range(V)]
    succ = {}
    for w in [BOS] + vocab:
        nxt = rng.choice(V, size=fanout, replace=False)
        succ[w] = (nxt, rng.dirichlet(np.ones(fanout)))
    return vocab, succ


def _generate(rng, vocab, succ, n, stop=0.15, max_len=20):
    out = []
    for _ in range(n):
        prev, sent = BOS, []
        while len(sent) < 2 or (rng.random() > stop and len(sent) < max_len):
            idx, p = succ[prev]
            prev = vocab[idx[rng.choice(len(idx), p=p)]]
            sent.append(prev)
        out.append(tuple(sent))
    return out


def _corrupt(rng, corpus, vocab, rate=0.2):
    positions = [(s, i) for s, sent in enumerate(corpus) for i in range(len(sent))]
    chosen = rng.choice(len(positions), size=round(rate * len(positions)), replace=False)
    hyps = [list(s) for s in corpus]
    labels = [[True] * len(s) for s in corpus]
    for k in chosen:
        s, i = positions[k]
        choices = [w for w in vocab if w != hyps[s][i]]
        hyps[s][i] = choices[rng.integers(len(choices))]
        labels[s][i] = False
    return [tuple(h) for h in hyps], labels


def test_criterion_5_injected_errors():
    rng = np.random.default_rng(5)
    with budget(60.0):
        vocab, succ = _bigram_world(rng)
        train = _generate(rng, vocab, succ, 2000)
        hyps, labels = _corrupt(rng, _generate(rng, vocab, succ, 2000), vocab)

        model = train_ngram(train, 2)
        ngram = [ngram_confidence(h, model) for h in hyps]
        ngram_crr = crr_at_car(roc_sweep(ngram, labels, "quantile", 201), 0.5)

        triggers = build_trigger_list(count_cooccurrences(train, "intra"), k=100)
        intra = [intra_mi_confidence(h, triggers, WeightFn.constant()) for h in hyps]
        intra_crr = crr_at_car(roc_sweep(intra, labels, "quantile", 201), 0.5)
    assert ngram_crr >= 0.60, ngram_crr
    assert intra_crr >= 0.55, intra_crr


@settings(max_examples=1000, deadline=None)
@given(
    st.lists(st.tuples(st.floats(-1e3, 1e3, allow_nan=False), st.booleans()), min_size=1, max_size=80),
    st.sampled_from(["grid", "quantile"]),
    st.integers(2, 60),
)
def test_criterion_6_roc_properties(data, strategy, steps):
    scores = ScoreVector([s for s, _ in data])
    labels = [g for _, g in data]
    pts = roc_sweep([scores], [labels], strategy, steps, lo=-1e3, hi=1e3)
    nc = sum(labels)
    ni = len(labels) - nc
    assert pts[0].CAR == 1.0 and pts[-1].CRR == 1.0
    if ni:
        assert pts[0].CRR == 0.0
    if nc:
        assert pts[-1].CAR == 0.0
    for a, b in zip(pts, pts[1:]):
        assert b.CAR <= a.CAR and b.CRR >= a.CRR
    for p in pts:
        c = p.counts
        assert c.total == len(labels)
        car = Fraction(c.CA, nc) if nc else Fraction(1)
        crr = Fraction(c.CR, ni) if ni else Fraction(1)
        cer = Fraction(c.FR + c.FA, c.total)
        assert cer * c.total == (1 - car) * nc + (1 - crr) * ni
        assert (p.CAR, p.CRR, p.CER) == (float(car), float(crr), float(cer))


def _toy_corpora(seed, count):
    rng = random.Random(seed)
    for _ in range(count):
        vocab = [f"w{i}" for i in range(rng.randint(2, 12))]
        yield [rng.choices(vocab, k=rng.randint(1, 9)) for _ in range(rng.randint(1, 30))]


def test_criterion_7_lm_soundness(tmp_path):
    path = tmp_path / "m.arpa"
    for corpus, (order, kind, min_count) in zip(
        _toy_corpora(7, 24),
        itertools.cycle(itertools.product((1, 2, 3, 4), ("witten-bell", "add-k"), (1, 2))),
    ):
        model = train_ngram(corpus, order, kind, 0.5, min_count)
        vocab = model.vocabulary
        for ctx in model.contexts():
            total = sum(model.prob(w, ctx) for w in vocab)
            assert abs(total - 1.0) <= 1e-6, (order, kind, ctx, total)
        save_arpa(model, path)
        loaded = load_arpa(path)
        for ctx in list(model.contexts()) + [()]:
            for w in vocab:
                a, b = model.prob(w, ctx), loaded.prob(w, ctx)
                assert math.isclose(a, b, rel_tol=1e-9), (ctx, w)


def _random_tag_model(rng, tags, order):
    corpus = [[rng.choice(tags) for _ in range(rng.randint(1, 6))] for _ in range(rng.randint(3, 25))]
    return train_ngram(corpus, order, rng.choice(["witten-bell", "add-k"]), 0.3)


def test_criterion_8_dp_optimality():
    rng = random.Random(8)
    pool = [str(FeatureTag(c, t, a)) for c in ("N", "V", "A") for t in (None, "ip") for a in (None, "3S")]
    for _ in range(200):
        tags = rng.sample(pool, rng.randint(2, 6))
        model = _random_tag_model(rng, tags, rng.choice([2, 3, 4]))
        lexicon = FeatureLexicon()
        words = [f"x{i}" for i in range(6)]
        for w in words:
            for t in rng.sample(tags, rng.randint(1, min(3, len(tags)))):
                lexicon.add(w, FeatureTag.parse(t))
        sentence = [rng.choice(words) for _ in range(rng.randint(1, 6))]
        alternatives = [[str(t) for t in lexicon.lookup(w)] for w in sentence]
        assert disambiguate(sentence, lexicon, model) == brute_disambiguate(alternatives, model)


def _separable(seed, n, m, margin=0.1):
    rng = np.random.default_rng(seed)
    w = rng.normal(size=m)
    w /= np.linalg.norm(w)
    b = -w @ rng.uniform(0.3, 0.7, size=m)
    rows, labels = [], []
    while len(rows) < n:
        x = rng.uniform(0, 1, size=m)
        if abs(w @ x + b) >= margin:
            rows.append(x)
            labels.append(bool(w @ x + b > 0))
    return np.array(rows), labels


def test_criterion_9_perceptron():
    for seed in range(20):
        rows, labels = _separable(seed, n=50 + 150 * (seed % 2), m=1 + seed % 4)
        first = train_perceptron(rows, labels, epochs=100, seed=seed)
        assert first.training_error == 0.0 and first.epochs <= 100
        assert (((rows @ first.weights[:-1]) + first.weights[-1] > 0) == np.array(labels)).all()
        again = train_perceptron(rows, labels, epochs=100, seed=seed)
        assert first.weights.tobytes() == again.weights.tobytes()


def test_criterion_10_end_to_end(tmp_path):
    with budget(30.0):
        a = toy_pipeline(tmp_path / "a")
        toy_pipeline(tmp_path / "b")
    assert len(read_report(a["report"])) >= 50
    for p in [*a["scores"], a["weights"], a["fused"], a["report"]]:
        assert p.with_name(p.name + ".config").exists()
    first, second = tree_bytes(tmp_path / "a"), tree_bytes(tmp_path / "b")
    assert first.keys() == second.keys()
    assert all(first[k] == second[k] for k in first if not k.endswith(".config"))
