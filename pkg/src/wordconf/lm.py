"""Backoff n-gram language models: training, ARPA serialization and queries.

Sentences are padded with ``n-1`` begin symbols and a single end symbol.
Probabilities are kept as log10 values, as in ARPA files; a probability of
zero is stored as ``LOG_ZERO`` so every query stays strictly positive.
"""

from __future__ import annotations

import logging
import math
import re
from collections import Counter, defaultdict
from typing import Iterable, Sequence

from .errors import FormatError

logger = logging.getLogger(__name__)

BOS = "<s>"
EOS = "</s>"
UNK = "<unk>"
LOG_ZERO = -99.0

SMOOTHING_KINDS = ("witten-bell", "add-k")


def _log10(p):
    return math.log10(p) if p > 0 else LOG_ZERO


class NgramModel:
    """A backoff model over word tuples.

    ``logprobs`` maps n-gram tuples of every order to log10 P(last | rest);
    ``backoffs`` maps context tuples to log10 backoff weights. A context
    without an entry has weight 1.
    """

    def __init__(self, order: int, logprobs: dict, backoffs: dict | None = None):
        if order < 1:
            raise ValueError("order must be >= 1")
        self.order = order
        self.logprobs = dict(logprobs)
        self.backoffs = dict(backoffs or {})
        self._unigrams = {g[0] for g in self.logprobs if len(g) == 1}
        self._has_unk = UNK in self._unigrams

    def __repr__(self):
        sizes = Counter(len(g) for g in self.logprobs)
        return f"NgramModel(order={self.order}, ngrams={dict(sorted(sizes.items()))})"

    @property
    def vocabulary(self) -> list[str]:
        """Words the model predicts (every unigram except the begin symbol)."""
        return sorted(w for w in self._unigrams if w != BOS)

    def contexts(self) -> list[tuple]:
        """All stored contexts, including the empty one."""
        ctx = {g for g in self.backoffs}
        ctx.update(g[:-1] for g in self.logprobs if len(g) > 1)
        ctx.add(())
        return sorted(ctx, key=lambda g: (len(g), g))

    def _map(self, word):
        if word in self._unigrams or not self._has_unk:
            return word
        return UNK

    def logprob(self, word: str, context: Sequence[str] = ()) -> float:
        """log10 P(word | context) with the context taken literally (no padding)."""
        w = self._map(word)
        ctx = tuple(self._map(c) for c in context)
        if self.order == 1:
            ctx = ()
        elif len(ctx) > self.order - 1:
            ctx = ctx[len(ctx) - (self.order - 1):]
        weight = 0.0
        while True:
            lp = self.logprobs.get(ctx + (w,))
            if lp is not None:
                return max(weight + lp, LOG_ZERO)
            if not ctx:
                return LOG_ZERO
            weight += self.backoffs.get(ctx, 0.0)
            ctx = ctx[1:]

    def prob(self, word: str, context: Sequence[str] = ()) -> float:
        return 10.0 ** self.logprob(word, context)

    def padded_history(self, history: Sequence[str]) -> tuple:
        need = self.order - 1
        if need == 0:
            return ()
        hist = tuple(history)[-need:] if history else ()
        return (BOS,) * (need - len(hist)) + hist

    def word_prob(self, word: str, history: Sequence[str] = ()) -> float:
        """P(word | history); histories shorter than n-1 are padded with begin symbols."""
        return self.prob(word, self.padded_history(history))

    def sentence_logprob(self, sentence: Sequence[str], end: bool = True) -> float:
        total = 0.0
        tokens = list(sentence) + ([EOS] if end else [])
        for i, w in enumerate(tokens):
            total += self.logprob(w, self.padded_history(tokens[:i]))
        return total


def _pad(sentence, order):
    return [BOS] * (order - 1) + list(sentence) + [EOS]


def train_ngram(
    corpus: Iterable[Sequence[str]],
    order: int,
    smoothing: str = "witten-bell",
    add_k: float = 1.0,
    min_count: int = 1,
) -> NgramModel:
    """Estimate a backoff model from a tokenized corpus.

    ``smoothing`` is ``"witten-bell"`` or ``"add-k"`` (with constant
    ``add_k``; ``add_k=0`` gives maximum likelihood estimates). Words seen
    fewer than ``min_count`` times are mapped to ``<unk>``.

    At every order the discounted mass of a context is handed to the next
    lower order through a backoff weight chosen so that each context's
    distribution over the vocabulary (end symbol and ``<unk>`` included)
    sums to one.
    """
    if order < 1:
        raise ValueError("order must be >= 1")
    if smoothing not in SMOOTHING_KINDS:
        raise ValueError(f"unknown smoothing {smoothing!r}; expected one of {SMOOTHING_KINDS}")
    if add_k < 0:
        raise ValueError("add_k must be non-negative")
    corpus = [list(s) for s in corpus]
    if not corpus:
        raise ValueError("cannot train a language model on an empty corpus")

    token_counts = Counter(w for s in corpus for w in s)
    known = {w for w, c in token_counts.items() if c >= min_count}
    vocab = sorted(known | {EOS, UNK})
    V = len(vocab)

    counts = defaultdict(Counter)  # order -> Counter(ngram)
    for sentence in corpus:
        padded = _pad([w if w in known else UNK for w in sentence], order)
        for i in range(order - 1, len(padded)):
            for m in range(1, order + 1):
                counts[m][tuple(padded[i - m + 1:i + 1])] += 1

    logprobs = {}
    backoffs = {}

    # unigrams: every vocabulary word is stored explicitly
    uni = counts[1]
    total = sum(uni.values())
    if smoothing == "add-k":
        denom = total + add_k * V
        for w in vocab:
            logprobs[(w,)] = _log10((uni[(w,)] + add_k) / denom)
    else:
        types = len(uni)
        for w in vocab:
            logprobs[(w,)] = _log10((uni[(w,)] + types / V) / (total + types))
    if order > 1:
        logprobs[(BOS,)] = LOG_ZERO

    for m in range(2, order + 1):
        lower = NgramModel(m - 1, logprobs, backoffs)
        by_context = defaultdict(dict)
        for gram, c in counts[m].items():
            by_context[gram[:-1]][gram[-1]] = c
        for ctx in sorted(by_context):
            seen = by_context[ctx]
            c_h = sum(seen.values())
            if smoothing == "add-k":
                denom = c_h + add_k * V
                probs = {w: (c + add_k) / denom for w, c in seen.items()}
                unseen_mass = add_k * (V - len(seen)) / denom
            else:
                denom = c_h + len(seen)
                probs = {w: c / denom for w, c in seen.items()}
                unseen_mass = len(seen) / denom
            lower_unseen = 1.0 - sum(lower.prob(w, ctx[1:]) for w in seen)
            if len(seen) >= V or lower_unseen <= 1e-12:
                # nothing left to back off to: give the whole mass to seen words
                scale = sum(probs.values())
                probs = {w: p / scale for w, p in probs.items()}
                weight = LOG_ZERO if len(seen) < V else 0.0
            elif unseen_mass <= 0:
                weight = LOG_ZERO
            else:
                weight = math.log10(unseen_mass / lower_unseen)
            for w, p in probs.items():
                logprobs[ctx + (w,)] = _log10(p)
            backoffs[ctx] = weight
            if ctx not in logprobs:
                # all-begin contexts are never predicted themselves
                logprobs[ctx] = LOG_ZERO
    return NgramModel(order, logprobs, backoffs)


def _fmt(value):
    return repr(float(value))


def save_arpa(model: NgramModel, path) -> None:
    by_order = defaultdict(list)
    for gram in model.logprobs:
        by_order[len(gram)].append(gram)
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("\n\\data\\\n")
        for m in range(1, model.order + 1):
            fh.write(f"ngram {m}={len(by_order[m])}\n")
        for m in range(1, model.order + 1):
            fh.write(f"\n\\{m}-grams:\n")
            for gram in sorted(by_order[m]):
                line = f"{_fmt(model.logprobs[gram])}\t{' '.join(gram)}"
                if m < model.order and gram in model.backoffs:
                    line += f"\t{_fmt(model.backoffs[gram])}"
                fh.write(line + "\n")
        fh.write("\n\\end\\\n")


_COUNT_RE = re.compile(r"^ngram\s+(\d+)\s*=\s*(\d+)$")
_SECTION_RE = re.compile(r"^\\(\d+)-grams:$")


def load_arpa(path) -> NgramModel:
    """Read an ARPA backoff file; missing backoff weights default to log10 weight 0."""
    declared = {}
    logprobs = {}
    backoffs = {}
    seen = Counter()
    section = None  # None before \data\, 0 inside \data\, m inside \m-grams:
    done = False
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, 1):
            line = raw.strip()
            if not line or done:
                continue
            if line == "\\data\\":
                section = 0
                continue
            if line == "\\end\\":
                done = True
                continue
            if section is None:
                continue  # free text before \data\ is allowed
            header = _SECTION_RE.match(line)
            if header:
                m = int(header.group(1))
                if m not in declared:
                    raise FormatError(f"section \\{m}-grams: not declared in \\data\\", path, lineno)
                section = m
                continue
            if line.startswith("\\"):
                raise FormatError(f"malformed section header {line!r}", path, lineno)
            if section == 0:
                match = _COUNT_RE.match(line)
                if not match:
                    raise FormatError(f"malformed count line {line!r}", path, lineno)
                declared[int(match.group(1))] = int(match.group(2))
                continue
            fields = line.split()
            m = section
            if len(fields) not in (m + 1, m + 2):
                raise FormatError(f"expected {m + 1} or {m + 2} fields in a {m}-gram line", path, lineno)
            try:
                lp = float(fields[0])
                bow = float(fields[m + 1]) if len(fields) == m + 2 else None
            except ValueError:
                raise FormatError(f"non-numeric value in {line!r}", path, lineno) from None
            gram = tuple(fields[1:m + 1])
            logprobs[gram] = lp
            if bow is not None:
                backoffs[gram] = bow
            seen[m] += 1
    if section is None:
        raise FormatError("missing \\data\\ header", path)
    if not done:
        raise FormatError("missing \\end\\ marker", path)
    if not declared:
        raise FormatError("no ngram counts declared", path)
    for m, n in declared.items():
        if seen[m] != n:
            raise FormatError(f"declared ngram {m}={n} but found {seen[m]} entries", path)
    return NgramModel(max(declared), logprobs, backoffs)
