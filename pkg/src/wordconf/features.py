"""Linguistic feature tags and the feature-based confidence measure.

Each word is replaced by an atomic tag ``CLASS,TENSE,AGR`` (empty slots
written ``-``) looked up in a lexicon. Ambiguous words are resolved at random
when building a training corpus, and by exact dynamic programming under a
tag n-gram model when scoring.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from typing import Iterable, Sequence

from .errors import FormatError
from .lm import BOS, EOS, NgramModel
from .scoring import ScoreVector


@dataclass(frozen=True)
class FeatureTag:
    syntactic_class: str
    tense: str | None = None
    agreement: str | None = None

    def __str__(self):
        return ",".join(
            part if part else "-"
            for part in (self.syntactic_class, self.tense, self.agreement)
        )

    @classmethod
    def parse(cls, text: str) -> "FeatureTag":
        parts = text.strip().split(",")
        if len(parts) != 3 or not parts[0] or parts[0] == "-":
            raise ValueError(f"malformed feature tag {text!r}; expected CLASS,TENSE,AGR")
        if any(not p or any(c.isspace() for c in p) for p in parts):
            raise ValueError(f"malformed feature tag {text!r}")
        cls_, tense, agr = (None if p == "-" else p for p in parts)
        return cls(cls_, tense, agr)


UNK_TAG = FeatureTag("UNK")


class FeatureLexicon:
    """Word -> ordered, duplicate-free list of feature tags."""

    def __init__(self, entries: dict[str, list[FeatureTag]] | None = None):
        self._entries: dict[str, list[FeatureTag]] = {}
        for word, tags in (entries or {}).items():
            for tag in tags:
                self.add(word, tag)

    def add(self, word: str, tag: FeatureTag) -> None:
        tags = self._entries.setdefault(word, [])
        if tag not in tags:
            tags.append(tag)

    def lookup(self, word: str) -> list[FeatureTag]:
        return list(self._entries.get(word, (UNK_TAG,)))

    def __contains__(self, word):
        return word in self._entries

    def __len__(self):
        return len(self._entries)

    def words(self):
        return list(self._entries)


def load_lexicon(path) -> FeatureLexicon:
    lexicon = FeatureLexicon()
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.rstrip("\n").rstrip("\r")
            if not line.strip() or line.startswith("#"):
                continue
            cols = line.split("\t")
            if len(cols) != 2:
                raise FormatError("expected word<TAB>CLASS,TENSE,AGR", path, lineno)
            try:
                tag = FeatureTag.parse(cols[1])
            except ValueError as exc:
                raise FormatError(str(exc), path, lineno) from None
            lexicon.add(cols[0], tag)
    return lexicon


def tag_corpus_for_training(corpus: Iterable[Sequence[str]], lexicon: FeatureLexicon, seed: int = 0) -> list[tuple[str, ...]]:
    """Replace each word by one of its tags, drawn uniformly with a seeded generator."""
    rng = random.Random(seed)
    tagged = []
    for sentence in corpus:
        out = []
        for word in sentence:
            tags = lexicon.lookup(word)
            tag = tags[0] if len(tags) == 1 else tags[rng.randrange(len(tags))]
            out.append(str(tag))
        tagged.append(tuple(out))
    return tagged


def disambiguate(
    sentence: Sequence[str],
    lexicon: FeatureLexicon,
    tag_model: NgramModel,
    greedy: bool = False,
    end: bool = True,
) -> list[str]:
    """Most probable tag sequence for a sentence under ``tag_model``.

    Viterbi search over states made of the last ``n-1`` tags. The sentence
    probability includes the end symbol unless ``end`` is false. Among equally
    probable sequences the one earliest in lexicon order wins. With
    ``greedy=True`` each word instead takes its best tag given the tags
    already chosen.
    """
    alternatives = [[str(t) for t in lexicon.lookup(w)] for w in sentence]
    if not alternatives:
        return []
    keep = tag_model.order - 1

    def ctx(state):
        return state if keep else ()

    if greedy:
        history: list[str] = [BOS] * keep
        chosen = []
        for alts in alternatives:
            state = tuple(history[len(history) - keep:]) if keep else ()
            best = max(range(len(alts)), key=lambda j: (tag_model.logprob(alts[j], ctx(state)), -j))
            chosen.append(alts[best])
            history.append(alts[best])
        return chosen

    # state -> (score, index path); ties resolved by the smaller index path
    start = tuple([BOS] * keep)
    beam = {start: (0.0, ())}
    for alts in alternatives:
        nxt = {}
        for state, (score, path) in beam.items():
            for j, tag in enumerate(alts):
                cand = (score + tag_model.logprob(tag, ctx(state)), path + (j,))
                new_state = (state + (tag,))[1:] if keep else ()
                cur = nxt.get(new_state)
                if cur is None or cand[0] > cur[0] or (cand[0] == cur[0] and cand[1] < cur[1]):
                    nxt[new_state] = cand
        beam = nxt
    best = None
    for state, (score, path) in beam.items():
        if end:
            score = score + tag_model.logprob(EOS, ctx(state))
        if best is None or score > best[0] or (score == best[0] and path < best[1]):
            best = (score, path)
    return [alternatives[i][j] for i, j in enumerate(best[1])]


def feature_confidence(sentence: Sequence[str], lexicon: FeatureLexicon, tag_model: NgramModel, greedy: bool = False):
    """Tag-model probability of each word's tag along the disambiguated sequence."""
    tags = disambiguate(sentence, lexicon, tag_model, greedy=greedy)
    scores = [tag_model.word_prob(tag, tags[:i]) for i, tag in enumerate(tags)]
    return ScoreVector(scores)
