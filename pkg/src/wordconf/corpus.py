"""Loading of pre-tokenized corpora, bitexts, vocabularies and tool-word lists.

Input files hold one sentence per line with whitespace-separated tokens.
Nothing is lowercased, normalized or re-tokenized: counts downstream are
taken over the exact token strings found in the file.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from typing import Iterable, Iterator, Sequence

from .errors import AlignmentError, FormatError

Sentence = tuple[str, ...]
Corpus = list[Sentence]


def _read_lines(path) -> Iterator[tuple[int, str]]:
    with open(path, "rb") as fh:
        data = fh.read()
    try:
        text = data.decode("utf-8")
    except UnicodeDecodeError as exc:
        raise FormatError(f"invalid UTF-8 at byte {exc.start}", path) from exc
    lines = text.split("\n")
    if lines and lines[-1] == "":
        lines.pop()
    for lineno, line in enumerate(lines, 1):
        yield lineno, line.rstrip("\r")


def parse_sentences(lines: Iterable[str], skip_empty: bool = False, path=None) -> Corpus:
    corpus = []
    for lineno, line in enumerate(lines, 1):
        tokens = tuple(line.split())
        if not tokens:
            if skip_empty:
                continue
            raise FormatError("empty sentence", path, lineno)
        corpus.append(tokens)
    return corpus


def load_monolingual(path, skip_empty: bool = False) -> Corpus:
    """Read a corpus file, one sentence per line.

    Empty lines raise :class:`FormatError` unless ``skip_empty`` is set, in
    which case they are dropped.
    """
    return parse_sentences((line for _, line in _read_lines(path)), skip_empty, path)


def save_monolingual(corpus: Iterable[Sequence[str]], path) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for sentence in corpus:
            fh.write(" ".join(sentence) + "\n")


@dataclass(frozen=True)
class Bitext:
    pairs: tuple[tuple[Sentence, Sentence], ...]

    def __len__(self):
        return len(self.pairs)

    def __iter__(self):
        return iter(self.pairs)

    @property
    def source(self) -> Corpus:
        return [src for src, _ in self.pairs]

    @property
    def target(self) -> Corpus:
        return [tgt for _, tgt in self.pairs]

    @classmethod
    def from_sides(cls, source: Sequence[Sequence[str]], target: Sequence[Sequence[str]]) -> "Bitext":
        if len(source) != len(target):
            raise AlignmentError(
                f"line count mismatch: {len(source)} source vs {len(target)} target"
            )
        return cls(tuple((tuple(s), tuple(t)) for s, t in zip(source, target)))


def load_bitext(src_path, tgt_path) -> Bitext:
    """Pair line i of the source file with line i of the target file."""
    source = load_monolingual(src_path)
    target = load_monolingual(tgt_path)
    return Bitext.from_sides(source, target)


class Vocabulary:
    """Dense word <-> id mapping with per-word sentence frequencies.

    Ids are assigned by descending frequency, then lexicographically, so the
    mapping does not depend on corpus order.
    """

    def __init__(self, freqs: dict[str, int]):
        self._words = sorted(freqs, key=lambda w: (-freqs[w], w))
        self._ids = {w: i for i, w in enumerate(self._words)}
        self._freqs = dict(freqs)

    def __len__(self):
        return len(self._words)

    def __contains__(self, word):
        return word in self._ids

    def __iter__(self):
        return iter(self._words)

    def id(self, word: str) -> int:
        return self._ids[word]

    def word(self, idx: int) -> str:
        return self._words[idx]

    def freq(self, word: str) -> int:
        return self._freqs[word]

    @property
    def freqs(self) -> dict[str, int]:
        return dict(self._freqs)


def sentence_frequencies(corpus: Iterable[Sequence[str]]) -> Counter:
    freqs = Counter()
    for sentence in corpus:
        freqs.update(set(sentence))
    return freqs


def build_vocabulary(corpus: Iterable[Sequence[str]], min_sentence_freq: int = 1) -> Vocabulary:
    if min_sentence_freq < 1:
        raise ValueError("min_sentence_freq must be >= 1")
    freqs = sentence_frequencies(corpus)
    return Vocabulary({w: n for w, n in freqs.items() if n >= min_sentence_freq})


def load_toolwords(path) -> frozenset[str]:
    words = set()
    for _, line in _read_lines(path):
        word = line.strip()
        if word:
            words.add(word)
    return frozenset(words)
