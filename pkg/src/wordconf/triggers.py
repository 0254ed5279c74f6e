"""Sentence-level co-occurrence counts, smoothed mutual information and trigger lists.

Counts are presence based: a word seen twice in one sentence counts once.
In ``intra`` mode both words come from the same sentence; in ``inter`` mode
the left word comes from a source sentence and the right word from its
aligned target sentence.

The mutual information of a pair is ``p(x,y) * log2(p(x,y) / (p(x) p(y)))``.
Smoothing first adds ``C`` to the raw joint count, then interpolates the
joint probability towards the independence product with weight ``alpha``;
the marginals are left untouched.
"""

from __future__ import annotations

import itertools
from collections import Counter, defaultdict
from dataclasses import dataclass, field
from typing import Iterable

import numpy as np

from .corpus import Bitext
from .errors import FormatError, ModeError

MODES = ("intra", "inter")


@dataclass(frozen=True)
class SmoothingParams:
    C: int = 0
    alpha: float = 0.0

    def __post_init__(self):
        if self.C < 0 or int(self.C) != self.C:
            raise ValueError(f"C must be a non-negative integer, got {self.C!r}")
        if self.alpha < 0:
            raise ValueError(f"alpha must be non-negative, got {self.alpha!r}")


NO_SMOOTHING = SmoothingParams()


@dataclass
class CooccurrenceCounts:
    """Presence counts over N sentences (or sentence pairs).

    ``joint[x][y]`` holds N(x, y). In intra mode the table is stored in both
    orientations and ``right`` is the same object as ``left``.
    """

    mode: str
    N: int = 0
    left: Counter = field(default_factory=Counter)
    right: Counter = field(default_factory=Counter)
    joint: dict = field(default_factory=lambda: defaultdict(Counter))

    def __post_init__(self):
        if self.mode not in MODES:
            raise ModeError(f"unknown mode {self.mode!r}")
        if self.mode == "intra":
            self.right = self.left

    def pair_count(self, x: str, y: str) -> int:
        row = self.joint.get(x)
        return row.get(y, 0) if row else 0

    def merge(self, other: "CooccurrenceCounts") -> "CooccurrenceCounts":
        """Component-wise sum, used to combine counts from corpus shards."""
        if other.mode != self.mode:
            raise ModeError(f"cannot merge {self.mode} counts with {other.mode} counts")
        out = CooccurrenceCounts(self.mode, self.N + other.N)
        out.left.update(self.left)
        out.left.update(other.left)
        if self.mode == "inter":
            out.right.update(self.right)
            out.right.update(other.right)
        for table in (self.joint, other.joint):
            for x, row in table.items():
                out.joint[x].update(row)
        return out

    __add__ = merge


def _filter(tokens: Iterable[str], toolwords, exclude_toolwords: bool) -> set[str]:
    types = set(tokens)
    if exclude_toolwords and toolwords:
        types -= set(toolwords)
    return types


def count_cooccurrences(data, mode: str, toolwords=frozenset(), exclude_toolwords: bool = False) -> CooccurrenceCounts:
    """Count N, the marginals and the joint table over a corpus or a bitext.

    ``data`` is a list of sentences in intra mode and a :class:`Bitext` in
    inter mode. Excluded tool words appear in no marginal or joint count, but
    every sentence still contributes to N.
    """
    if mode not in MODES:
        raise ModeError(f"unknown mode {mode!r}")
    is_bitext = isinstance(data, Bitext)
    if mode == "inter" and not is_bitext:
        raise ModeError("inter mode requires a bitext")
    if mode == "intra" and is_bitext:
        raise ModeError("intra mode requires a monolingual corpus")

    counts = CooccurrenceCounts(mode)
    joint = counts.joint
    if mode == "intra":
        for sentence in data:
            counts.N += 1
            types = sorted(_filter(sentence, toolwords, exclude_toolwords))
            counts.left.update(types)
            for x, y in itertools.combinations(types, 2):
                joint[x][y] += 1
                joint[y][x] += 1
    else:
        for src, tgt in data:
            counts.N += 1
            src_types = _filter(src, toolwords, exclude_toolwords)
            tgt_types = _filter(tgt, toolwords, exclude_toolwords)
            counts.left.update(src_types)
            counts.right.update(tgt_types)
            for x in src_types:
                row = joint[x]
                for y in tgt_types:
                    row[y] += 1
    return counts


def _smoothed_mi(nxy, nx, ny, N, C, alpha):
    """Vectorised core shared by the scalar and per-row code paths."""
    nxy = np.asarray(nxy, dtype=np.float64)
    px = nx / N
    py = np.asarray(ny, dtype=np.float64) / N
    pxy = (nxy + C) / N
    indep = px * py
    if alpha:
        pxy = (pxy + alpha * indep) / (1.0 + alpha)
    with np.errstate(divide="ignore", invalid="ignore"):
        mi = pxy * np.log2(pxy / indep)
    return np.where(pxy > 0, mi, 0.0)


def mutual_information(counts: CooccurrenceCounts, x: str, y: str, smoothing: SmoothingParams = NO_SMOOTHING) -> float:
    if counts.N <= 0:
        raise ValueError("mutual information is undefined on an empty count table")
    nx = counts.left.get(x, 0)
    ny = counts.right.get(y, 0)
    if nx == 0:
        raise KeyError(x)
    if ny == 0:
        raise KeyError(y)
    return float(_smoothed_mi(counts.pair_count(x, y), nx, ny, counts.N, smoothing.C, smoothing.alpha))


@dataclass
class TriggerList:
    """Top-k triggered words per word, each list in descending MI order."""

    mode: str
    entries: dict[str, list[tuple[str, float]]]
    normalized: bool = False

    def __post_init__(self):
        if self.mode not in MODES:
            raise ModeError(f"unknown mode {self.mode!r}")
        self._index = None

    def __eq__(self, other):
        if not isinstance(other, TriggerList):
            return NotImplemented
        return (self.mode, self.normalized, self.entries) == (other.mode, other.normalized, other.entries)

    def get(self, x: str, y: str) -> float:
        """MI value of ``y`` in the list of ``x``, 0 when the pair was pruned."""
        if self._index is None:
            self._index = {w: dict(lst) for w, lst in self.entries.items()}
        row = self._index.get(x)
        if not row:
            return 0.0
        return row.get(y, 0.0)

    def __len__(self):
        return sum(len(lst) for lst in self.entries.values())


def _rank(candidates, k):
    # descending MI, ties by triggered word
    ranked = sorted(candidates, key=lambda item: (-item[1], item[0]))
    return [(y, mi) for y, mi in ranked[:k]]


def build_trigger_list(counts: CooccurrenceCounts, smoothing: SmoothingParams = NO_SMOOTHING, k: int = 100) -> TriggerList:
    """Keep, for every left word, the ``k`` partners with the highest positive MI."""
    if k < 1:
        raise ValueError("k must be >= 1")
    if counts.N <= 0 or not counts.left:
        raise ValueError("cannot build a trigger list from empty counts")
    N, C, alpha = counts.N, smoothing.C, smoothing.alpha
    intra = counts.mode == "intra"
    entries = {}

    if C == 0:
        # unobserved pairs have p(x,y) <= alpha/(1+alpha) p(x)p(y), hence MI <= 0
        for x in sorted(counts.left):
            row = counts.joint.get(x) or {}
            ys = [y for y in row if not (intra and y == x)]
            if ys:
                mi = _smoothed_mi([row[y] for y in ys], counts.left[x],
                                  [counts.right[y] for y in ys], N, C, alpha)
                cands = [(y, float(v)) for y, v in zip(ys, mi) if v > 0]
            else:
                cands = []
            entries[x] = _rank(cands, k)
    else:
        right_words = sorted(counts.right)
        right_n = np.array([counts.right[y] for y in right_words], dtype=np.float64)
        for x in sorted(counts.left):
            row = counts.joint.get(x) or {}
            nxy = np.array([row.get(y, 0) for y in right_words], dtype=np.float64)
            mi = _smoothed_mi(nxy, counts.left[x], right_n, N, C, alpha)
            cands = [(y, float(v)) for y, v in zip(right_words, mi)
                     if v > 0 and not (intra and y == x)]
            entries[x] = _rank(cands, k)
    return TriggerList(counts.mode, entries, normalized=False)


def normalize_trigger_list(triggers: TriggerList) -> TriggerList:
    """Divide every MI by the maximum MI in its per-word list."""
    entries = {}
    for x, lst in triggers.entries.items():
        if not lst:
            entries[x] = []
            continue
        top = max(mi for _, mi in lst)
        if top <= 0:
            raise ValueError(f"trigger list of {x!r} has non-positive maximum MI")
        entries[x] = [(y, mi / top) for y, mi in lst]
    return TriggerList(triggers.mode, entries, normalized=True)


def save_trigger_list(triggers: TriggerList, path) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(f"#mode={triggers.mode} normalized={int(triggers.normalized)}\n")
        for x in sorted(triggers.entries):
            for y, mi in triggers.entries[x]:
                fh.write(f"{x}\t{y}\t{mi!r}\n")


def _parse_header(line, path):
    fields = dict(item.partition("=")[::2] for item in line[1:].split())
    mode = fields.get("mode", "intra")
    if mode not in MODES:
        raise FormatError(f"unknown mode {mode!r} in header", path, 1)
    norm = fields.get("normalized", "0")
    if norm not in ("0", "1"):
        raise FormatError(f"bad normalized flag {norm!r} in header", path, 1)
    return mode, norm == "1"


def load_trigger_list(path) -> TriggerList:
    """Read a trigger-list TSV.

    The ``#mode=... normalized=...`` header is optional; without it the list
    is taken as an unnormalized intra-lingual list.
    """
    mode, normalized = "intra", False
    entries: dict[str, list[tuple[str, float]]] = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.rstrip("\n").rstrip("\r")
            if not line:
                continue
            if line.startswith("#"):
                if lineno == 1:
                    mode, normalized = _parse_header(line, path)
                continue
            cols = line.split("\t")
            if len(cols) != 3:
                raise FormatError(f"expected 3 tab-separated columns, got {len(cols)}", path, lineno)
            x, y, value = cols
            try:
                mi = float(value)
            except ValueError:
                raise FormatError(f"non-numeric MI value {value!r}", path, lineno) from None
            entries.setdefault(x, []).append((y, mi))
    return TriggerList(mode, entries, normalized)

