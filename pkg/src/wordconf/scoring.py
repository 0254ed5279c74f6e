"""Per-word confidence scores for translation hypotheses.

Three scorers live here (intra-lingual MI, inter-lingual MI, n-gram
probability); the feature-tag scorer is in :mod:`wordconf.features`. All of
them return a :class:`ScoreVector` with exactly one entry per hypothesis
token. Tool words can be marked *skipped*: they keep their position (so
distances are unchanged) but carry no score.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Sequence

from .errors import AlignmentError, FormatError, ModeError

SCORED = "scored"
SKIPPED = "skipped-toolword"

NORMALIZATIONS = ("none", "l1", "linf")


@dataclass(frozen=True)
class WeightFn:
    """Distance weighting ``w(d)`` for the MI scorers.

    ``constant``: 1 everywhere. ``exponential``: ``exp(-param * d)``.
    ``window``: 1 up to distance ``param``, 0 beyond.
    """

    kind: str = "constant"
    param: float = 0.0

    def __post_init__(self):
        if self.kind == "exponential" and not self.param > 0:
            raise ValueError("exponential weighting needs a rate > 0")
        if self.kind == "window" and not self.param >= 0:
            raise ValueError("window half-width must be >= 0")
        if self.kind not in ("constant", "exponential", "window"):
            raise ValueError(f"unknown weighting {self.kind!r}")

    @classmethod
    def constant(cls):
        return cls("constant")

    @classmethod
    def exponential(cls, rate: float):
        return cls("exponential", float(rate))

    @classmethod
    def window(cls, halfwidth: int):
        return cls("window", halfwidth)

    def __call__(self, distance: int) -> float:
        if self.kind == "constant":
            return 1.0
        if self.kind == "exponential":
            return math.exp(-self.param * distance)
        return 1.0 if distance <= self.param else 0.0


@dataclass
class ScoreVector:
    scores: list
    skipped: list = field(default=None)
    degenerate: bool = False

    def __post_init__(self):
        if self.skipped is None:
            self.skipped = [False] * len(self.scores)
        if len(self.skipped) != len(self.scores):
            raise ValueError("scores and skip flags differ in length")
        self.scores = [None if skip else s for s, skip in zip(self.scores, self.skipped)]

    def __len__(self):
        return len(self.scores)

    def __iter__(self):
        return iter(self.scores)

    def __getitem__(self, i):
        return self.scores[i]

    @property
    def status(self) -> list[str]:
        return [SKIPPED if s else SCORED for s in self.skipped]

    def scored_values(self) -> list[float]:
        return [s for s, skip in zip(self.scores, self.skipped) if not skip]


def _skip_flags(tokens, toolwords, exclude_toolwords):
    if not exclude_toolwords or not toolwords:
        return [False] * len(tokens)
    return [tok in toolwords for tok in tokens]


def _weighted_average(target, target_pos, context, context_skip, triggers, weight, same_sentence):
    num = 0.0
    den = 0.0
    for j, word in enumerate(context):
        if context_skip[j] or (same_sentence and j == target_pos):
            continue
        wt = weight(abs(target_pos - j))
        if wt == 0.0:
            continue
        num += wt * triggers.get(word, target)
        den += wt
    return num / den if den > 0 else 0.0


def intra_mi_confidence(hyp: Sequence[str], triggers, weight: WeightFn = WeightFn(),
                        toolwords=frozenset(), exclude_toolwords: bool = False) -> ScoreVector:
    """Weighted average intra-lingual MI between each word and the rest of its sentence.

    ``MI(e_j, e_i)`` is read from the list of ``e_j`` and counts as 0 when
    pruned. A word with no usable context scores 0.
    """
    if triggers.mode != "intra":
        raise ModeError("intra_mi_confidence needs an intra-lingual trigger list")
    skip = _skip_flags(hyp, toolwords, exclude_toolwords)
    scores = [
        None if skip[i] else _weighted_average(word, i, hyp, skip, triggers, weight, True)
        for i, word in enumerate(hyp)
    ]
    return ScoreVector(scores, skip)


def inter_mi_confidence(src: Sequence[str], hyp: Sequence[str], triggers, weight: WeightFn = WeightFn(),
                        toolwords=frozenset(), exclude_toolwords: bool = False) -> ScoreVector:
    """Weighted average inter-lingual MI between each hypothesis word and the source words.

    The distance is the raw difference between the target and source
    positions, so a window weighting limits the allowed distortion.
    """
    if triggers.mode != "inter":
        raise ModeError("inter_mi_confidence needs an inter-lingual trigger list")
    src_skip = _skip_flags(src, toolwords, exclude_toolwords)
    hyp_skip = _skip_flags(hyp, toolwords, exclude_toolwords)
    scores = [
        None if hyp_skip[i] else _weighted_average(word, i, src, src_skip, triggers, weight, False)
        for i, word in enumerate(hyp)
    ]
    return ScoreVector(scores, hyp_skip)


def ngram_confidence(hyp: Sequence[str], model) -> ScoreVector:
    return ScoreVector([model.word_prob(w, hyp[:i]) for i, w in enumerate(hyp)])


def normalize_scores(vector: ScoreVector, kind: str = "none") -> ScoreVector:
    """Divide scored entries by their l1 or max norm.

    A zero norm leaves the scores unchanged and sets ``degenerate``.
    """
    if kind not in NORMALIZATIONS:
        raise ValueError(f"unknown normalization {kind!r}; expected one of {NORMALIZATIONS}")
    if kind == "none":
        return ScoreVector(list(vector.scores), list(vector.skipped), vector.degenerate)
    values = [abs(s) for s in vector.scored_values()]
    norm = sum(values) if kind == "l1" else max(values, default=0.0)
    if norm == 0:
        return ScoreVector(list(vector.scores), list(vector.skipped), degenerate=True)
    scores = [None if skip else s / norm for s, skip in zip(vector.scores, vector.skipped)]
    return ScoreVector(scores, list(vector.skipped))


def write_scores(path, hyps: Sequence[Sequence[str]], vectors: Sequence[ScoreVector]) -> None:
    """Write ``sentence_index<TAB>position<TAB>word<TAB>score<TAB>status`` rows (0-based indices)."""
    if len(hyps) != len(vectors):
        raise AlignmentError(f"{len(hyps)} hypotheses but {len(vectors)} score vectors")
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for s, (hyp, vec) in enumerate(zip(hyps, vectors)):
            if len(hyp) != len(vec):
                raise AlignmentError(f"sentence {s}: {len(hyp)} tokens but {len(vec)} scores")
            for i, (word, score, status) in enumerate(zip(hyp, vec.scores, vec.status)):
                value = "-" if score is None else repr(float(score))
                fh.write(f"{s}\t{i}\t{word}\t{value}\t{status}\n")


def read_scores(path) -> tuple[list[tuple[str, ...]], list[ScoreVector]]:
    rows: dict[int, list] = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.rstrip("\n").rstrip("\r")
            if not line:
                continue
            cols = line.split("\t")
            if len(cols) != 5:
                raise FormatError(f"expected 5 tab-separated columns, got {len(cols)}", path, lineno)
            try:
                s, i = int(cols[0]), int(cols[1])
            except ValueError:
                raise FormatError("non-integer sentence index or position", path, lineno) from None
            status = cols[4]
            if status not in (SCORED, SKIPPED):
                raise FormatError(f"unknown status {status!r}", path, lineno)
            if status == SKIPPED:
                score = None
            else:
                try:
                    score = float(cols[3])
                except ValueError:
                    raise FormatError(f"non-numeric score {cols[3]!r}", path, lineno) from None
            sent = rows.setdefault(s, [])
            if i != len(sent):
                raise FormatError(f"sentence {s}: expected position {len(sent)}, got {i}", path, lineno)
            sent.append((cols[2], score, status == SKIPPED))
    if sorted(rows) != list(range(len(rows))):
        raise FormatError("sentence indices are not contiguous from 0", path)
    hyps, vectors = [], []
    for s in range(len(rows)):
        hyps.append(tuple(w for w, _, _ in rows[s]))
        vectors.append(ScoreVector([sc for _, sc, _ in rows[s]], [sk for _, _, sk in rows[s]]))
    return hyps, vectors


def score_corpus(scorer, hyps: Iterable[Sequence[str]], *args, **kwargs) -> list[ScoreVector]:
    return [scorer(hyp, *args, **kwargs) for hyp in hyps]
