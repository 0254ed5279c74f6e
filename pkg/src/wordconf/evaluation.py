"""Thresholded correct/incorrect classification and its evaluation.

A word is accepted (classified correct) when its score is strictly above the
threshold. Rates follow the usual confidence-estimation conventions:

* CAR: accepted correct words / correct words
* CRR: rejected incorrect words / incorrect words
* CER: misclassified words / all words
* F: harmonic mean of CAR and CRR
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import AlignmentError, FormatError
from .scoring import ScoreVector

TOOLWORD_POLICIES = ("exclude", "count")
STRATEGIES = ("grid", "quantile")


@dataclass(frozen=True)
class ConfusionCounts:
    CA: int = 0  # correct, accepted
    FR: int = 0  # correct, rejected
    CR: int = 0  # incorrect, rejected
    FA: int = 0  # incorrect, accepted

    @property
    def n_correct(self):
        return self.CA + self.FR

    @property
    def n_incorrect(self):
        return self.CR + self.FA

    @property
    def total(self):
        return self.CA + self.FR + self.CR + self.FA

    def __add__(self, other):
        return ConfusionCounts(self.CA + other.CA, self.FR + other.FR,
                               self.CR + other.CR, self.FA + other.FA)


@dataclass(frozen=True)
class Metrics:
    CER: float
    CAR: float
    CRR: float
    F: float


@dataclass(frozen=True)
class RocPoint:
    threshold: float
    CAR: float
    CRR: float
    CER: float
    F: float
    counts: ConfusionCounts


def classify(scores, threshold: float) -> list:
    """True (correct) iff score > threshold; skipped entries get None."""
    if isinstance(scores, ScoreVector):
        return [None if skip else s > threshold for s, skip in zip(scores.scores, scores.skipped)]
    return [None if s is None else s > threshold for s in scores]


def confusion(pred: Sequence, ref: Sequence[bool], toolword_policy: str = "exclude") -> ConfusionCounts:
    """Tally predictions against gold labels (True = correct).

    Unlabeled predictions (None) are dropped under ``exclude`` and counted
    as rejections under ``count``.
    """
    if toolword_policy not in TOOLWORD_POLICIES:
        raise ValueError(f"unknown tool-word policy {toolword_policy!r}")
    if len(pred) != len(ref):
        raise AlignmentError(f"{len(pred)} predictions but {len(ref)} reference labels")
    ca = fr = cr = fa = 0
    for p, gold in zip(pred, ref):
        if p is None:
            if toolword_policy == "exclude":
                continue
            p = False
        if gold:
            if p:
                ca += 1
            else:
                fr += 1
        elif p:
            fa += 1
        else:
            cr += 1
    return ConfusionCounts(ca, fr, cr, fa)


def f_measure(car: float, crr: float) -> float:
    if car + crr == 0:
        return 0.0
    return 2.0 * car * crr / (car + crr)


def metrics(counts: ConfusionCounts) -> Metrics:
    if counts.total == 0:
        raise ValueError("no labeled words to evaluate")
    car = counts.CA / counts.n_correct if counts.n_correct else 1.0
    crr = counts.CR / counts.n_incorrect if counts.n_incorrect else 1.0
    cer = (counts.FR + counts.FA) / counts.total
    return Metrics(cer, car, crr, f_measure(car, crr))


def _flatten(vectors: Sequence[ScoreVector], ref: Sequence[Sequence[bool]], toolword_policy: str):
    check_alignment([len(v) for v in vectors], ref)
    scores, labels = [], []
    for vec, gold in zip(vectors, ref):
        for s, skip, g in zip(vec.scores, vec.skipped, gold):
            if skip:
                if toolword_policy == "exclude":
                    continue
                s = -np.inf
            scores.append(s)
            labels.append(bool(g))
    return np.asarray(scores, dtype=np.float64), np.asarray(labels, dtype=bool)


def sweep_thresholds(scores: np.ndarray, strategy: str = "quantile", steps: int = 101,
                     lo: float = 0.0, hi: float = 1.0) -> np.ndarray:
    """Ascending thresholds including one below and one at/above every score."""
    if strategy not in STRATEGIES:
        raise ValueError(f"unknown sweep strategy {strategy!r}; expected one of {STRATEGIES}")
    if steps < 2:
        raise ValueError("a sweep needs at least 2 steps")
    finite = scores[np.isfinite(scores)]
    if finite.size:
        smin, smax = float(finite.min()), float(finite.max())
    else:
        smin, smax = lo, hi
    if strategy == "grid":
        inner = np.linspace(lo, hi, steps)
    else:
        inner = np.quantile(finite, np.linspace(0.0, 1.0, steps)) if finite.size else np.linspace(lo, hi, steps)
    below = np.nextafter(smin, -np.inf)
    return np.sort(np.concatenate([[below], inner, [smax]]), kind="stable")


def roc_sweep(vectors: Sequence[ScoreVector], ref: Sequence[Sequence[bool]], strategy: str = "quantile",
              steps: int = 101, lo: float = 0.0, hi: float = 1.0,
              toolword_policy: str = "exclude") -> list[RocPoint]:
    """Evaluate the classifier at every threshold of a sweep, ascending."""
    if toolword_policy not in TOOLWORD_POLICIES:
        raise ValueError(f"unknown tool-word policy {toolword_policy!r}")
    scores, labels = _flatten(vectors, ref, toolword_policy)
    if scores.size == 0:
        raise ValueError("no labeled words to evaluate")
    thresholds = sweep_thresholds(scores, strategy, steps, lo, hi)
    good = np.sort(scores[labels])
    bad = np.sort(scores[~labels])
    points = []
    for t in thresholds:
        rejected_good = int(np.searchsorted(good, t, side="right"))
        rejected_bad = int(np.searchsorted(bad, t, side="right"))
        counts = ConfusionCounts(
            CA=good.size - rejected_good, FR=rejected_good,
            CR=rejected_bad, FA=bad.size - rejected_bad,
        )
        m = metrics(counts)
        points.append(RocPoint(float(t), m.CAR, m.CRR, m.CER, m.F, counts))
    return points


def crr_at_car(points: Sequence[RocPoint], car: float) -> float:
    """CRR at a given CAR, linearly interpolated along the sweep.

    When several curve segments reach ``car`` the best CRR is returned.
    """
    best = None
    for a, b in zip(points, points[1:]):
        lo_car, hi_car = sorted((a.CAR, b.CAR))
        if not lo_car <= car <= hi_car:
            continue
        if a.CAR == b.CAR:
            value = max(a.CRR, b.CRR)
        else:
            frac = (car - a.CAR) / (b.CAR - a.CAR)
            value = a.CRR + frac * (b.CRR - a.CRR)
        best = value if best is None else max(best, value)
    if best is None:
        raise ValueError(f"CAR {car} is outside the swept range")
    return best


def best_points(points: Sequence[RocPoint]) -> tuple[RocPoint, RocPoint]:
    """Max-F and min-CER operating points; ties go to the lowest threshold."""
    if not points:
        raise ValueError("empty sweep")
    best_f = points[0]
    best_cer = points[0]
    for p in points[1:]:
        if p.F > best_f.F:
            best_f = p
        if p.CER < best_cer.CER:
            best_cer = p
    return best_f, best_cer


def _point_fields(p: RocPoint):
    return (p.threshold, p.CAR, p.CRR, p.CER, p.F)


def emit_report(points: Sequence[RocPoint], path) -> dict:
    """Write the sweep as TSV followed by best-F and min-CER summary comment lines."""
    best_f, best_cer = best_points(points)
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("threshold\tCAR\tCRR\tCER\tF\n")
        for p in points:
            fh.write("\t".join(repr(float(v)) for v in _point_fields(p)) + "\n")
        for name, p in (("best-F", best_f), ("min-CER", best_cer)):
            fh.write(f"# {name}\t" + format_point(p) + "\n")
    return {"best-F": best_f, "min-CER": best_cer}


def format_point(p: RocPoint) -> str:
    return "\t".join(f"{k}={v!r}" for k, v in zip(("threshold", "CAR", "CRR", "CER", "F"),
                                                    map(float, _point_fields(p))))


def read_report(path) -> list[tuple[float, float, float, float, float]]:
    rows = []
    with open(path, encoding="utf-8") as fh:
        header = fh.readline().rstrip("\n").split("\t")
        if header != ["threshold", "CAR", "CRR", "CER", "F"]:
            raise FormatError("unexpected report header", path, 1)
        for lineno, line in enumerate(fh, 2):
            if line.startswith("#") or not line.strip():
                continue
            try:
                rows.append(tuple(float(v) for v in line.rstrip("\n").split("\t")))
            except ValueError:
                raise FormatError("non-numeric report row", path, lineno) from None
    return rows


def load_labels(path) -> list[list[bool]]:
    """One line per hypothesis sentence, ``1`` (correct) or ``0`` (incorrect) per token."""
    labels = []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            toks = line.split()
            if any(t not in ("0", "1") for t in toks):
                raise FormatError("labels must be 0 or 1", path, lineno)
            labels.append([t == "1" for t in toks])
    return labels


def save_labels(labels: Sequence[Sequence[bool]], path) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for sent in labels:
            fh.write(" ".join("1" if g else "0" for g in sent) + "\n")


def check_alignment(lengths: Sequence[int], ref: Sequence[Sequence[bool]]) -> None:
    if len(lengths) != len(ref):
        raise AlignmentError(f"{len(lengths)} scored sentences but {len(ref)} label lines")
    for s, (n, gold) in enumerate(zip(lengths, ref)):
        if n != len(gold):
            raise AlignmentError(f"sentence {s}: {n} tokens but {len(gold)} labels")
