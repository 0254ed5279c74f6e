"""Linear fusion of several confidence measures, trained with a perceptron."""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import AlignmentError, FormatError
from .scoring import ScoreVector

logger = logging.getLogger(__name__)


@dataclass
class WeightVector:
    """One weight per measure followed by the bias."""

    weights: np.ndarray
    names: tuple[str, ...]
    epochs: int | None = None
    training_error: float | None = None
    averaged: bool = True

    def __post_init__(self):
        self.weights = np.asarray(self.weights, dtype=np.float64)
        self.names = tuple(self.names)
        if self.weights.shape != (len(self.names) + 1,):
            raise ValueError(
                f"{len(self.weights)} weights do not match {len(self.names)} measures plus bias"
            )

    @property
    def dim(self) -> int:
        return len(self.names)


def _as_rows(rows) -> np.ndarray:
    try:
        X = np.asarray(rows, dtype=np.float64)
    except ValueError:
        raise ValueError("feature rows have different dimensions") from None
    if X.ndim != 2:
        raise ValueError("feature rows have different dimensions")
    return X


def _augment(X):
    return np.hstack([X, np.ones((X.shape[0], 1))])


def _error_rate(w, Xb, y):
    pred = np.where(Xb @ w > 0, 1, -1)
    return float(np.mean(pred != y))


def train_perceptron(
    rows,
    labels: Sequence[bool],
    epochs: int = 100,
    rate: float = 0.1,
    seed: int = 0,
    averaged: bool = True,
    names: Sequence[str] | None = None,
) -> WeightVector:
    """Fit fusion weights with the perceptron rule ``w += rate * y * x``.

    ``labels`` are True for correct words. Rows are visited in a fresh
    seeded random order every epoch and training stops after the first
    epoch without a mistake. With ``averaged`` the running average of the
    weight vector over every visit is returned, unless it misclassifies
    more training rows than the final weights do.
    """
    X = _as_rows(rows)
    if X.shape[0] == 0:
        raise ValueError("cannot train on an empty dataset")
    y = np.where(np.asarray(labels, dtype=bool), 1, -1)
    if y.shape[0] != X.shape[0]:
        raise AlignmentError(f"{X.shape[0]} rows but {y.shape[0]} labels")
    if rate <= 0:
        raise ValueError("learning rate must be positive")
    if names is None:
        names = [f"m{i}" for i in range(X.shape[1])]
    if len(names) != X.shape[1]:
        raise ValueError(f"{len(names)} measure names for {X.shape[1]} columns")
    if len(set(y.tolist())) < 2:
        logger.warning("training data holds a single class")

    Xb = _augment(X)
    rng = np.random.default_rng(seed)
    w = np.zeros(Xb.shape[1])
    total = np.zeros_like(w)
    visits = 0
    epoch = 0
    for epoch in range(1, epochs + 1):
        mistakes = 0
        for i in rng.permutation(Xb.shape[0]):
            if y[i] * (w @ Xb[i]) <= 0:
                w = w + rate * y[i] * Xb[i]
                mistakes += 1
            total += w
            visits += 1
        if mistakes == 0:
            break

    final_err = _error_rate(w, Xb, y)
    chosen, err = w, final_err
    if averaged and visits:
        avg = total / visits
        avg_err = _error_rate(avg, Xb, y)
        if avg_err <= final_err:
            chosen, err = avg, avg_err
    return WeightVector(chosen, names, epochs=epoch, training_error=err, averaged=averaged)


def combined_confidence(rows, weights: WeightVector) -> np.ndarray:
    """Affine scores ``w . row + bias``, one per row."""
    X = _as_rows(rows)
    if X.shape[1] != weights.dim:
        raise ValueError(f"rows have {X.shape[1]} measures, weights expect {weights.dim}")
    return _augment(X) @ weights.weights


def feature_rows(per_measure: Sequence[Sequence[ScoreVector]]):
    """Stack aligned per-measure score vectors into rows.

    Returns the row matrix, the per-row skip mask (a word skipped by any
    measure is skipped) and the sentence lengths. Skipped entries get 0 in
    the matrix.
    """
    if not per_measure:
        raise ValueError("no measures given")
    n_sent = len(per_measure[0])
    for m, vectors in enumerate(per_measure):
        if len(vectors) != n_sent:
            raise AlignmentError(f"measure {m} covers {len(vectors)} sentences, expected {n_sent}")
    rows, skipped, lengths = [], [], []
    for s in range(n_sent):
        vecs = [vectors[s] for vectors in per_measure]
        length = len(vecs[0])
        if any(len(v) != length for v in vecs):
            raise AlignmentError(f"sentence {s}: measures disagree on the number of tokens")
        lengths.append(length)
        for i in range(length):
            skip = any(v.skipped[i] for v in vecs)
            skipped.append(skip)
            rows.append([0.0 if skip else v.scores[i] for v in vecs])
    X = np.asarray(rows, dtype=np.float64).reshape(len(rows), len(per_measure))
    return X, np.asarray(skipped, dtype=bool), lengths


def combine_vectors(per_measure: Sequence[Sequence[ScoreVector]], weights: WeightVector) -> list[ScoreVector]:
    """Fused score vectors, sentence by sentence."""
    X, skipped, lengths = feature_rows(per_measure)
    fused = combined_confidence(X, weights)
    out, start = [], 0
    for length in lengths:
        sl = slice(start, start + length)
        out.append(ScoreVector(fused[sl].tolist(), skipped[sl].tolist()))
        start += length
    return out


def save_weights(weights: WeightVector, path) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("\t".join(weights.names + ("bias",)) + "\n")
        fh.write("\t".join(repr(float(v)) for v in weights.weights) + "\n")


def load_weights(path) -> WeightVector:
    with open(path, encoding="utf-8") as fh:
        lines = [line.rstrip("\n") for line in fh if line.strip()]
    if len(lines) != 2:
        raise FormatError(f"expected a header and one weight line, got {len(lines)} lines", path)
    names = lines[0].split("\t")
    if names[-1] != "bias":
        raise FormatError("header must end with 'bias'", path, 1)
    try:
        values = [float(v) for v in lines[1].split("\t")]
    except ValueError:
        raise FormatError("non-numeric weight", path, 2) from None
    if len(values) != len(names):
        raise FormatError(f"{len(values)} weights for {len(names)} header columns", path, 2)
    return WeightVector(values, names[:-1])
