"""k-NN decision rule in the dissimilarity space."""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from typing import Sequence

import numpy as np


class DimensionMismatchError(ValueError):
    pass


@dataclass(frozen=True)
class EmbeddedTrainingSet:
    vectors: np.ndarray
    labels: tuple[str, ...]

    def __post_init__(self):
        vectors = np.asarray(self.vectors, dtype=float)
        if vectors.ndim != 2:
            raise ValueError("embedding vectors must form a 2-D array")
        if len(vectors) != len(self.labels):
            raise ValueError(f"{len(vectors)} vectors but {len(self.labels)} labels")
        object.__setattr__(self, "vectors", vectors)
        object.__setattr__(self, "labels", tuple(self.labels))

    @property
    def dim(self) -> int:
        return self.vectors.shape[1]


def _vote(order: np.ndarray, labels: Sequence[str], k: int) -> str:
    nearest = [labels[i] for i in order[:k]]
    counts = Counter(nearest)
    top = max(counts.values())
    tied = {c for c, v in counts.items() if v == top}
    # vote ties go to the class of the closest neighbour among the tied classes
    return next(c for c in nearest if c in tied)


def knn_classify_many(train: EmbeddedTrainingSet, queries, k: int = 1) -> list[str]:
    Q = np.asarray(queries, dtype=float)
    if Q.ndim == 1:
        Q = Q[None, :]
    if Q.shape[1] != train.dim:
        raise DimensionMismatchError(f"query dimension {Q.shape[1]} != embedding dimension {train.dim}")
    if not 1 <= k <= len(train.labels):
        raise ValueError(f"k={k} must lie in [1, {len(train.labels)}]")
    out = []
    for q in Q:
        d = np.sqrt(((train.vectors - q) ** 2).sum(axis=1))
        order = np.argsort(d, kind="stable")
        out.append(_vote(order, train.labels, k))
    return out


def knn_classify(train: EmbeddedTrainingSet, query, k: int = 1) -> str:
    """Majority label among the ``k`` Euclidean-nearest training vectors.

    Distance ties are resolved by the lower training index.
    """
    return knn_classify_many(train, [query], k)[0]


@dataclass(frozen=True)
class Evaluation:
    accuracy: float
    confusion: dict[tuple[str, str], int]
    predictions: tuple[str, ...]

    @property
    def total(self) -> int:
        return sum(self.confusion.values())


def score_predictions(truth: Sequence[str], predicted: Sequence[str]) -> Evaluation:
    if not truth:
        raise ValueError("cannot evaluate an empty split")
    confusion = Counter(zip(truth, predicted))
    correct = sum(v for (t, p), v in confusion.items() if t == p)
    return Evaluation(correct / len(truth), dict(sorted(confusion.items())), tuple(predicted))


def evaluate(model, split) -> Evaluation:
    """Embed ``split`` against the model's prototypes and classify it."""
    split = list(split)
    if not split:
        raise ValueError("cannot evaluate an empty split")
    predicted = model.predict([g for g, _ in split])
    return score_predictions([c for _, c in split], predicted)
