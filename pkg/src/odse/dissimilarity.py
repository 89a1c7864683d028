"""Dissimilarity matrix: samples (rows) against prototypes (columns)."""

from __future__ import annotations

import csv
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .graph import LabelDissimConfig, LabeledGraph
from .twec import TwecWeights, twec

EXTENT = 2.0


@dataclass(frozen=True)
class DissimilarityMatrix:
    values: np.ndarray
    row_ids: tuple[str, ...]
    col_ids: tuple[str, ...]

    def __post_init__(self):
        values = np.ascontiguousarray(self.values, dtype=np.float64)
        if values.ndim != 2:
            raise ValueError("dissimilarity matrix must be two-dimensional")
        if values.shape != (len(self.row_ids), len(self.col_ids)):
            raise ValueError(f"shape {values.shape} does not match "
                             f"{len(self.row_ids)} row ids x {len(self.col_ids)} column ids")
        values.setflags(write=False)
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "row_ids", tuple(self.row_ids))
        object.__setattr__(self, "col_ids", tuple(self.col_ids))

    @property
    def shape(self) -> tuple[int, int]:
        return self.values.shape

    def to_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            out = csv.writer(fh)
            out.writerow(["id", *self.col_ids])
            for rid, row in zip(self.row_ids, self.values):
                out.writerow([rid, *(repr(float(v)) for v in row)])


class TwecCache:
    """Memoizes symmetric TWEC values for one (weights, label config) setting."""

    def __init__(self, w: TwecWeights, cfg: LabelDissimConfig):
        self.w = w
        self.cfg = cfg
        self._store: dict[tuple[int, int], float] = {}
        self._keep: dict[int, LabeledGraph] = {}

    def __call__(self, a: LabeledGraph, b: LabeledGraph) -> float:
        if a is b:
            return 0.0
        ia, ib = id(a), id(b)
        key = (ia, ib) if ia < ib else (ib, ia)
        value = self._store.get(key)
        if value is None:
            value = twec(a, b, self.w, self.cfg)
            self._store[key] = value
            # hold references so ids are never recycled while cached
            self._keep[ia] = a
            self._keep[ib] = b
        return value

    def __len__(self):
        return len(self._store)


def build_dm(samples: Sequence[LabeledGraph], prototypes, w: TwecWeights,
             cfg: LabelDissimConfig, cache: TwecCache | None = None) -> DissimilarityMatrix:
    protos = list(getattr(prototypes, "graphs", prototypes))
    samples = list(samples)
    if not samples or not protos:
        raise ValueError("build_dm needs at least one sample and one prototype")
    dist = cache if cache is not None else TwecCache(w, cfg)
    values = np.empty((len(samples), len(protos)))
    for i, g in enumerate(samples):
        for j, r in enumerate(protos):
            values[i, j] = dist(g, r)
    return DissimilarityMatrix(values, tuple(g.id for g in samples), tuple(r.id for r in protos))


def filter_columns(D: DissimilarityMatrix, subset: Sequence[int]) -> DissimilarityMatrix:
    idx = [int(j) for j in subset]
    if len(set(idx)) != len(idx):
        raise ValueError(f"duplicate column indices in {idx}")
    bad = [j for j in idx if not 0 <= j < D.shape[1]]
    if bad:
        raise IndexError(f"column indices {bad} out of range for {D.shape[1]} columns")
    return DissimilarityMatrix(D.values[:, idx], D.row_ids, tuple(D.col_ids[j] for j in idx))


def column(D: DissimilarityMatrix, j: int) -> np.ndarray:
    if not 0 <= j < D.shape[1]:
        raise IndexError(f"column {j} out of range")
    return D.values[:, j].copy()


def row_embedding(D: DissimilarityMatrix, i: int) -> np.ndarray:
    if not 0 <= i < D.shape[0]:
        raise IndexError(f"row {i} out of range")
    return D.values[i].copy()
