"""Labeled graphs and vertex/edge label dissimilarities."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Mapping, Union

import numpy as np

REAL_TOL = 1e-12


class GraphError(ValueError):
    pass


class LabelKindError(TypeError):
    """Raised when two labels of different kinds (or shapes) are compared."""

    def __init__(self, a: "LabelValue", b: "LabelValue", detail: str = ""):
        self.kinds = (label_kind(a), label_kind(b))
        msg = f"cannot compare {self.kinds[0]} label with {self.kinds[1]} label"
        if detail:
            msg += f" ({detail})"
        super().__init__(msg)


@dataclass(frozen=True)
class RealVector:
    values: tuple[float, ...]

    def __post_init__(self):
        vals = tuple(float(v) for v in self.values)
        if not all(math.isfinite(v) for v in vals):
            raise GraphError(f"non-finite entry in real vector label {vals}")
        object.__setattr__(self, "values", vals)


@dataclass(frozen=True)
class Symbol:
    token: str


@dataclass(frozen=True)
class Composite:
    parts: tuple[tuple[str, "LabelValue"], ...]

    def __post_init__(self):
        parts = tuple(self.parts.items()) if isinstance(self.parts, Mapping) else tuple(self.parts)
        names = [name for name, _ in parts]
        if len(set(names)) != len(names):
            raise GraphError(f"duplicate sub-label names in composite label: {names}")
        object.__setattr__(self, "parts", parts)

    def as_dict(self) -> dict[str, "LabelValue"]:
        return dict(self.parts)


LabelValue = Union[RealVector, Symbol, Composite]


def label_kind(label) -> str:
    if isinstance(label, RealVector):
        return "real"
    if isinstance(label, Symbol):
        return "symbol"
    if isinstance(label, Composite):
        return "composite"
    return "none" if label is None else type(label).__name__


@dataclass(frozen=True)
class LabelDissimConfig:
    """Parameters of the label dissimilarity, all in [0, 1].

    ``composite_weights`` maps sub-label names to raw weights; they are
    renormalized to sum to one (uniform when absent or all zero).
    """

    real_scale: float = 1.0
    symbol_weight: float = 1.0
    composite_weights: tuple[tuple[str, float], ...] = ()

    def __post_init__(self):
        weights = self.composite_weights
        if isinstance(weights, Mapping):
            weights = tuple(sorted(weights.items()))
        object.__setattr__(self, "composite_weights", tuple((str(k), float(v)) for k, v in weights))
        for name, value in [("real_scale", self.real_scale), ("symbol_weight", self.symbol_weight),
                            *self.composite_weights]:
            if not 0.0 <= value <= 1.0:
                raise ValueError(f"label dissimilarity parameter {name}={value} outside [0, 1]")


def label_dissimilarity(a: LabelValue, b: LabelValue, cfg: LabelDissimConfig) -> float:
    if isinstance(a, RealVector) and isinstance(b, RealVector):
        if len(a.values) != len(b.values):
            raise LabelKindError(a, b, f"dimension {len(a.values)} vs {len(b.values)}")
        dist = math.dist(a.values, b.values)
        if dist <= REAL_TOL:
            return 0.0
        return min(1.0, cfg.real_scale * dist)
    if isinstance(a, Symbol) and isinstance(b, Symbol):
        return 0.0 if a.token == b.token else cfg.symbol_weight
    if isinstance(a, Composite) and isinstance(b, Composite):
        da, db = a.as_dict(), b.as_dict()
        if set(da) != set(db):
            raise LabelKindError(a, b, f"sub-labels {sorted(da)} vs {sorted(db)}")
        names = sorted(da)
        raw = dict(cfg.composite_weights)
        w = np.array([raw.get(name, 0.0) for name in names])
        if w.sum() <= 0.0:
            w = np.ones(len(names))
        w = w / w.sum()
        return float(sum(wi * label_dissimilarity(da[n], db[n], cfg) for wi, n in zip(w, names)))
    raise LabelKindError(a, b)


def labels_equal(a, b) -> bool:
    if a is None or b is None:
        return a is b
    if label_kind(a) != label_kind(b):
        return False
    if isinstance(a, RealVector):
        return len(a.values) == len(b.values) and math.dist(a.values, b.values) <= REAL_TOL
    if isinstance(a, Composite):
        da, db = a.as_dict(), b.as_dict()
        return set(da) == set(db) and all(labels_equal(da[k], db[k]) for k in da)
    return a == b


def edge_label_dissimilarity(a, b, cfg: LabelDissimConfig) -> float:
    """Like :func:`label_dissimilarity` but tolerant of unlabeled edges."""
    if a is None and b is None:
        return 0.0
    if a is None or b is None:
        return 1.0
    return label_dissimilarity(a, b, cfg)


@dataclass(frozen=True, eq=False)
class LabeledGraph:
    """Undirected graph with labeled vertices and optionally labeled edges.

    Edges are stored as ``(u, v, label)`` with ``u < v``.
    """

    vertices: tuple[LabelValue, ...]
    edges: tuple[tuple[int, int, object], ...] = ()
    id: str = ""
    _adj: dict = field(default=None, repr=False, compare=False)

    def __post_init__(self):
        vertices = tuple(self.vertices)
        if not vertices:
            raise GraphError(f"graph {self.id!r} has no vertices")
        n = len(vertices)
        norm = {}
        for e in self.edges:
            u, v = int(e[0]), int(e[1])
            label = e[2] if len(e) > 2 else None
            if not (0 <= u < n and 0 <= v < n):
                raise GraphError(f"graph {self.id!r}: edge ({u}, {v}) references a missing vertex")
            if u == v:
                raise GraphError(f"graph {self.id!r}: self-loop on vertex {u}")
            key = (min(u, v), max(u, v))
            if key in norm:
                raise GraphError(f"graph {self.id!r}: duplicate edge {key}")
            norm[key] = label
        edges = tuple((u, v, lab) for (u, v), lab in sorted(norm.items()))
        object.__setattr__(self, "vertices", vertices)
        object.__setattr__(self, "edges", edges)
        object.__setattr__(self, "_adj", norm)

    @property
    def order(self) -> int:
        return len(self.vertices)

    @property
    def size(self) -> int:
        return len(self.edges)

    def edge_label(self, u: int, v: int):
        return self._adj[(min(u, v), max(u, v))]

    def has_edge(self, u: int, v: int) -> bool:
        return (min(u, v), max(u, v)) in self._adj

    def structurally_equal(self, other: "LabeledGraph") -> bool:
        if self.order != other.order or set(self._adj) != set(other._adj):
            return False
        if not all(labels_equal(a, b) for a, b in zip(self.vertices, other.vertices)):
            return False
        return all(labels_equal(lab, other._adj[k]) for k, lab in self._adj.items())
