"""Greedy three-weight edit scheme (TWEC) dissimilarity between labeled graphs.

Vertices of the first graph are visited in index order and each is assigned
to the still-free vertex of the second graph with the smallest label
dissimilarity (lowest index on ties). Edge operations follow from the vertex
assignment. The symmetric measure adds both directed costs, each
normalized by its own worst case, and lives in [0, 2].
"""

from __future__ import annotations

from dataclasses import astuple, dataclass

import numba
import numpy as np

from .graph import (
    REAL_TOL,
    LabelDissimConfig,
    LabeledGraph,
    RealVector,
    Symbol,
    edge_label_dissimilarity,
    label_dissimilarity,
)


@dataclass(frozen=True)
class TwecWeights:
    w_sub_v: float = 1.0
    w_ins_v: float = 1.0
    w_del_v: float = 1.0
    w_sub_e: float = 1.0
    w_ins_e: float = 1.0
    w_del_e: float = 1.0

    def __post_init__(self):
        for name, value in zip(self.__dataclass_fields__, astuple(self)):
            if not 0.0 <= value <= 1.0:
                raise ValueError(f"TWEC weight {name}={value} outside [0, 1]")


def _vertex_view(g: LabeledGraph):
    """Numeric view of the vertex labels: ("real", coords), ("symbol", tokens) or None."""
    view = g.__dict__.get("_vertex_view")
    if view is None:
        labels = g.vertices
        if all(isinstance(v, RealVector) for v in labels) and len({len(v.values) for v in labels}) == 1:
            view = ("real", np.array([v.values for v in labels], dtype=float))
        elif all(isinstance(v, Symbol) for v in labels):
            view = ("symbol", np.array([v.token for v in labels], dtype=object))
        else:
            view = ("generic", None)
        object.__setattr__(g, "_vertex_view", view)
    return view


def vertex_cost_matrix(g1: LabeledGraph, g2: LabeledGraph, cfg: LabelDissimConfig) -> np.ndarray:
    """Label dissimilarity between every vertex of ``g1`` and every vertex of ``g2``."""
    kind1, arr1 = _vertex_view(g1)
    kind2, arr2 = _vertex_view(g2)
    if kind1 == kind2 == "real" and arr1.shape[1] == arr2.shape[1]:
        diff = arr1[:, None, :] - arr2[None, :, :]
        dist = np.sqrt(np.einsum("ijk,ijk->ij", diff, diff))
        cost = np.minimum(1.0, cfg.real_scale * dist)
        cost[dist <= REAL_TOL] = 0.0
        return cost
    if kind1 == kind2 == "symbol":
        return np.where(arr1[:, None] == arr2[None, :], 0.0, cfg.symbol_weight)
    return np.array([[label_dissimilarity(a, b, cfg) for b in g2.vertices] for a in g1.vertices],
                    dtype=float).reshape(g1.order, g2.order)


def greedy_assignment(cost: np.ndarray) -> list[int]:
    """Best-matching-first assignment; -1 marks an unmatched row."""
    n1, n2 = cost.shape
    work = cost.astype(float, copy=True)
    match = [-1] * n1
    for i in range(min(n1, n2)):
        j = int(np.argmin(work[i]))
        match[i] = j
        work[:, j] = np.inf
    return match


def _directed(g1, g2, cost, w: TwecWeights, cfg) -> tuple[float, float]:
    """Raw directed cost and its worst-case value."""
    n1, n2 = cost.shape
    match = greedy_assignment(cost)
    matched = min(n1, n2)
    raw = w.w_sub_v * float(sum(cost[i, match[i]] for i in range(matched)))
    raw += w.w_del_v * (n1 - matched) + w.w_ins_v * (n2 - matched)

    covered = 0
    for a, b, lab in g1.edges:
        ia, ib = match[a], match[b]
        if ia >= 0 and ib >= 0 and g2.has_edge(ia, ib):
            covered += 1
            raw += w.w_sub_e * edge_label_dissimilarity(lab, g2.edge_label(ia, ib), cfg)
        else:
            raw += w.w_del_e
    raw += w.w_ins_e * (g2.size - covered)

    worst = (w.w_sub_v * matched + w.w_del_v * (n1 - matched) + w.w_ins_v * (n2 - matched)
             + max(w.w_sub_e, w.w_del_e) * g1.size + w.w_ins_e * g2.size)
    return raw, worst


def twec_directed(g1: LabeledGraph, g2: LabeledGraph, w: TwecWeights, cfg: LabelDissimConfig) -> float:
    """Raw (unnormalized) edit cost of transforming ``g1`` into ``g2``."""
    return _directed(g1, g2, vertex_cost_matrix(g1, g2, cfg), w, cfg)[0]


def twec_reference(g1: LabeledGraph, g2: LabeledGraph, w: TwecWeights, cfg: LabelDissimConfig) -> float:
    """Label-generic implementation of :func:`twec`."""
    if g1 is g2:
        return 0.0
    cost = vertex_cost_matrix(g1, g2, cfg)
    total = 0.0
    for a, b, c in ((g1, g2, cost), (g2, g1, cost.T)):
        raw, worst = _directed(a, b, c, w, cfg)
        if worst > 0.0:
            total += min(1.0, raw / worst)
    # mean of the two directions, rescaled to [0, 2]
    return total


# -- compiled path for real/symbol vertex labels and unlabeled/symbol edges ------

_SYMBOLS: dict[str, int] = {}


def _code(token: str) -> int:
    return _SYMBOLS.setdefault(token, len(_SYMBOLS) + 1)


def _packed(g: LabeledGraph):
    """(kind, vertex array, edge-code matrix) or None when labels need the generic path.

    Edge codes: -1 no edge, 0 unlabeled edge, >0 interned symbol.
    """
    packed = g.__dict__.get("_packed", False)
    if packed is not False:
        return packed
    kind, arr = _vertex_view(g)
    packed = None
    if kind != "generic" and all(lab is None or isinstance(lab, Symbol) for _, _, lab in g.edges):
        if kind == "symbol":
            arr = np.array([[_code(t)] for t in arr], dtype=np.float64)
        codes = np.full((g.order, g.order), -1, dtype=np.int64)
        for u, v, lab in g.edges:
            codes[u, v] = codes[v, u] = 0 if lab is None else _code(lab.token)
        packed = (kind, np.ascontiguousarray(arr, dtype=np.float64), codes)
    object.__setattr__(g, "_packed", packed)
    return packed


@numba.njit(cache=True)
def _edge_ld(a, b, symbol_weight):
    if a == b:
        return 0.0
    if a == 0 or b == 0:
        return 1.0
    return symbol_weight


@numba.njit(cache=True)
def _directed_kernel(cost, A, B, w, symbol_weight):
    n1, n2 = cost.shape
    m = min(n1, n2)
    used = np.zeros(n2, dtype=np.bool_)
    match = np.full(n1, -1, dtype=np.int64)
    sub = 0.0
    for i in range(m):
        best = -1
        bv = np.inf
        for j in range(n2):
            if not used[j] and cost[i, j] < bv:
                bv = cost[i, j]
                best = j
        match[i] = best
        used[best] = True
        sub += bv
    raw = w[0] * sub
    raw += w[2] * (n1 - m) + w[1] * (n2 - m)
    e1 = 0
    covered = 0
    for a in range(n1):
        for b in range(a + 1, n1):
            if A[a, b] < 0:
                continue
            e1 += 1
            ia = match[a]
            ib = match[b]
            if ia >= 0 and ib >= 0 and B[ia, ib] >= 0:
                covered += 1
                raw += w[3] * _edge_ld(A[a, b], B[ia, ib], symbol_weight)
            else:
                raw += w[5]
    e2 = 0
    for a in range(n2):
        for b in range(a + 1, n2):
            if B[a, b] >= 0:
                e2 += 1
    raw += w[4] * (e2 - covered)
    worst = (w[0] * m + w[2] * (n1 - m) + w[1] * (n2 - m)
             + max(w[3], w[5]) * e1 + w[4] * e2)
    if worst > 0.0:
        return min(1.0, raw / worst)
    return 0.0


@numba.njit(cache=True)
def _twec_kernel(x1, x2, A, B, is_real, w, scale, symbol_weight, tol):
    n1 = x1.shape[0]
    n2 = x2.shape[0]
    cost = np.empty((n1, n2))
    for i in range(n1):
        for j in range(n2):
            if is_real:
                acc = 0.0
                for k in range(x1.shape[1]):
                    d = x1[i, k] - x2[j, k]
                    acc += d * d
                dist = np.sqrt(acc)
                if dist <= tol:
                    cost[i, j] = 0.0
                else:
                    cost[i, j] = min(1.0, scale * dist)
            else:
                cost[i, j] = 0.0 if x1[i, 0] == x2[j, 0] else symbol_weight
    return (_directed_kernel(cost, A, B, w, symbol_weight)
            + _directed_kernel(cost.T.copy(), B, A, w, symbol_weight))


def twec(g1: LabeledGraph, g2: LabeledGraph, w: TwecWeights, cfg: LabelDissimConfig) -> float:
    """Symmetric normalized TWEC dissimilarity in [0, 2]."""
    if g1 is g2:
        return 0.0
    p1, p2 = _packed(g1), _packed(g2)
    if p1 is None or p2 is None or p1[0] != p2[0] or p1[1].shape[1] != p2[1].shape[1]:
        return twec_reference(g1, g2, w, cfg)
    weights = w.__dict__.get("_array")
    if weights is None:
        weights = np.array(astuple(w), dtype=np.float64)
        object.__setattr__(w, "_array", weights)
    return float(_twec_kernel(p1[1], p2[1], p1[2], p2[2], p1[0] == "real", weights,
                              cfg.real_scale, cfg.symbol_weight, REAL_TOL))
