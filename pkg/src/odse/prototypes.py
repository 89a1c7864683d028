"""Representation-set lifecycle: initialization, compression and expansion."""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .dissimilarity import DissimilarityMatrix, TwecCache, column
from .entropy import (
    MIN_MST_DIM,
    DimensionTooSmallError,
    EntropyConfigError,
    QreConfig,
    alpha_of_gamma,
    beta_approx,
    qre_scalar,
    sigma_upper_bound,
)
from .graph import LabeledGraph

log = logging.getLogger(__name__)

Metric = Callable[[np.ndarray, np.ndarray], float]


@dataclass(frozen=True)
class PrototypeSet:
    graphs: tuple[LabeledGraph, ...]
    origin_indices: tuple[int, ...]

    def __post_init__(self):
        graphs, origin = tuple(self.graphs), tuple(int(i) for i in self.origin_indices)
        if not graphs:
            raise ValueError("a prototype set cannot be empty")
        if len(graphs) != len(origin):
            raise ValueError("one origin index per prototype graph is required")
        if len(set(origin)) != len(origin):
            raise ValueError(f"duplicate origin indices in prototype set: {origin}")
        object.__setattr__(self, "graphs", graphs)
        object.__setattr__(self, "origin_indices", origin)

    def __len__(self):
        return len(self.graphs)

    def __iter__(self):
        return iter(self.graphs)

    def subset(self, positions: Sequence[int]) -> "PrototypeSet":
        return PrototypeSet(tuple(self.graphs[p] for p in positions),
                            tuple(self.origin_indices[p] for p in positions))


@dataclass
class Cluster:
    members: list[int] = field(default_factory=list)
    representative: int = -1


@dataclass
class Partition:
    clusters: list[Cluster]

    def __len__(self):
        return len(self.clusters)

    def representatives(self) -> list[int]:
        return [c.representative for c in self.clusters]


# -- initialization ----------------------------------------------------------

def random_init(train: Sequence[tuple[LabeledGraph, str]], p: float, seed) -> PrototypeSet:
    """Keep each training graph independently with probability ``p``."""
    if not train:
        raise ValueError("empty training set")
    if not 0.0 < p <= 1.0:
        raise ValueError(f"selection probability {p} outside (0, 1]")
    rng = np.random.default_rng(seed)
    keep = np.flatnonzero(rng.random(len(train)) < p)
    if keep.size == 0:
        keep = np.array([rng.integers(len(train))])
    return PrototypeSet(tuple(train[i][0] for i in keep), tuple(int(i) for i in keep))


def _mode_seek_class(dist: np.ndarray, s: int) -> list[int]:
    size = dist.shape[0]
    if size == 1:
        return [0]
    # neighbours sorted by (distance, index), self excluded
    order = [sorted((j for j in range(size) if j != i), key=lambda j, i=i: (dist[i, j], j))
             for i in range(size)]
    if size < s + 1:
        s_eff = size - 1
        radius = [dist[i, order[i][s_eff - 1]] for i in range(size)]
        return [int(np.argmin(radius))]
    radius = [dist[i, order[i][s - 1]] for i in range(size)]
    return [i for i in range(size) if all(radius[i] <= radius[y] for y in order[i][:s])]


def mode_seek(train: Sequence[tuple[LabeledGraph, str]], s: int, w=None, cfg=None,
              dist: Callable | None = None) -> PrototypeSet:
    """Per-class modes: objects whose s-NN radius is no larger than their neighbours'."""
    if s < 1:
        raise ValueError(f"neighbourhood size must be >= 1, got {s}")
    dist = dist if dist is not None else TwecCache(w, cfg)
    by_class: dict[str, list[int]] = {}
    for idx, (_, label) in enumerate(train):
        by_class.setdefault(label, []).append(idx)
    chosen = []
    for label, idx in by_class.items():
        graphs = [train[i][0] for i in idx]
        m = np.zeros((len(idx), len(idx)))
        for a in range(len(idx)):
            for b in range(a + 1, len(idx)):
                m[a, b] = m[b, a] = dist(graphs[a], graphs[b])
        chosen.extend(idx[i] for i in _mode_seek_class(m, s))
    chosen.sort()
    return PrototypeSet(tuple(train[i][0] for i in chosen), tuple(chosen))


# -- clustering radius ---------------------------------------------------------

def theta_qre(tau_c: float, sigma_c: float, n: int) -> float:
    if not 0.0 < sigma_c <= sigma_upper_bound():
        raise EntropyConfigError(f"kernel size {sigma_c} outside (0, {sigma_upper_bound():.6f}]")
    if not 0.0 <= tau_c <= 1.0:
        raise ValueError(f"compression threshold {tau_c} outside [0, 1]")
    return math.sqrt(tau_c * n * sigma_c ** 2 * math.log(2.0) / 2.0)


def c_factor(k: int, alpha: float, tau_c: float, gamma: float) -> float:
    """Cluster-size factor of the MST radius; decreasing in ``k`` for alpha < 1."""
    if k < 2:
        raise ValueError("cluster-size factor is defined for k >= 2")
    return (k ** alpha / (k - 1)) ** ((1.0 - tau_c) / gamma)


def theta_mst(tau_c: float, gamma: float, n: int, k_max: int) -> float:
    """Radius keeping any BSAS cluster of at most ``k_max`` columns below ``tau_c``."""
    if n < MIN_MST_DIM:
        raise DimensionTooSmallError(f"training size {n} below {MIN_MST_DIM}: beta is not usable")
    if not 0.0 <= tau_c <= 1.0:
        raise ValueError(f"compression threshold {tau_c} outside [0, 1]")
    alpha = alpha_of_gamma(gamma, n)
    beta = beta_approx(gamma, n)
    c = c_factor(max(k_max, 2), alpha, tau_c, gamma)
    return 2.0 ** (tau_c - 1.0) * n ** (tau_c / 2.0) * beta ** ((1.0 - tau_c) / gamma) * c


# -- BSAS and MinSOD -----------------------------------------------------------

def _euclid(a, b) -> float:
    return float(np.linalg.norm(np.asarray(a, dtype=float) - np.asarray(b, dtype=float)))


def minsod(members, metric: Metric | None = None) -> int:
    """Index of the member minimizing the summed distance to all members.

    Ties go to the member that comes last (the most recently inserted).
    """
    pts = list(members)
    if not pts:
        raise ValueError("MinSOD of an empty cluster")
    metric = metric or _euclid
    sods = [sum(metric(a, b) for b in pts) for a in pts]
    best = min(sods)
    return max(i for i, v in enumerate(sods) if v == best)


def bsas(sequence, theta: float, Q: int, metric: Metric | None = None) -> Partition:
    """Basic sequential clustering with MinSOD representatives.

    An element opens a new cluster when its nearest representative is farther
    than ``theta`` and fewer than ``Q`` clusters exist; otherwise it joins the
    nearest one (lowest cluster index on ties) and the representative is
    recomputed.
    """
    if theta < 0:
        raise ValueError("theta must be non-negative")
    if Q < 1:
        raise ValueError("Q must be at least 1")
    items = list(sequence) if metric is not None else None
    if metric is None:
        X = np.asarray(sequence, dtype=float)
        if X.size == 0:
            return Partition([])
        if X.ndim == 1:
            X = X[:, None]
    elif not items:
        return Partition([])

    clusters: list[Cluster] = []
    sods: list[list[float]] = []
    reps: list[int] = []          # sequence index of each representative
    rep_vecs = None
    n = len(X) if metric is None else len(items)
    for i in range(n):
        if clusters:
            if metric is None:
                d = np.sqrt(((rep_vecs[: len(clusters)] - X[i]) ** 2).sum(axis=1))
            else:
                d = np.array([metric(items[i], items[r]) for r in reps])
            j = int(np.argmin(d))
            nearest = float(d[j])
        if not clusters or (nearest > theta and len(clusters) < Q):
            clusters.append(Cluster([i], i))
            sods.append([0.0])
            reps.append(i)
            if metric is None:
                if rep_vecs is None:
                    rep_vecs = np.empty((min(Q, n), X.shape[1]))
                rep_vecs[len(clusters) - 1] = X[i]
            continue
        c, sod = clusters[j], sods[j]
        if metric is None:
            new_d = np.sqrt(((X[c.members] - X[i]) ** 2).sum(axis=1))
        else:
            new_d = np.array([metric(items[m], items[i]) for m in c.members])
        for pos, dv in enumerate(new_d):
            sod[pos] += float(dv)
        sod.append(float(sum(float(v) for v in new_d)))
        c.members.append(i)
        best = min(sod)
        pos = max(p for p, v in enumerate(sod) if v == best)
        c.representative = c.members[pos]
        reps[j] = c.representative
        if metric is None:
            rep_vecs[j] = X[c.representative]
    return Partition(clusters)


# -- compression ---------------------------------------------------------------

@dataclass(frozen=True)
class QreCompression:
    tau_c: float
    sigma_c: float

    def theta(self, n: int, d: int) -> float:
        return theta_qre(self.tau_c, self.sigma_c, n)


@dataclass(frozen=True)
class MstCompression:
    tau_c: float
    gamma: float

    def theta(self, n: int, d: int) -> float:
        return theta_mst(self.tau_c, self.gamma, n, d)


def cbc_partition(D: DissimilarityMatrix, estimator) -> Partition:
    """BSAS over the DM columns with the estimator-derived radius and Q = #columns."""
    n, d = D.shape
    theta = estimator.theta(n, d)
    return bsas(D.values.T, theta, Q=d)


def compress(R: PrototypeSet, D: DissimilarityMatrix, estimator) -> PrototypeSet:
    if D.shape[1] != len(R):
        raise ValueError(f"DM has {D.shape[1]} columns but the prototype set has {len(R)} graphs")
    partition = cbc_partition(D, estimator)
    return R.subset(partition.representatives())


# -- expansion -----------------------------------------------------------------

def expand(R: PrototypeSet, D: DissimilarityMatrix, tau_e: float, sigma_e: float,
           unselected: Sequence[tuple[int, LabeledGraph, str]], l: int = 1, w=None, cfg=None,
           dist: Callable | None = None) -> PrototypeSet:
    """Replace low-entropy prototypes by the ``l`` most distant pool graphs of each class.

    ``unselected`` holds ``(origin_index, graph, class_label)`` triples.
    A prototype for which no replacement is found is kept.
    """
    if l < 1:
        raise ValueError("l must be >= 1")
    if D.shape[1] != len(R):
        raise ValueError(f"DM has {D.shape[1]} columns but the prototype set has {len(R)} graphs")
    dist = dist if dist is not None else TwecCache(w, cfg)
    qcfg = QreConfig(sigma_e)
    pool = list(unselected)
    classes = list(dict.fromkeys(label for _, _, label in pool))
    graphs: list[LabeledGraph] = []
    origin: list[int] = []
    for j, proto in enumerate(R.graphs):
        if qre_scalar(column(D, j), qcfg) > tau_e:
            graphs.append(proto)
            origin.append(R.origin_indices[j])
            continue
        added = []
        for label in classes:
            cands = [(pos, entry) for pos, entry in enumerate(pool) if entry[2] == label]
            ranked = sorted(cands, key=lambda pe: (-dist(proto, pe[1][1]), pe[0]))[:l]
            if len(ranked) < l:
                log.info("class %r pool has only %d graphs left for expansion", label, len(ranked))
            added.extend(pe[1] for pe in ranked)
            taken = {pe[0] for pe in ranked}
            pool = [entry for pos, entry in enumerate(pool) if pos not in taken]
        if not added:
            graphs.append(proto)
            origin.append(R.origin_indices[j])
            continue
        for idx, g, _ in added:
            graphs.append(g)
            origin.append(idx)
    return PrototypeSet(tuple(graphs), tuple(origin))


# -- ordering efficiency ---------------------------------------------------------

@dataclass(frozen=True)
class EfficiencyResult:
    n: int
    ordering: str
    clusters: int
    optimum: int
    ratio: float


def ordering_permutation(n: int, ordering: str, seed=None) -> list[int]:
    if ordering == "best":
        return list(range(n))
    if ordering == "worst":
        # even positions first: for odd n this is j -> 2j mod n
        return list(range(0, n, 2)) + list(range(1, n, 2))
    if ordering == "random":
        return [int(i) for i in np.random.default_rng(seed).permutation(n)]
    raise ValueError(f"unknown ordering {ordering!r}")


def efficiency_experiment(n: int, theta: float = 1.0, ordering: str = "best", seed=None) -> EfficiencyResult:
    """BSAS on collinear points spaced ``theta`` apart under a given presentation order."""
    if n < 3:
        raise ValueError("n must be at least 3")
    points = np.arange(n, dtype=float)[:, None] * theta
    perm = ordering_permutation(n, ordering, seed)
    clusters = len(bsas(points[perm], theta, Q=n))
    optimum = math.ceil(n / 3)
    name = ordering if ordering != "random" else f"random({seed})"
    return EfficiencyResult(n, name, clusters, optimum, optimum / clusters)
