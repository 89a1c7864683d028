"""Normalized Renyi entropy estimators used to score dissimilarity samples.

Two estimators are provided:

* quadratic Renyi entropy from the kernel information potential, with a
  unit-peak Gaussian kernel and base-2 logarithms so that dividing by the
  sample dimension maps it into [0, 1] for an extent of 2;
* alpha-order Renyi entropy from the gamma-weighted length of a Euclidean
  minimum spanning tree, normalized by its value for a maximally spread
  sample in the extent hypercube.
"""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass

import numpy as np
from scipy.spatial.distance import pdist

EXTENT = 2.0
GAMMA_MAX = 3.0
MIN_MST_DIM = math.ceil(2 * math.pi * math.e) + 1

# how many estimates were clipped into [0, 1], by estimator
clip_counts: Counter = Counter()


class EntropyConfigError(ValueError):
    pass


class DimensionTooSmallError(ValueError):
    pass


def sigma_upper_bound() -> float:
    return math.sqrt(8.0 / math.log(2.0))


@dataclass(frozen=True)
class QreConfig:
    sigma: float
    extent: float = EXTENT

    def __post_init__(self):
        if not 0.0 < self.sigma <= sigma_upper_bound():
            raise EntropyConfigError(f"kernel size {self.sigma} outside (0, {sigma_upper_bound():.6f}]")
        if self.extent <= 0.0:
            raise EntropyConfigError(f"extent must be positive, got {self.extent}")


@dataclass(frozen=True)
class MstReConfig:
    gamma: float
    extent: float = EXTENT

    def __post_init__(self):
        if not 0.0 < self.gamma <= GAMMA_MAX:
            raise EntropyConfigError(f"gamma {self.gamma} outside (0, {GAMMA_MAX}]")
        if self.extent <= 0.0:
            raise EntropyConfigError(f"extent must be positive, got {self.extent}")


def _clip(value: float, name: str) -> float:
    if value < 0.0 or value > 1.0:
        clip_counts[name] += 1
        return min(1.0, max(0.0, value))
    return value


def _as_points(samples) -> np.ndarray:
    x = np.asarray(samples, dtype=float)
    if x.ndim == 1:
        x = x[:, None]
    if x.ndim != 2 or x.shape[0] == 0 or x.shape[1] == 0:
        raise ValueError(f"expected a non-empty (k, m) sample, got shape {x.shape}")
    return x


def _pair_deficit(x: np.ndarray, sigma: float) -> float:
    """Sum over pairs of (1 - kernel); keeps precision when all samples nearly coincide."""
    if x.shape[0] == 1:
        return 0.0
    sq = pdist(x, "sqeuclidean")
    return float(-np.expm1(-sq / (4.0 * sigma * sigma)).sum())


def information_potential(samples, sigma: float) -> float:
    """Quadratic information potential with a unit-peak kernel of width sigma*sqrt(2)."""
    x = _as_points(samples)
    k = x.shape[0]
    return 1.0 - 2.0 * _pair_deficit(x, sigma) / (k * k)


def qre_joint(samples, cfg: QreConfig) -> float:
    """Normalized quadratic Renyi entropy of ``k`` measurements of an ``m``-vector.

    ``samples`` has shape (k, m).
    """
    x = _as_points(samples)
    k = x.shape[0]
    # -log2 V with V = 1 - 2*deficit/k^2
    bits = -math.log1p(-2.0 * _pair_deficit(x, cfg.sigma) / (k * k)) / math.log(2.0)
    h = bits / (x.shape[1] * math.log2(cfg.extent))
    return _clip(h, "qre")


def qre_scalar(values, cfg: QreConfig) -> float:
    x = np.asarray(values, dtype=float).reshape(-1, 1)
    return qre_joint(x, cfg)


def mst_edges(points) -> list[tuple[int, int, float]]:
    """Kruskal MST of the complete Euclidean graph; equal weights resolve by (i, j)."""
    x = _as_points(points)
    k = x.shape[0]
    if k < 2:
        raise ValueError("a spanning tree needs at least two points")
    iu, ju = np.triu_indices(k, 1)
    w = pdist(x, "euclidean")
    order = np.lexsort((ju, iu, w))
    parent = list(range(k))

    def find(a):
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    tree = []
    for e in order:
        a, b = int(iu[e]), int(ju[e])
        ra, rb = find(a), find(b)
        if ra != rb:
            parent[rb] = ra
            tree.append((a, b, float(w[e])))
            if len(tree) == k - 1:
                break
    return tree


def mst_length(points, gamma: float) -> float:
    if not 0.0 < gamma <= GAMMA_MAX:
        raise EntropyConfigError(f"gamma {gamma} outside (0, {GAMMA_MAX}]")
    return float(sum(length ** gamma for _, _, length in mst_edges(points)))


def alpha_of_gamma(gamma: float, dim: float) -> float:
    if not 0.0 < gamma < dim:
        raise EntropyConfigError(f"need 0 < gamma < dim, got gamma={gamma}, dim={dim}")
    return (dim - gamma) / dim


def beta_approx(gamma: float, dim: float) -> float:
    if dim <= 2 * math.pi * math.e:
        raise DimensionTooSmallError(f"dimension {dim} too small: beta is not positive below 2*pi*e")
    return 0.5 * gamma * math.log(dim / (2 * math.pi * math.e))


def _mst_terms(m: int, gamma: float):
    alpha = alpha_of_gamma(gamma, m)
    return alpha, beta_approx(gamma, m)


def mst_renyi_normalizer(k: int, m: int, gamma: float, extent: float = EXTENT) -> float:
    """Estimator value when every tree edge spans the extent hypercube diagonal."""
    alpha, beta = _mst_terms(m, gamma)
    return (m / gamma) * (math.log(k - 1) + gamma * math.log(extent * math.sqrt(m))
                          - alpha * math.log(k) - math.log(beta))


def mst_renyi_raw(points, gamma: float) -> float:
    x = _as_points(points)
    k, m = x.shape
    alpha, beta = _mst_terms(m, gamma)
    length = mst_length(x, gamma)
    if length == 0.0:
        return -math.inf
    return (m / gamma) * (math.log(length / k ** alpha) - math.log(beta))


def mst_renyi_normalized(points, cfg: MstReConfig) -> float:
    """MST-based Renyi entropy of ``k`` points in ``m`` dimensions, scaled into [0, 1]."""
    x = _as_points(points)
    k, m = x.shape
    if k < 2:
        raise ValueError("MST entropy needs at least two points")
    if m < MIN_MST_DIM:
        raise DimensionTooSmallError(f"dimension {m} below {MIN_MST_DIM}: beta approximation unusable")
    iota = mst_renyi_normalizer(k, m, cfg.gamma, cfg.extent)
    if iota <= 0.0:
        raise ValueError(f"degenerate MST entropy normalizer {iota} (k={k}, m={m}, gamma={cfg.gamma})")
    raw = mst_renyi_raw(x, cfg.gamma)
    if raw == -math.inf:
        return 0.0
    return _clip(raw / iota, "mst")
