"""Benchmark suites: clustering-radius guarantees, ordering efficiency and estimator oracles.

Every suite returns a list of :class:`Case` rows; a suite passes when all
rows pass.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Callable

import mpmath
import numpy as np

from .dissimilarity import DissimilarityMatrix
from .entropy import (
    EXTENT,
    MstReConfig,
    QreConfig,
    mst_length,
    mst_renyi_normalized,
    qre_joint,
    sigma_upper_bound,
)
from .prototypes import MstCompression, QreCompression, cbc_partition, efficiency_experiment, minsod

TOL = 1e-9


@dataclass(frozen=True)
class Case:
    suite: str
    case: str
    measured: float
    expected: float
    relation: str          # "<=", ">=", "==" or "~" (relative tolerance in `tol`)
    ok: bool
    tol: float = 0.0


def random_dm(rng: np.random.Generator, n: int, d: int) -> np.ndarray:
    """Random n x d DM in [0, 2]: uniform, or columns scattered around a few centres."""
    if rng.integers(3) == 0:
        return rng.uniform(0.0, EXTENT, (n, d))
    centres = rng.uniform(0.0, EXTENT, (n, int(rng.integers(1, 6))))
    assign = rng.integers(centres.shape[1], size=d)
    spread = rng.uniform(1e-3, 0.5)
    return np.clip(centres[:, assign] + rng.normal(0.0, spread, (n, d)), 0.0, EXTENT)


def _dm(values: np.ndarray) -> DissimilarityMatrix:
    n, d = values.shape
    return DissimilarityMatrix(values, tuple(map(str, range(n))), tuple(map(str, range(d))))


def theorem_qre(instances: int = 1000, seed: int = 0) -> list[Case]:
    """Every compression cluster has joint QRE at most tau_c."""
    rng = np.random.default_rng(seed)
    smax = sigma_upper_bound()
    rows = []
    for it in range(instances):
        n, d = int(rng.integers(20, 201)), int(rng.integers(10, 101))
        tau = float(rng.uniform(0.05, 0.95))
        sigma = float(rng.uniform(0.05, smax))
        X = random_dm(rng, n, d)
        part = cbc_partition(_dm(X), QreCompression(tau, sigma))
        cfg = QreConfig(sigma)
        worst = max(qre_joint(X[:, c.members].T, cfg) for c in part.clusters)
        rows.append(Case("theorem1", f"#{it} n={n} d={d} clusters={len(part)}", worst, tau, "<=",
                         worst <= tau + TOL))
    return rows


def theorem_mst(instances: int = 500, seed: int = 0) -> list[Case]:
    """Every non-singleton compression cluster has normalized MST entropy at most tau_c."""
    rng = np.random.default_rng(seed)
    rows = []
    for it in range(instances):
        n, d = int(rng.integers(50, 201)), int(rng.integers(10, 101))
        tau = float(rng.uniform(0.05, 0.95))
        gamma = float(rng.uniform(0.01, 3.0))
        X = random_dm(rng, n, d)
        part = cbc_partition(_dm(X), MstCompression(tau, gamma))
        cfg = MstReConfig(gamma)
        ent = [mst_renyi_normalized(X[:, c.members].T, cfg) for c in part.clusters if len(c.members) > 1]
        worst = max(ent, default=0.0)
        rows.append(Case("theorem3", f"#{it} n={n} d={d} multi={len(ent)}", worst, tau, "<=",
                         worst <= tau + TOL))
    return rows


def efficiency(sizes=(99, 999, 9999), random_seeds=(0, 1, 2)) -> list[Case]:
    rows = []
    for n in sizes:
        worst_ratio = math.ceil(n / 3) / math.ceil(n / 2)
        r = efficiency_experiment(n, 1.0, "best")
        rows.append(Case("efficiency", f"n={n} best", r.ratio, 1.0, "==", r.ratio == 1.0))
        r = efficiency_experiment(n, 1.0, "worst")
        rows.append(Case("efficiency", f"n={n} worst", r.ratio, worst_ratio, "==", r.ratio == worst_ratio))
        for s in random_seeds:
            r = efficiency_experiment(n, 1.0, "random", s)
            rows.append(Case("efficiency", f"n={n} random seed={s}", r.ratio, worst_ratio, ">=",
                             r.ratio >= worst_ratio - 1e-12))
    return rows


# -- independent oracles ----------------------------------------------------------

def qre_double_sum(x: np.ndarray, sigma: float, extent: float = EXTENT, digits: int = 60) -> float:
    """Literal double sum over all ordered sample pairs, in extended precision."""
    k, m = x.shape
    with mpmath.workdps(digits):
        s2 = mpmath.mpf(sigma) ** 2
        total = mpmath.mpf(0)
        for i in range(k):
            for j in range(k):
                sq = mpmath.fsum((mpmath.mpf(x[i, t]) - mpmath.mpf(x[j, t])) ** 2 for t in range(m))
                total += mpmath.exp(-sq / (4 * s2))
        h = -mpmath.log(total / k ** 2, 2) / (m * mpmath.log(extent, 2))
        return float(min(1, max(0, h)))


def prufer_trees(k: int):
    """All k^(k-2) labeled spanning trees of K_k as edge lists."""
    for seq in itertools.product(range(k), repeat=k - 2):
        degree = [1] * k
        for v in seq:
            degree[v] += 1
        edges = []
        for v in seq:
            leaf = min(u for u in range(k) if degree[u] == 1)
            edges.append((leaf, v))
            degree[leaf] -= 1
            degree[v] -= 1
        u, w = [u for u in range(k) if degree[u] == 1]
        edges.append((u, w))
        yield edges


def _dist(a, b) -> float:
    acc = 0.0
    for u, v in zip(a, b):
        acc += (u - v) * (u - v)
    return math.sqrt(acc)


def mst_brute_force(x: np.ndarray, gamma: float) -> float:
    """Minimum over every spanning tree; each tree sums its powered lengths in ascending order."""
    k = x.shape[0]
    trees = [[(0, 1)]] if k == 2 else prufer_trees(k)
    return min(sum(sorted(_dist(x[a], x[b]) ** gamma for a, b in tree)) for tree in trees)


def minsod_exhaustive(points: np.ndarray) -> int:
    k = len(points)
    sods = [sum(float(np.linalg.norm(points[a] - points[b])) for b in range(k)) for a in range(k)]
    best = min(sods)
    return [i for i in range(k) if sods[i] == best][-1]


def oracles(qre_n: int = 100, mst_n: int = 50, minsod_n: int = 100, seed: int = 0) -> list[Case]:
    rng = np.random.default_rng(seed)
    rows = []
    smax = sigma_upper_bound()
    for it in range(qre_n):
        k, m = int(rng.integers(1, 30)), int(rng.integers(1, 40))
        x = rng.uniform(0.0, EXTENT, (k, m)) * rng.uniform(0.01, 1.0)
        sigma = float(rng.uniform(0.01, smax))
        got, ref = qre_joint(x, QreConfig(sigma)), qre_double_sum(x, sigma)
        rel = abs(got - ref) / max(abs(ref), 1e-300) if ref else abs(got)
        rows.append(Case("oracles", f"qre #{it} k={k} m={m}", got, ref, "~", rel <= 1e-12, 1e-12))
    for it in range(mst_n):
        k, m = int(rng.integers(2, 7)), int(rng.integers(1, 6))
        if it % 5 == 0:
            x = rng.integers(0, 3, (k, m)).astype(float)      # many equal edge lengths
        else:
            x = rng.uniform(0.0, EXTENT, (k, m))
        gamma = float(rng.uniform(0.1, 3.0))
        got, ref = mst_length(x, gamma), mst_brute_force(x, gamma)
        rows.append(Case("oracles", f"mst #{it} k={k} m={m}", got, ref, "==", got == ref))
    for it in range(minsod_n):
        k, m = int(rng.integers(1, 12)), int(rng.integers(1, 5))
        x = rng.integers(0, 4, (k, m)).astype(float) if it % 2 else rng.normal(size=(k, m))
        got, ref = minsod(list(x)), minsod_exhaustive(x)
        rows.append(Case("oracles", f"minsod #{it} k={k}", got, ref, "==", got == ref))
    return rows


SUITES: dict[str, Callable[[], list[Case]]] = {
    "efficiency": efficiency,
    "theorem1": theorem_qre,
    "theorem3": theorem_mst,
    "oracles": oracles,
}


def format_table(rows: list[Case]) -> str:
    lines = ["suite\tcase\tmeasured\trelation\texpected\tstatus"]
    for r in rows:
        lines.append(f"{r.suite}\t{r.case}\t{r.measured:.12g}\t{r.relation}\t{r.expected:.12g}\t"
                     f"{'PASS' if r.ok else 'FAIL'}")
    return "\n".join(lines) + "\n"
