"""Seeded generator of letter-like planar graphs."""

from __future__ import annotations

import numpy as np

from .datasets import SPLITS, Dataset
from .graph import LabeledGraph, RealVector


def _skeleton(rng: np.random.Generator):
    n = int(rng.integers(3, 7))
    coords = rng.uniform(0.0, 3.0, size=(n, 2))
    edges = {(i, i + 1) for i in range(n - 1)}
    if n > 3 and rng.random() < 0.5:
        a, b = sorted(rng.choice(n, size=2, replace=False))
        if b - a > 1:
            edges.add((int(a), int(b)))
    return coords, sorted(edges)


def letter_like_dataset(classes: int, per_class: int, noise: float, seed: int = 0) -> Dataset:
    """``classes`` stroke skeletons, each sampled ``per_class`` times per split.

    Every sample perturbs its class skeleton's vertex coordinates with
    isotropic Gaussian noise of standard deviation ``noise``.
    """
    if classes < 1 or per_class < 1:
        raise ValueError("need at least one class and one graph per class")
    if noise < 0:
        raise ValueError("noise must be non-negative")
    rng = np.random.default_rng(seed)
    skeletons = [_skeleton(rng) for _ in range(classes)]
    names = [f"C{c:02d}" for c in range(classes)]
    splits = {}
    for split in SPLITS:
        samples = []
        for i in range(per_class):
            for c, (coords, edges) in enumerate(skeletons):
                pts = coords + rng.normal(0.0, noise, size=coords.shape)
                g = LabeledGraph(tuple(RealVector(tuple(p)) for p in pts),
                                 tuple((a, b, None) for a, b in edges),
                                 f"{split}-{names[c]}-{i:04d}")
                samples.append((g, names[c]))
        splits[split] = samples
    return Dataset(splits["train"], splits["validation"], splits["test"], tuple(names))
