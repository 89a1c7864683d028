"""Delimited reports and matplotlib figures for training runs and bench suites."""

from __future__ import annotations

import csv
from pathlib import Path
from typing import Sequence

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

from .bench import Case, format_table  # noqa: E402
from .optimizer import GenerationLog  # noqa: E402

# fixed metadata keeps the PNG bytes reproducible
_PNG_META = {"Software": None}


def write_generation_csv(history: Sequence[GenerationLog], path) -> Path:
    path = Path(path)
    with open(path, "w", newline="", encoding="utf-8") as fh:
        out = csv.writer(fh, lineterminator="\n")
        out.writerow(["generation", "best_fitness", "mean_fitness", "best_rs_size", "stall"])
        for h in history:
            out.writerow([h.generation, repr(h.best_fitness), repr(h.mean_fitness), h.best_rs_size, h.stall])
    return path


def plot_convergence(history: Sequence[GenerationLog], path, title: str = "") -> Path:
    gens = [h.generation for h in history]
    fig, ax = plt.subplots(figsize=(6, 3.5))
    ax.plot(gens, [h.best_fitness for h in history], marker="o", ms=3, label="best")
    ax.plot(gens, [h.mean_fitness for h in history], marker=".", ms=3, label="mean")
    ax.set_xlabel("generation")
    ax.set_ylabel("fitness")
    ax.set_ylim(0.0, 1.02)
    ax.grid(alpha=0.3)
    ax.legend(loc="center right")
    if title:
        ax.set_title(title)
    ax2 = ax.twinx()
    ax2.step(gens, [h.best_rs_size for h in history], where="mid", color="tab:gray", alpha=0.6)
    ax2.set_ylabel("best RS size", color="tab:gray")
    fig.tight_layout()
    fig.savefig(path, dpi=110, metadata=_PNG_META)
    plt.close(fig)
    return Path(path)


def write_bench_tsv(rows: Sequence[Case], path) -> Path:
    path = Path(path)
    path.write_text(format_table(list(rows)), encoding="utf-8")
    return path


def _plot_efficiency(rows, ax):
    by_kind: dict[str, list[tuple[int, float]]] = {}
    for r in rows:
        n_part, kind = r.case.split(" ", 1)
        kind = "random" if kind.startswith("random") else kind
        by_kind.setdefault(kind, []).append((int(n_part[2:]), r.measured))
    for kind, pts in by_kind.items():
        n, ratio = np.array(pts).T
        ax.plot(n, ratio, "o" if kind == "random" else "o-", label=kind, alpha=0.8)
    ax.axhline(2.0 / 3.0, ls="--", color="k", lw=0.8, label="2/3")
    ax.set_xscale("log")
    ax.set_xlabel("n")
    ax.set_ylabel("compression efficiency")
    ax.legend()


def _plot_bound(rows, ax):
    measured = np.array([r.measured for r in rows])
    bound = np.array([r.expected for r in rows])
    ok = np.array([r.ok for r in rows])
    ax.scatter(bound[ok], measured[ok], s=6, alpha=0.5, label="pass")
    if (~ok).any():
        ax.scatter(bound[~ok], measured[~ok], s=12, color="red", label="fail")
    ax.plot([0, 1], [0, 1], "k--", lw=0.8)
    ax.set_xlabel("threshold tau_c")
    ax.set_ylabel("largest cluster entropy")
    ax.legend()


def _plot_oracles(rows, ax):
    kinds = ["qre", "mst", "minsod"]
    passed = [sum(r.ok for r in rows if r.case.startswith(k)) for k in kinds]
    failed = [sum(not r.ok for r in rows if r.case.startswith(k)) for k in kinds]
    ax.bar(kinds, passed, label="pass")
    ax.bar(kinds, failed, bottom=passed, color="red", label="fail")
    ax.set_ylabel("instances")
    ax.legend()


def plot_bench(suite: str, rows: Sequence[Case], path) -> Path:
    fig, ax = plt.subplots(figsize=(5, 3.5))
    if suite == "efficiency":
        _plot_efficiency(rows, ax)
    elif suite in ("theorem1", "theorem3"):
        _plot_bound(rows, ax)
    else:
        _plot_oracles(rows, ax)
    ax.set_title(suite)
    fig.tight_layout()
    fig.savefig(path, dpi=110, metadata=_PNG_META)
    plt.close(fig)
    return Path(path)
