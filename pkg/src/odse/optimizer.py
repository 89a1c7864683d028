"""Genetic-algorithm synthesis of the dissimilarity-space classifier."""

from __future__ import annotations

import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field, replace
from typing import Callable, Sequence

import multiprocessing as mp
import numpy as np

from .classify import EmbeddedTrainingSet, knn_classify_many
from .dissimilarity import TwecCache, build_dm, filter_columns
from .entropy import (
    GAMMA_MAX,
    MstReConfig,
    QreConfig,
    mst_renyi_normalized,
    qre_joint,
    sigma_upper_bound,
)
from .graph import LabelDissimConfig, LabeledGraph
from .prototypes import (
    MstCompression,
    PrototypeSet,
    QreCompression,
    cbc_partition,
    expand,
    mode_seek,
    random_init,
)
from .twec import TwecWeights

log = logging.getLogger(__name__)

VARIANTS = ("v1-qre", "v2-qre", "v1-mst", "v2-mst")
GENE_NAMES = ("tau_c", "tau_e", "sigma_c_or_gamma", "sigma_e",
              "w_sub_v", "w_ins_v", "w_del_v", "w_sub_e", "w_ins_e", "w_del_e",
              "real_scale", "symbol_weight")
GENOME_LENGTH = len(GENE_NAMES)
RANGE_FLOOR = 1e-3

Sample = tuple[LabeledGraph, str]


@dataclass(frozen=True)
class GaConfig:
    population_size: int = 30
    max_generations: int = 40
    stall_generations: int = 15
    crossover_rate: float = 0.9
    mutation_rate: float = 0.1
    elitism: int = 1
    seed: int = 0
    variant: str = "v1-qre"
    knn_k: int = 1
    p: float = 0.25
    s: int = 10
    l: int = 1
    eta: float = 0.9
    varsigma: float = 0.2

    def __post_init__(self):
        if self.variant not in VARIANTS:
            raise ValueError(f"variant must be one of {VARIANTS}, got {self.variant!r}")
        if self.population_size < 2:
            raise ValueError("population size must be at least 2")
        if self.max_generations < 1 or self.stall_generations < 1:
            raise ValueError("generation limits must be positive")
        for name in ("crossover_rate", "mutation_rate", "eta", "varsigma"):
            if not 0.0 <= getattr(self, name) <= 1.0:
                raise ValueError(f"{name} must lie in [0, 1]")
        if not 0 <= self.elitism < self.population_size:
            raise ValueError("elitism must be smaller than the population")
        if self.knn_k not in (1, 3, 5):
            raise ValueError("knn_k must be 1, 3 or 5")
        if not 0.0 < self.p <= 1.0 or self.s < 1 or self.l < 1:
            raise ValueError("need 0 < p <= 1, s >= 1 and l >= 1")

    @property
    def uses_mst(self) -> bool:
        return self.variant.endswith("-mst")

    @property
    def expands(self) -> bool:
        return self.variant.startswith("v1")


@dataclass(frozen=True)
class OdseParams:
    tau_c: float
    tau_e: float
    sigma_c: float | None
    gamma: float | None
    sigma_e: float
    weights: TwecWeights
    label_cfg: LabelDissimConfig

    def compression(self):
        if self.gamma is not None:
            return MstCompression(self.tau_c, self.gamma)
        return QreCompression(self.tau_c, self.sigma_c)

    def to_json(self) -> dict:
        out = asdict(self)
        out["label_cfg"]["composite_weights"] = dict(self.label_cfg.composite_weights)
        return out

    @classmethod
    def from_json(cls, obj: dict) -> "OdseParams":
        return cls(obj["tau_c"], obj["tau_e"], obj["sigma_c"], obj["gamma"], obj["sigma_e"],
                   TwecWeights(**obj["weights"]), LabelDissimConfig(**obj["label_cfg"]))


def _affine(gene: float, lo: float, hi: float) -> float:
    return lo + gene * (hi - lo)


def decode_genome(genes: Sequence[float], cfg: GaConfig) -> OdseParams:
    g = np.asarray(genes, dtype=float)
    if g.shape != (GENOME_LENGTH,) or np.any(g < 0.0) or np.any(g > 1.0):
        raise ValueError(f"genome must hold {GENOME_LENGTH} genes in [0, 1]")
    g = [float(v) for v in g]
    smax = sigma_upper_bound()
    sigma_c = gamma = None
    if cfg.uses_mst:
        gamma = _affine(g[2], RANGE_FLOOR, GAMMA_MAX)
    else:
        sigma_c = _affine(g[2], RANGE_FLOOR, smax)
    return OdseParams(
        tau_c=g[0],
        tau_e=g[1],
        sigma_c=sigma_c,
        gamma=gamma,
        sigma_e=_affine(g[3], RANGE_FLOOR, smax),
        weights=TwecWeights(*g[4:10]),
        label_cfg=LabelDissimConfig(real_scale=g[10], symbol_weight=g[11]),
    )


# -- model -----------------------------------------------------------------------

@dataclass
class OdseModel:
    prototypes: PrototypeSet
    params: OdseParams
    embedding: EmbeddedTrainingSet
    knn_k: int
    variant: str
    genome: tuple[float, ...] = ()
    fitness: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.embedding.dim != len(self.prototypes):
            raise ValueError("embedding dimension must equal the number of prototypes")

    def embed(self, graphs: Sequence[LabeledGraph], cache: TwecCache | None = None) -> np.ndarray:
        return build_dm(graphs, self.prototypes, self.params.weights, self.params.label_cfg, cache).values

    def predict(self, graphs: Sequence[LabeledGraph]) -> list[str]:
        return knn_classify_many(self.embedding, self.embed(graphs), self.knn_k)

    def to_json(self) -> dict:
        from .datasets import graph_to_json
        return {
            "format": "odse-model",
            "version": 1,
            "variant": self.variant,
            "knn_k": self.knn_k,
            "genome": list(self.genome),
            "params": self.params.to_json(),
            "prototypes": [dict(graph_to_json(g), origin=i)
                           for g, i in zip(self.prototypes.graphs, self.prototypes.origin_indices)],
            "embedding": {"labels": list(self.embedding.labels),
                          "vectors": self.embedding.vectors.tolist()},
            "fitness": self.fitness,
        }

    @classmethod
    def from_json(cls, obj: dict) -> "OdseModel":
        from .datasets import graph_from_json
        if obj.get("format") != "odse-model":
            raise ValueError("not an odse model bundle")
        protos = PrototypeSet(tuple(graph_from_json(p) for p in obj["prototypes"]),
                              tuple(p["origin"] for p in obj["prototypes"]))
        emb = EmbeddedTrainingSet(np.array(obj["embedding"]["vectors"], dtype=float).reshape(
            len(obj["embedding"]["labels"]), len(protos)), tuple(obj["embedding"]["labels"]))
        return cls(protos, OdseParams.from_json(obj["params"]), emb, obj["knn_k"], obj["variant"],
                   tuple(obj["genome"]), obj.get("fitness", {}))


# -- fitness -----------------------------------------------------------------------

@dataclass(frozen=True)
class FitnessResult:
    value: float
    accuracy: float = 0.0
    theta_term: float = 0.0
    upsilon: float = 0.0
    rs_size: int = 0
    initial_rs_size: int = 0
    compressed_rs_size: int = 0
    prototype_indices: tuple[int, ...] = ()
    degenerate: str = ""


def size_term(d: int, classes: int, n_train: int) -> float:
    """Parsimony term rewarding few prototypes beyond one per class, clipped to [0, 1]."""
    return min(1.0, max(0.0, 1.0 - (d - classes) / n_train))


def objective(accuracy: float, theta_term: float, upsilon: float, eta: float, varsigma: float) -> float:
    return eta * accuracy + (1.0 - eta) * (varsigma * theta_term + (1.0 - varsigma) * upsilon)


def dm_entropy(values: np.ndarray, params: OdseParams) -> float:
    """Normalized entropy of the DM, with its columns taken as the measurements."""
    cols = values.T
    if params.gamma is not None:
        if cols.shape[0] < 2:
            return 0.0
        return mst_renyi_normalized(cols, MstReConfig(params.gamma))
    return qre_joint(cols, QreConfig(params.sigma_c))


def synthesize_rs(params: OdseParams, train: Sequence[Sample], cfg: GaConfig, stream,
                  cache: TwecCache) -> tuple[PrototypeSet, int, int]:
    """Initial RS, compression and (v1) expansion; returns RS and the two intermediate sizes."""
    graphs = [g for g, _ in train]
    if cfg.expands:
        rs = random_init(train, cfg.p, stream)
    else:
        rs = mode_seek(train, cfg.s, dist=cache)
    initial = len(rs)
    D = build_dm(graphs, rs, params.weights, params.label_cfg, cache)
    reps = cbc_partition(D, params.compression()).representatives()
    rs = rs.subset(reps)
    compressed = len(rs)
    if cfg.expands:
        D = filter_columns(D, reps)
        chosen = set(rs.origin_indices)
        pool = [(i, g, c) for i, (g, c) in enumerate(train) if i not in chosen]
        rs = expand(rs, D, params.tau_e, params.sigma_e, pool, cfg.l, dist=cache)
    return rs, initial, compressed


def fitness(genes: Sequence[float], train: Sequence[Sample], validation: Sequence[Sample],
            cfg: GaConfig, stream=None) -> FitnessResult:
    """Objective value of one genome: validation accuracy mixed with parsimony and DM entropy."""
    params = decode_genome(genes, cfg)
    cache = TwecCache(params.weights, params.label_cfg)
    classes = len({c for _, c in train})
    try:
        rs, initial, compressed = synthesize_rs(params, train, cfg, stream, cache)
        D = build_dm([g for g, _ in train], rs, params.weights, params.label_cfg, cache)
        emb = EmbeddedTrainingSet(D.values, tuple(c for _, c in train))
        V = build_dm([g for g, _ in validation], rs, params.weights, params.label_cfg, cache)
        predicted = knn_classify_many(emb, V.values, cfg.knn_k)
        accuracy = float(np.mean([p == c for p, (_, c) in zip(predicted, validation)]))
        upsilon = dm_entropy(D.values, params)
    except ValueError as exc:
        log.debug("degenerate genome: %s", exc)
        return FitnessResult(0.0, degenerate=str(exc))
    theta_term = size_term(len(rs), classes, len(train))
    value = objective(accuracy, theta_term, upsilon, cfg.eta, cfg.varsigma)
    return FitnessResult(value, accuracy, theta_term, upsilon, len(rs), initial, compressed,
                         rs.origin_indices)


def build_model(genes: Sequence[float], result: FitnessResult, train: Sequence[Sample],
                cfg: GaConfig) -> OdseModel:
    params = decode_genome(genes, cfg)
    rs = PrototypeSet(tuple(train[i][0] for i in result.prototype_indices), result.prototype_indices)
    D = build_dm([g for g, _ in train], rs, params.weights, params.label_cfg)
    emb = EmbeddedTrainingSet(D.values, tuple(c for _, c in train))
    return OdseModel(rs, params, emb, cfg.knn_k, cfg.variant, tuple(float(v) for v in genes),
                     {"value": result.value, "accuracy": result.accuracy,
                      "theta_term": result.theta_term, "upsilon": result.upsilon})


# -- GA operators ----------------------------------------------------------------

def roulette_select(fitnesses: Sequence[float], draws: Sequence[float]) -> list[int]:
    """Fitness-proportional picks for uniform ``draws`` in [0, 1)."""
    f = np.asarray(fitnesses, dtype=float)
    total = f.sum()
    if total <= 0.0:
        return [min(int(u * len(f)), len(f) - 1) for u in draws]
    cum = np.cumsum(f / total)
    return [min(int(np.searchsorted(cum, u, side="right")), len(f) - 1) for u in draws]


def two_point_crossover(a: np.ndarray, b: np.ndarray, cuts: tuple[int, int]) -> tuple[np.ndarray, np.ndarray]:
    i, j = sorted(cuts)
    c1, c2 = a.copy(), b.copy()
    c1[i:j], c2[i:j] = b[i:j], a[i:j]
    return c1, c2


def mutate(genes: np.ndarray, rate: float, rng: np.random.Generator) -> np.ndarray:
    mask = rng.random(genes.shape) < rate
    fresh = rng.random(genes.shape)
    return np.where(mask, fresh, genes)


@dataclass
class GenerationLog:
    generation: int
    best_fitness: float
    mean_fitness: float
    best_rs_size: int
    stall: int


@dataclass
class GaResult:
    model: OdseModel
    best: FitnessResult
    best_genome: tuple[float, ...]
    history: list[GenerationLog]
    final_population: list[tuple[tuple[float, ...], FitnessResult]]


_WORKER: dict = {}


def _worker_init(train, validation, cfg):
    _WORKER.update(train=train, validation=validation, cfg=cfg)


def _worker_eval(task):
    genes, key = task
    return fitness(genes, _WORKER["train"], _WORKER["validation"], _WORKER["cfg"],
                   np.random.SeedSequence(key))


def _evaluate(population, keys, train, validation, cfg, pool):
    tasks = [(tuple(float(v) for v in g), k) for g, k in zip(population, keys)]
    if pool is None:
        return [fitness(g, train, validation, cfg, np.random.SeedSequence(k)) for g, k in tasks]
    return list(pool.map(_worker_eval, tasks))


def ga_optimize(train: Sequence[Sample], validation: Sequence[Sample], cfg: GaConfig,
                threads: int = 1, initial_population=None,
                progress: Callable[[GenerationLog], None] | None = None) -> GaResult:
    """Evolve genomes with roulette selection, two-point crossover, uniform mutation and elitism.

    Stops after ``max_generations`` populations or when the best fitness has
    not changed for ``stall_generations`` consecutive generations.
    """
    if not train or not validation:
        raise ValueError("training and validation splits must be non-empty")
    train, validation = list(train), list(validation)
    rng = np.random.default_rng(np.random.SeedSequence([cfg.seed, 0x6A]))
    if initial_population is None:
        population = [rng.random(GENOME_LENGTH) for _ in range(cfg.population_size)]
    else:
        population = [np.asarray(g, dtype=float) for g in initial_population]
        if len(population) != cfg.population_size:
            raise ValueError("initial population size does not match the configuration")

    pool = None
    if threads > 1:
        ctx = mp.get_context("fork") if "fork" in mp.get_all_start_methods() else None
        pool = ProcessPoolExecutor(threads, mp_context=ctx, initializer=_worker_init,
                                   initargs=(train, validation, cfg))
    try:
        keys = [(cfg.seed, 0, i) for i in range(len(population))]
        results = _evaluate(population, keys, train, validation, cfg, pool)
        history: list[GenerationLog] = []
        best_i = int(np.argmax([r.value for r in results]))
        best_genome, best = population[best_i].copy(), results[best_i]
        stall = 0
        generation = 0
        while True:
            entry = GenerationLog(generation, best.value, float(np.mean([r.value for r in results])),
                                  best.rs_size, stall)
            history.append(entry)
            log.info("gen %d best %.6f mean %.6f rs %d stall %d", entry.generation, entry.best_fitness,
                     entry.mean_fitness, entry.best_rs_size, entry.stall)
            if progress:
                progress(entry)
            if len(history) >= cfg.max_generations or stall >= cfg.stall_generations:
                break
            generation += 1

            order = np.argsort([-r.value for r in results], kind="stable")
            elite = [(population[i].copy(), results[i]) for i in order[: cfg.elitism]]
            offspring = []
            fit = [r.value for r in results]
            while len(offspring) < cfg.population_size - cfg.elitism:
                a, b = roulette_select(fit, rng.random(2))
                c1, c2 = population[a].copy(), population[b].copy()
                if rng.random() < cfg.crossover_rate:
                    cuts = tuple(int(v) for v in rng.choice(np.arange(1, GENOME_LENGTH), 2, replace=False))
                    c1, c2 = two_point_crossover(c1, c2, cuts)
                offspring.extend([mutate(c1, cfg.mutation_rate, rng), mutate(c2, cfg.mutation_rate, rng)])
            offspring = offspring[: cfg.population_size - cfg.elitism]
            keys = [(cfg.seed, generation, i) for i in range(len(offspring))]
            new_results = _evaluate(offspring, keys, train, validation, cfg, pool)
            population = [g for g, _ in elite] + offspring
            results = [r for _, r in elite] + new_results

            cand = int(np.argmax([r.value for r in results]))
            if results[cand].value > best.value:
                best_genome, best = population[cand].copy(), results[cand]
                stall = 0
            else:
                stall += 1
    finally:
        if pool is not None:
            pool.shutdown()

    model = build_model(best_genome, best, train, cfg)
    final = [(tuple(float(v) for v in g), r) for g, r in zip(population, results)]
    return GaResult(model, best, tuple(float(v) for v in best_genome), history, final)


def with_overrides(cfg: GaConfig, **kwargs) -> GaConfig:
    return replace(cfg, **{k: v for k, v in kwargs.items() if v is not None})
