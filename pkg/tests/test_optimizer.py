import json
import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from helpers import point_graph
from odse.optimizer import (
    GENOME_LENGTH,
    GaConfig,
    OdseModel,
    decode_genome,
    fitness,
    ga_optimize,
    mutate,
    objective,
    roulette_select,
    size_term,
    two_point_crossover,
    with_overrides,
)
from odse.synthetic import letter_like_dataset

SMAX = math.sqrt(8 / math.log(2))


def blobs(n_per_class, seed=0):
    rng = np.random.default_rng(seed)
    out = []
    for i in range(n_per_class):
        out.append((point_graph(float(rng.normal(0.0, 0.05)), f"a{i}"), "A"))
        out.append((point_graph(float(rng.normal(5.0, 0.05)), f"b{i}"), "B"))
    return out


def test_decode_midpoints_and_ends():
    half = decode_genome([0.5] * GENOME_LENGTH, GaConfig(variant="v1-qre"))
    assert half.tau_c == 0.5 and half.tau_e == 0.5
    assert half.sigma_c == pytest.approx(1e-3 + 0.5 * (SMAX - 1e-3), rel=1e-15)
    assert half.gamma is None
    assert half.weights.w_sub_v == 0.5 and half.label_cfg.symbol_weight == 0.5
    ones = decode_genome([1.0] * GENOME_LENGTH, GaConfig(variant="v2-qre"))
    assert ones.sigma_c == pytest.approx(SMAX, rel=1e-15) and ones.sigma_e == pytest.approx(SMAX, rel=1e-15)
    mst = decode_genome([1.0] * GENOME_LENGTH, GaConfig(variant="v1-mst"))
    assert mst.gamma == pytest.approx(3.0, rel=1e-15) and mst.sigma_c is None
    zero = decode_genome([0.0] * GENOME_LENGTH, GaConfig(variant="v2-mst"))
    assert zero.gamma == pytest.approx(1e-3) and zero.sigma_e == pytest.approx(1e-3)


def test_decode_rejects_bad_genomes():
    for bad in ([0.5] * 11, [0.5] * 13, [0.5] * 11 + [1.2], [-0.1] + [0.5] * 11):
        with pytest.raises(ValueError):
            decode_genome(bad, GaConfig())


def test_size_term_and_objective():
    assert size_term(8, 2, 250) == pytest.approx(0.976, abs=1e-15)
    assert size_term(2, 2, 10) == 1.0
    assert size_term(500, 2, 10) == 0.0
    assert objective(0.8, 0.976, 0.5, 0.9, 0.2) == pytest.approx(0.77952, abs=1e-15)
    assert objective(0.6, 0.1, 0.2, 1.0, 0.5) == 0.6


def test_config_validation():
    for kw in (dict(variant="v3"), dict(population_size=1), dict(max_generations=0),
               dict(crossover_rate=1.5), dict(mutation_rate=-0.1), dict(elitism=30),
               dict(knn_k=2), dict(p=0.0), dict(s=0), dict(l=0), dict(eta=2.0)):
        with pytest.raises(ValueError):
            GaConfig(**kw)
    cfg = with_overrides(GaConfig(), seed=5, variant=None)
    assert cfg.seed == 5 and cfg.variant == "v1-qre"


@given(st.lists(st.floats(0.0, 1.0), min_size=GENOME_LENGTH, max_size=GENOME_LENGTH),
       st.sampled_from(["v1-qre", "v2-qre", "v1-mst", "v2-mst"]), st.integers(0, 2 ** 16))
def test_fitness_in_unit_interval(genes, variant, seed):
    data = blobs(4, 1)
    cfg = GaConfig(variant=variant, s=2, p=0.5)
    r = fitness(genes, data, data, cfg, np.random.SeedSequence(seed))
    assert 0.0 <= r.value <= 1.0
    assert 0.0 <= r.accuracy <= 1.0


def test_eta_one_gives_accuracy():
    data = blobs(5, 2)
    rng = np.random.default_rng(0)
    for _ in range(10):
        g = rng.random(GENOME_LENGTH)
        r = fitness(g, data, data, GaConfig(variant="v2-qre", eta=1.0, s=2))
        assert r.value == r.accuracy


def test_degenerate_genome_flagged():
    # MST entropy needs at least 19 training graphs as coordinates
    data = blobs(3, 3)
    r = fitness([0.5] * GENOME_LENGTH, data, data, GaConfig(variant="v2-mst", s=2))
    assert r.value == 0.0 and r.degenerate


def test_roulette_selection():
    fit = [1.0, 3.0, 0.0, 4.0]
    draws = [0.0, 0.1, 0.124, 0.125, 0.5, 0.499, 0.5, 0.99]
    assert roulette_select(fit, draws) == [0, 0, 0, 1, 3, 1, 3, 3]
    assert roulette_select([0, 0, 0], [0.0, 0.5, 0.99]) == [0, 1, 2]
    rng = np.random.default_rng(4)
    draws = rng.random(200)
    base = roulette_select(fit, draws)
    for c in (0.25, 2.0, 1024.0):
        assert roulette_select([f * c for f in fit], draws) == base


@given(st.lists(st.integers(0, 50), min_size=2, max_size=10), st.integers(-5, 5), st.integers(0, 1000))
def test_roulette_scale_invariant_powers_of_two(fit, exp, seed):
    draws = np.random.default_rng(seed).random(30)
    scaled = [math.ldexp(float(f), exp) for f in fit]
    assert roulette_select(scaled, draws) == roulette_select([float(f) for f in fit], draws)


def test_roulette_frequencies():
    fit = [1.0, 2.0, 7.0]
    picks = roulette_select(fit, np.random.default_rng(0).random(20000))
    freq = np.bincount(picks, minlength=3) / 20000
    assert np.allclose(freq, [0.1, 0.2, 0.7], atol=0.015)


def test_two_point_crossover():
    a, b = np.zeros(GENOME_LENGTH), np.ones(GENOME_LENGTH)
    c1, c2 = two_point_crossover(a, b, (7, 3))
    assert c1.tolist() == [0] * 3 + [1] * 4 + [0] * 5
    assert c2.tolist() == [1] * 3 + [0] * 4 + [1] * 5
    assert a.sum() == 0 and b.sum() == GENOME_LENGTH


def test_mutation_rates():
    rng = np.random.default_rng(0)
    g = np.full(GENOME_LENGTH, 0.5)
    assert np.array_equal(mutate(g, 0.0, rng), g)
    m = mutate(g, 1.0, rng)
    assert np.all(m != 0.5) and np.all((m >= 0) & (m < 1))
    changed = np.mean([np.mean(mutate(g, 0.1, rng) != g) for _ in range(2000)])
    assert abs(changed - 0.1) < 0.01


def small_cfg(**kw):
    base = dict(population_size=8, max_generations=6, stall_generations=4, variant="v2-qre", s=2, seed=11)
    base.update(kw)
    return GaConfig(**base)


def test_ga_deterministic_and_elitist():
    data = blobs(6, 4)
    train, val = data[:8], data[8:]
    r1 = ga_optimize(train, val, small_cfg(variant="v1-qre", p=0.5))
    r2 = ga_optimize(train, val, small_cfg(variant="v1-qre", p=0.5))
    assert r1.best_genome == r2.best_genome
    assert [h.best_fitness for h in r1.history] == [h.best_fitness for h in r2.history]
    best = [h.best_fitness for h in r1.history]
    assert all(b >= a for a, b in zip(best, best[1:]))
    assert len(r1.final_population) == 8
    assert max(r.value for _, r in r1.final_population) == r1.history[-1].best_fitness


def test_ga_threads_match_serial():
    cfg = small_cfg(variant="v1-mst", max_generations=3)
    big = letter_like_dataset(2, 10, 0.1, seed=0)
    serial = ga_optimize(big.train, big.validation, cfg)
    forked = ga_optimize(big.train, big.validation, cfg, threads=2)
    assert serial.best_genome == forked.best_genome
    assert [(h.best_fitness, h.mean_fitness) for h in serial.history] == \
        [(h.best_fitness, h.mean_fitness) for h in forked.history]
    assert not serial.best.degenerate


def test_identical_population_stops_on_stall():
    data = blobs(5, 6)
    cfg = small_cfg(mutation_rate=0.0, max_generations=50, stall_generations=3)
    pop = [np.full(GENOME_LENGTH, 0.4)] * cfg.population_size
    r = ga_optimize(data, data, cfg, initial_population=pop)
    assert len(r.history) == cfg.stall_generations + 1
    assert len({h.best_fitness for h in r.history}) == 1
    assert r.history[-1].stall == cfg.stall_generations
    with pytest.raises(ValueError):
        ga_optimize(data, data, cfg, initial_population=pop[:3])
    with pytest.raises(ValueError):
        ga_optimize([], data, cfg)


def test_ga_generation_cap():
    data = blobs(4, 7)
    r = ga_optimize(data, data, small_cfg(max_generations=2, stall_generations=100))
    assert [h.generation for h in r.history] == [0, 1]


def test_separable_problem_solved():
    train, val = blobs(10, 8), blobs(10, 9)
    r = ga_optimize(train, val, GaConfig(population_size=10, max_generations=10, variant="v2-qre", s=3, seed=0))
    assert r.best.accuracy == 1.0
    assert r.model.predict([g for g, _ in val]) == [c for _, c in val]


def test_model_json_round_trip():
    train = blobs(5, 10)
    r = ga_optimize(train, train, small_cfg(max_generations=2))
    text = json.dumps(r.model.to_json())
    back = OdseModel.from_json(json.loads(text))
    assert back.variant == "v2-qre" and back.genome == r.best_genome
    assert np.array_equal(back.embedding.vectors, r.model.embedding.vectors)
    probe = blobs(4, 12)
    assert back.predict([g for g, _ in probe]) == r.model.predict([g for g, _ in probe])
    assert np.array_equal(back.embed([g for g, _ in probe]), r.model.embed([g for g, _ in probe]))
    with pytest.raises(ValueError):
        OdseModel.from_json({"format": "other"})
