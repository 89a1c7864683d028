import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays
from scipy.sparse.csgraph import minimum_spanning_tree
from scipy.spatial.distance import pdist, squareform

from odse import entropy
from odse.bench import mst_brute_force, prufer_trees, qre_double_sum
from odse.entropy import (
    DimensionTooSmallError,
    EntropyConfigError,
    MstReConfig,
    QreConfig,
    alpha_of_gamma,
    beta_approx,
    information_potential,
    mst_edges,
    mst_length,
    mst_renyi_normalized,
    mst_renyi_normalizer,
    qre_joint,
    qre_scalar,
    sigma_upper_bound,
)

# frozen from 40-digit evaluations
SIGMA_MAX = 3.397287201152076
TWO_POINT_H = 0.4918622564670068       # {0, 1.3}, sigma 0.7
MST_K10_M50 = 0.6842452771672342       # seed 2024 sample, gamma 1

samples = arrays(np.float64, st.tuples(st.integers(1, 12), st.integers(1, 6)), elements=st.floats(0.0, 2.0))


def test_sigma_upper_bound():
    assert sigma_upper_bound() == pytest.approx(SIGMA_MAX, rel=1e-15)
    assert round(sigma_upper_bound(), 4) == 3.3973
    assert sigma_upper_bound() ** 2 * math.log(2) == pytest.approx(8.0, abs=1e-12)


def test_identical_vectors_have_zero_entropy():
    x = np.tile([0.3, 1.7, 0.0], (7, 1))
    assert information_potential(x, 0.5) == 1.0
    assert qre_joint(x, QreConfig(0.5)) == 0.0
    assert qre_scalar(np.full(40, 1.1), QreConfig(0.2)) == 0.0


def test_two_point_sample():
    c, s = 1.3, 0.7
    v = (2 + 2 * math.exp(-c * c / (4 * s * s))) / 4
    h = qre_joint(np.array([[0.0], [c]]), QreConfig(s))
    assert h == pytest.approx(-math.log2(v), rel=1e-14)
    assert h == pytest.approx(TWO_POINT_H, rel=1e-14)


def test_spread_sample_saturates():
    x = np.linspace(0.0, 2.0, 200)[:, None]
    assert qre_joint(x, QreConfig(0.01)) == 1.0


def test_scalar_matches_joint_and_oracle():
    rng = np.random.default_rng(11)
    col = rng.uniform(0, 2, 50)
    cfg = QreConfig(0.3)
    assert qre_scalar(col, cfg) == qre_joint(col[:, None], cfg)
    ref = qre_double_sum(col[:, None], 0.3)
    assert abs(qre_scalar(col, cfg) - ref) <= 1e-12 * ref


def test_joint_against_double_sum():
    rng = np.random.default_rng(3)
    for _ in range(25):
        k, m = int(rng.integers(2, 15)), int(rng.integers(1, 10))
        x = rng.uniform(0, 2, (k, m))
        sigma = float(rng.uniform(0.05, SIGMA_MAX))
        ref = qre_double_sum(x, sigma)
        assert abs(qre_joint(x, QreConfig(sigma)) - ref) <= 1e-12 * max(ref, 1e-300)


def test_qre_config_errors():
    for bad in (0.0, -1.0, SIGMA_MAX * 1.0001):
        with pytest.raises(EntropyConfigError):
            QreConfig(bad)
    QreConfig(sigma_upper_bound())
    with pytest.raises(ValueError):
        qre_joint(np.empty((0, 3)), QreConfig(1.0))


@given(samples, st.floats(0.05, SIGMA_MAX), st.randoms(use_true_random=False))
def test_qre_bounded_and_permutation_invariant(x, sigma, rnd):
    cfg = QreConfig(sigma)
    h = qre_joint(x, cfg)
    assert 0.0 <= h <= 1.0
    rows = list(range(x.shape[0]))
    cols = list(range(x.shape[1]))
    rnd.shuffle(rows)
    rnd.shuffle(cols)
    assert qre_joint(x[rows][:, cols], cfg) == pytest.approx(h, rel=1e-12, abs=1e-15)


def test_mst_length_simple_topologies():
    assert mst_length(np.array([[0.0, 0.0], [0.6, 0.8]]), 2.5) == pytest.approx(1.0)
    assert mst_length(np.array([[0.0], [0.4]]), 3.0) == pytest.approx(0.4 ** 3, rel=1e-15)
    h, n, gamma = 0.3, 9, 1.7
    line = np.arange(n)[:, None] * h
    assert mst_length(line, gamma) == pytest.approx((n - 1) * h ** gamma, rel=1e-14)
    assert sorted((a, b) for a, b, _ in mst_edges(line)) == [(i, i + 1) for i in range(n - 1)]


def test_mst_ties_break_by_endpoints():
    square = np.array([[0.0, 0.0], [1.0, 0.0], [0.0, 1.0], [1.0, 1.0]])
    assert [(a, b) for a, b, _ in mst_edges(square)] == [(0, 1), (0, 2), (1, 3)]


def test_mst_length_against_all_spanning_trees():
    assert sum(1 for _ in prufer_trees(5)) == 125
    rng = np.random.default_rng(5)
    for _ in range(20):
        x = rng.uniform(0, 2, (5, 2))
        gamma = float(rng.uniform(0.2, 3.0))
        assert mst_length(x, gamma) == mst_brute_force(x, gamma)


def test_mst_length_errors():
    with pytest.raises(ValueError):
        mst_length(np.zeros((1, 3)), 1.0)
    with pytest.raises(EntropyConfigError):
        mst_length(np.zeros((3, 3)), 3.5)


@given(arrays(np.float64, st.tuples(st.integers(2, 7), st.integers(1, 4)), elements=st.floats(0.0, 2.0)),
       st.floats(0.1, 3.0), st.randoms(use_true_random=False))
def test_mst_length_permutation_invariant(x, gamma, rnd):
    rows = list(range(len(x)))
    rnd.shuffle(rows)
    assert mst_length(x[rows], gamma) == pytest.approx(mst_length(x, gamma), rel=1e-12, abs=1e-300)


def test_alpha_beta_hand_values():
    assert alpha_of_gamma(3, 100) == pytest.approx(0.97, abs=1e-15)
    assert alpha_of_gamma(1, 2) == 0.5
    assert beta_approx(2, 2 * math.pi * math.e * math.e) == pytest.approx(1.0, abs=1e-12)
    assert beta_approx(1.5, 200) == pytest.approx(0.75 * math.log(200 / (2 * math.pi * math.e)), abs=1e-12)
    with pytest.raises(EntropyConfigError):
        alpha_of_gamma(3, 3)
    with pytest.raises(DimensionTooSmallError):
        beta_approx(1, 17)


@given(st.floats(1.0, 500.0), st.floats(1e-3, 0.999), st.floats(0.5, 4.0))
def test_alpha_in_unit_interval_and_scale_free(dim, frac, scale):
    gamma = frac * dim
    a = alpha_of_gamma(gamma, dim)
    assert 0.0 < a < 1.0
    assert alpha_of_gamma(gamma * scale, dim * scale) == pytest.approx(a, rel=1e-12)


def test_normalizer_attained_by_diagonal_pair():
    m = 20
    x = np.vstack([np.zeros(m), np.full(m, 2.0)])
    assert mst_renyi_normalized(x, MstReConfig(1.3)) == pytest.approx(1.0, abs=1e-12)


def _mst_entropy_from_scratch(x, gamma, extent=2.0):
    k, m = x.shape
    tree = minimum_spanning_tree(squareform(pdist(x))).toarray()
    length = float(np.sum(tree[tree > 0] ** gamma))
    alpha = (m - gamma) / m
    beta = gamma / 2 * math.log(m / (2 * math.pi * math.e))
    raw = m / gamma * (math.log(length) - alpha * math.log(k) - math.log(beta))
    iota = m / gamma * (math.log(k - 1) + gamma * math.log(extent * math.sqrt(m)) - alpha * math.log(k)
                        - math.log(beta))
    return min(1.0, max(0.0, raw / iota))


def test_mst_entropy_independent_reimplementation():
    x = np.random.default_rng(2024).uniform(0, 2, (10, 50))
    got = mst_renyi_normalized(x, MstReConfig(1.0))
    assert got == pytest.approx(MST_K10_M50, rel=1e-12)
    assert got == pytest.approx(_mst_entropy_from_scratch(x, 1.0), rel=1e-12)
    rng = np.random.default_rng(9)
    for _ in range(20):
        k, m = int(rng.integers(2, 30)), int(rng.integers(19, 120))
        gamma = float(rng.uniform(0.05, 3.0))
        x = rng.uniform(0, 2, (k, m)) * rng.uniform(0.05, 1.0)
        assert mst_renyi_normalized(x, MstReConfig(gamma)) == pytest.approx(
            _mst_entropy_from_scratch(x, gamma), rel=1e-12, abs=1e-12)


def test_mst_entropy_guards():
    with pytest.raises(DimensionTooSmallError):
        mst_renyi_normalized(np.zeros((3, 18)) + np.arange(3)[:, None], MstReConfig(1.0))
    with pytest.raises(ValueError):
        mst_renyi_normalized(np.zeros((1, 30)), MstReConfig(1.0))
    with pytest.raises(EntropyConfigError):
        MstReConfig(0.0)
    assert mst_renyi_normalized(np.zeros((4, 25)), MstReConfig(2.0)) == 0.0
    assert entropy.MIN_MST_DIM == 19
    assert mst_renyi_normalizer(5, 40, 1.0) > 0


def test_clip_counter_records_overshoot():
    before = entropy.clip_counts["qre"]
    qre_joint(np.linspace(0.0, 2.0, 200)[:, None], QreConfig(0.01))
    assert entropy.clip_counts["qre"] == before + 1


@given(st.integers(2, 12), st.integers(19, 60), st.floats(0.1, 3.0), st.integers(0, 2 ** 32 - 1))
def test_mst_entropy_nondecreasing_under_dilation(k, m, gamma, seed):
    x = np.random.default_rng(seed).uniform(0, 0.2, (k, m))
    cfg = MstReConfig(gamma)
    values = [mst_renyi_normalized(x * f, cfg) for f in (1.0, 1.5, 3.0, 6.0, 10.0)]
    assert all(b >= a - 1e-12 for a, b in zip(values, values[1:]))
    assert all(0.0 <= v <= 1.0 for v in values)
