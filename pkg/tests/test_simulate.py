import numpy as np
import pytest
from scipy.stats import binom, multivariate_normal

from softlabel.core import ClassDistribution, OutOfRangeError
from softlabel.simulate import (
    GaussianSimConfig,
    ZeroWeightError,
    _draw_classes,
    add_soft_noise,
    estimate_means,
    posterior_c1,
    run_delta_mse,
    sample_gaussian_mixture,
    true_posterior,
)


def test_config_validation():
    with pytest.raises(OutOfRangeError):
        GaussianSimConfig(priors=(0.7,))
    with pytest.raises(OutOfRangeError):
        GaussianSimConfig(sample_sizes=(3,))
    assert GaussianSimConfig(priors=0.2).priors == (0.2,)


def test_every_batch_has_two_of_each_class():
    c = _draw_classes(0.05, (2000, 4), np.random.default_rng(0))
    n1 = c.sum(axis=1)
    assert np.all((n1 >= 2) & (4 - n1 >= 2))


def test_class_fraction_matches_prior():
    cfg = GaussianSimConfig(priors=(0.3,))
    _, cls = sample_gaussian_mixture(cfg, 100_000, np.random.default_rng(1))
    assert abs(cls.mean() - 0.3) < 3 * np.sqrt(0.21 / 100_000)


def test_sampling_is_seeded():
    cfg = GaussianSimConfig()
    a = sample_gaussian_mixture(cfg, 10, np.random.default_rng(5))
    b = sample_gaussian_mixture(cfg, 10, np.random.default_rng(5))
    assert np.array_equal(a[0], b[0]) and np.array_equal(a[1], b[1])


def test_posterior_values():
    cfg = GaussianSimConfig(priors=(0.5,))
    assert np.allclose(true_posterior([0, 0], cfg).probs, [0.5, 0.5])
    assert true_posterior(cfg.mu1, cfg).probs[0] == pytest.approx(1 / (1 + np.exp(-1)), abs=1e-12)
    assert posterior_c1(np.array([3.0, 3.0]), cfg, prior1=1e-300) < 1e-250
    flat = GaussianSimConfig(d=0.0, priors=(0.2,))
    assert np.allclose(posterior_c1(np.random.default_rng(0).standard_normal((5, 2)), flat), 0.2)


def test_posterior_matches_density_ratio():
    rng = np.random.default_rng(3)
    for prior in (0.1, 0.3, 0.5):
        cfg = GaussianSimConfig(priors=(prior,), d=0.7, dims=3)
        x = rng.standard_normal((20, 3)) * 2
        a = prior * multivariate_normal(cfg.mu1, np.eye(3)).pdf(x)
        b = (1 - prior) * multivariate_normal(cfg.mu2, np.eye(3)).pdf(x)
        assert np.allclose(posterior_c1(x, cfg), a / (a + b), atol=1e-10, rtol=0)


def test_soft_noise():
    rng = np.random.default_rng(0)
    p = ClassDistribution([0.3, 0.7])
    assert add_soft_noise(p, 0.0, rng) == p

    class Plus1:
        def normal(self, loc, scale, size=None):
            return np.ones(size) if size else 1.0

    assert add_soft_noise(ClassDistribution([0.5, 0.5]), 0.1, Plus1()).probs.tolist() == [1, 0]
    draws = add_soft_noise(np.tile([0.4, 0.6], (10_000, 1)), 0.1, rng)
    assert abs(draws[:, 0].mean() - 0.4) < 3 * 0.1 / np.sqrt(10_000)
    assert np.allclose(draws.sum(axis=1), 1)


def test_estimate_means():
    pts = np.array([[0.0, 0.0], [2, 2], [4, 4]])
    hard = np.array([0, 1, 0])
    assert np.array_equal(estimate_means(pts, hard)[0], estimate_means(pts, np.eye(2)[hard])[0])
    assert estimate_means(pts[:2], np.array([[1.0, 0], [0, 1]]))[0].tolist() == [0, 0]
    assert np.allclose(estimate_means(np.array([[0.0, 0], [4, 4]]), np.array([[0.75, 0.25], [0.25, 0.75]]))[0], [1, 1])
    with pytest.raises(ZeroWeightError):
        estimate_means(pts, np.array([0, 0, 0]))


def test_soft_labels_win_without_noise():
    cfg = GaussianSimConfig(priors=(0.5,), sample_sizes=(10,), repeats=10_000)
    c = run_delta_mse(cfg, 0)[0]
    assert c.delta_mse[0] + 2 * c.stderr[0] < 0


def test_degenerate_distance_matches_closed_form():
    # with d = 0 every soft weight equals the prior, so the soft estimate averages
    # all n points (MSE 1/n) while the hard one averages the n1 class-one points (1/n1)
    n = 10
    cfg = GaussianSimConfig(d=0.0, priors=(0.5,), sample_sizes=(n,), repeats=20_000)
    c = run_delta_mse(cfg, 1)[0]
    k = np.arange(2, n - 1)
    pk = binom.pmf(k, n, 0.5)
    expected = 1 / n - np.sum(pk / k) / pk.sum()
    assert abs(c.delta_mse[0] - expected) < 3 * c.stderr[0]


def test_run_is_seeded_per_cell():
    a = run_delta_mse(GaussianSimConfig(priors=(0.3,), sample_sizes=(4, 20), repeats=200), 9)[0]
    b = run_delta_mse(GaussianSimConfig(priors=(0.3,), sample_sizes=(20,), repeats=200), 9)[0]
    assert a.delta_mse[0] != b.delta_mse[0]
    c = run_delta_mse(GaussianSimConfig(priors=(0.3,), sample_sizes=(4, 20), repeats=200), 9)[0]
    assert a.delta_mse == c.delta_mse


def test_noisy_run_stays_finite():
    cfg = GaussianSimConfig(priors=(0.1,), sample_sizes=(4, 6), repeats=3000, noise_sigma=0.1)
    c = run_delta_mse(cfg, 2)[0]
    assert np.all(np.isfinite(c.delta_mse))
