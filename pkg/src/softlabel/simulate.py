"""Mean estimation from soft versus hard labels on two symmetric Gaussians.

Class one is drawn from ``N((d, ..., d), I)`` and class two from
``N((-d, ..., -d), I)``. The soft label of a point is its exact posterior
``[p_C1, p_C2]``; the hard label is the component it was drawn from. For
each sample size the squared error of the class-one mean estimate is
averaged over many repeats and reported as ``mse_soft - mse_hard``.

Within the returned soft-label arrays column 0 is class one.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.special import expit

from .core import ClassDistribution, OutOfRangeError, SoftLabelError, substream

MAX_ATTEMPTS = 10 ** 6
# cap on points drawn at once; repeats are processed in chunks below this
_CHUNK_POINTS = 2_000_000


class ZeroWeightError(SoftLabelError):
    pass


@dataclass(frozen=True)
class GaussianSimConfig:
    d: float = 0.5
    dims: int = 2
    priors: tuple = (0.5,)
    sample_sizes: tuple = (4, 10, 30, 100, 1000)
    repeats: int = 10_000
    noise_sigma: float = 0.0

    def __post_init__(self):
        priors = (self.priors,) if np.isscalar(self.priors) else tuple(self.priors)
        object.__setattr__(self, "priors", tuple(float(p) for p in priors))
        object.__setattr__(self, "sample_sizes", tuple(int(n) for n in self.sample_sizes))
        if any(not 0 < p <= 0.5 for p in self.priors):
            raise OutOfRangeError("priors must lie in (0, 0.5]")
        if any(n < 4 for n in self.sample_sizes):
            raise OutOfRangeError("sample sizes must be at least 4")
        if self.repeats < 1 or self.dims < 1 or self.noise_sigma < 0:
            raise OutOfRangeError("repeats and dims must be positive, noise_sigma non-negative")

    @property
    def mu1(self):
        return np.full(self.dims, self.d)

    @property
    def mu2(self):
        return np.full(self.dims, -self.d)


@dataclass
class DeltaMseCurve:
    prior: float
    sample_sizes: list = field(default_factory=list)
    delta_mse: list = field(default_factory=list)
    stderr: list = field(default_factory=list)
    repeats: int = 0


def _draw_classes(prior1, shape, rng):
    """Boolean "is class one" draws; each row holds >= 2 of both classes."""
    is_c1 = rng.random(shape) < prior1
    n = shape[-1]
    attempts = 0
    while True:
        c1 = is_c1.sum(axis=-1)
        bad = (c1 < 2) | (n - c1 < 2)
        if not bad.any():
            return is_c1
        # every offending row gets one more attempt per round
        attempts += 1
        if attempts > MAX_ATTEMPTS:
            raise RuntimeError(f"could not draw two points of each class in {MAX_ATTEMPTS} attempts")
        # whole-batch rejection: the offending rows are redrawn from scratch
        is_c1[bad] = rng.random((int(bad.sum()), n)) < prior1


def sample_gaussian_mixture(cfg: GaussianSimConfig, n_samples, rng, prior1=None):
    """``(points, is_class_one)`` for one batch of ``n_samples`` points."""
    if n_samples < 4:
        raise OutOfRangeError("need at least 4 samples")
    prior1 = cfg.priors[0] if prior1 is None else prior1
    pts, cls = _sample_batches(cfg, prior1, n_samples, 1, rng)
    return pts[0], cls[0]


def _sample_batches(cfg, prior1, n, repeats, rng):
    is_c1 = _draw_classes(prior1, (repeats, n), rng)
    means = np.where(is_c1[..., None], cfg.d, -cfg.d)
    return means + rng.standard_normal((repeats, n, cfg.dims)), is_c1


def posterior_c1(x, cfg: GaussianSimConfig, prior1=None):
    """``p(C1 | x)`` for points ``x`` of shape ``(..., dims)``.

    With identity covariances the log-odds are affine in ``x``:
    ``log(p1 / p2) + x @ (mu1 - mu2)``.
    """
    prior1 = cfg.priors[0] if prior1 is None else prior1
    x = np.asarray(x, dtype=float)
    with np.errstate(divide="ignore"):
        log_prior = np.log(prior1) - np.log1p(-prior1)
    return expit(log_prior + x @ (cfg.mu1 - cfg.mu2))


def true_posterior(x, cfg: GaussianSimConfig, prior1=None):
    p1 = float(posterior_c1(x, cfg, prior1))
    return ClassDistribution([p1, 1 - p1])


def add_soft_noise(label, sigma, rng):
    """Shift ``p_C1`` by ``Normal(0, sigma)`` noise, clamp to [0, 1], set ``p_C2 = 1 - p_C1``."""
    p = label.probs if isinstance(label, ClassDistribution) else np.asarray(label, dtype=float)
    if p.shape[-1] != 2:
        raise OutOfRangeError("soft noise is defined for binary labels only")
    p1 = np.clip(p[..., 0] + rng.normal(0.0, sigma, size=p.shape[:-1]), 0.0, 1.0)
    out = np.stack([p1, 1 - p1], axis=-1)
    return ClassDistribution(out) if isinstance(label, ClassDistribution) else out


def estimate_means(points, labels):
    """Per-class means from soft ``(n, 2)`` weights or hard labels (0 = class one)."""
    points = np.asarray(points, dtype=float)
    labels = np.asarray(labels)
    if labels.ndim == 1:
        W = np.column_stack([labels == 0, labels == 1]).astype(float)
    else:
        W = labels.astype(float)
    tot = W.sum(axis=0)
    if np.any(tot <= 0):
        raise ZeroWeightError("a class has zero total weight")
    mu = (W.T @ points) / tot[:, None]
    return mu[0], mu[1]


def _noisy_weights(p1, sigma, rng):
    """Noised class-one probabilities; rows whose weights all clamp to zero are redrawn."""
    clean = p1
    p1 = np.clip(clean + rng.normal(0.0, sigma, size=clean.shape), 0.0, 1.0)
    for _ in range(MAX_ATTEMPTS):
        bad = p1.sum(axis=1) <= 0
        if not bad.any():
            return p1
        p1[bad] = np.clip(clean[bad] + rng.normal(0.0, sigma, size=(int(bad.sum()), clean.shape[1])), 0.0, 1.0)
    raise RuntimeError("noisy soft labels kept summing to zero")


def _cell(cfg, prior1, n, rng):
    """Per-repeat squared-error differences for one (prior, sample size) cell."""
    diffs = []
    chunk = max(1, _CHUNK_POINTS // (n * cfg.dims))
    done = 0
    while done < cfg.repeats:
        r = min(chunk, cfg.repeats - done)
        pts, is_c1 = _sample_batches(cfg, prior1, n, r, rng)
        p1 = posterior_c1(pts, cfg, prior1)
        if cfg.noise_sigma > 0:
            p1 = _noisy_weights(p1, cfg.noise_sigma, rng)
        soft = np.einsum("rn,rnd->rd", p1, pts) / p1.sum(axis=1)[:, None]
        h = is_c1.astype(float)
        hard = np.einsum("rn,rnd->rd", h, pts) / h.sum(axis=1)[:, None]
        mse_soft = np.mean((soft - cfg.mu1) ** 2, axis=1)
        mse_hard = np.mean((hard - cfg.mu1) ** 2, axis=1)
        diffs.append(mse_soft - mse_hard)
        done += r
    return np.concatenate(diffs)


def run_delta_mse(cfg: GaussianSimConfig, seed):
    """One :class:`DeltaMseCurve` per prior in ``cfg``.

    Each (prior, sample size) cell has its own random stream, so cells can
    be recomputed independently.
    """
    curves = []
    for i, prior1 in enumerate(cfg.priors):
        curve = DeltaMseCurve(prior1, repeats=cfg.repeats)
        for j, n in enumerate(cfg.sample_sizes):
            d = _cell(cfg, prior1, n, substream(seed, i, j))
            curve.sample_sizes.append(n)
            curve.delta_mse.append(float(d.mean()))
            curve.stderr.append(float(d.std(ddof=1) / np.sqrt(len(d))) if len(d) > 1 else float("nan"))
        curves.append(curve)
    return curves
