"""Label noise for soft-labelled data.

Two transition-matrix models (``ncar``, ``nar``) and four miscalibration
curves. Every model computes a deterministic modified label and then mixes
it with the original using a random weight ``x ~ Normal(1, 0.5)``::

    noisy = normalize(clip(x * modified + (1 - x) * original, 0, 1))

Transition matrices follow ``T[i, j] = P(observed j | true i)``, so a soft
label ``p`` maps to ``T.T @ p``.
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass

import numpy as np

from .core import (
    ClassDistribution,
    DimensionMismatchError,
    OutOfRangeError,
    SoftDataset,
    substream,
)

log = logging.getLogger(__name__)

BLEND_MEAN = 1.0
BLEND_STD = 0.5
MAX_BETA = 0.3
LEVEL_STEP = 0.05
N_LEVELS = 7

# (sign, epsilon) of p + sign * beta / epsilon * sin(epsilon * pi * p)
MISCALIBRATION = {
    "overprediction": (1.0, 1),
    "underprediction": (-1.0, 1),
    "underextremity": (1.0, 2),
    "overextremity": (-1.0, 2),
}
NOISE_MODELS = ("ncar", "nar", *MISCALIBRATION)


def level_to_beta(level):
    """Noise level ``0..6`` to strength ``0.05 * level``."""
    if not 0 <= level < N_LEVELS or int(level) != level:
        raise OutOfRangeError(f"noise level must be an integer in 0..{N_LEVELS - 1}")
    return round(LEVEL_STEP * level, 10)


def _check_pe(p_e, k):
    if not 0 <= p_e <= 1:
        raise OutOfRangeError(f"p_e must lie in [0, 1], got {p_e}")
    if k < 2:
        raise OutOfRangeError("need at least two classes")


def ncar_matrix(p_e, k):
    """``1 - p_e`` on the diagonal, ``p_e / (k - 1)`` everywhere else."""
    _check_pe(p_e, k)
    T = np.full((k, k), p_e / (k - 1))
    np.fill_diagonal(T, 1 - p_e)
    return T


def nar_matrix(p_e, k, rng):
    """Like :func:`ncar_matrix`, but each row splits ``p_e`` by a flat Dirichlet draw."""
    _check_pe(p_e, k)
    T = np.zeros((k, k))
    for i in range(k):
        others = [j for j in range(k) if j != i]
        T[i, others] = p_e * rng.dirichlet(np.ones(k - 1))
        T[i, i] = 1 - p_e
    return T


def apply_transition(label, T):
    p = label.probs if isinstance(label, ClassDistribution) else np.asarray(label, dtype=float)
    T = np.asarray(T, dtype=float)
    if T.shape != (p.shape[-1], p.shape[-1]):
        raise DimensionMismatchError(f"transition matrix {T.shape} for {p.shape[-1]} classes")
    out = p @ T
    if isinstance(label, ClassDistribution):
        return ClassDistribution(out)
    return out


def blend(ori, mod, x):
    """Mix ``x * mod + (1 - x) * ori`` row-wise, truncate to [0, 1] and renormalise.

    Rows that truncate to all zeros fall back to ``ori``.
    """
    ori = np.asarray(ori, dtype=float)
    mod = np.asarray(mod, dtype=float)
    x = np.asarray(x, dtype=float)
    if ori.shape != mod.shape:
        raise DimensionMismatchError(f"labels differ in shape: {ori.shape} vs {mod.shape}")
    y = np.clip(x[..., None] * mod + (1 - x[..., None]) * ori, 0.0, 1.0)
    s = y.sum(axis=-1, keepdims=True)
    zero = s[..., 0] <= 0
    if np.any(zero):
        log.info("blend truncated %d label(s) to zero; keeping the original", int(np.sum(zero)))
        y = np.where(zero[..., None], ori, y)
        s = np.where(zero[..., None], ori.sum(axis=-1, keepdims=True), s)
    return y / s


def stochastic_blend(ori, mod, rng):
    x = rng.normal(BLEND_MEAN, BLEND_STD)
    return ClassDistribution(blend(_probs(ori), _probs(mod), x))


def _probs(label):
    return label.probs if isinstance(label, ClassDistribution) else np.asarray(label, dtype=float)


@dataclass(frozen=True)
class MiscalSpec:
    variant: str
    beta: float

    def __post_init__(self):
        variant = self.variant.lower()
        if variant not in MISCALIBRATION:
            raise ValueError(f"unknown miscalibration {self.variant!r}; choose from {sorted(MISCALIBRATION)}")
        object.__setattr__(self, "variant", variant)
        if not 0 <= self.beta <= MAX_BETA:
            raise OutOfRangeError(f"beta must lie in [0, {MAX_BETA}], got {self.beta}")


def miscalibrate_scalar(p, spec: MiscalSpec):
    """Distort a probability; vectorises over arrays of ``p``."""
    p_arr = np.asarray(p, dtype=float)
    if np.any(p_arr < 0) or np.any(p_arr > 1):
        raise OutOfRangeError("probability outside [0, 1]")
    sign, eps = MISCALIBRATION[spec.variant]
    out = np.clip(p_arr + sign * spec.beta / eps * np.sin(eps * math.pi * p_arr), 0.0, 1.0)
    # sin(eps * pi) is not exactly zero in floating point
    out = np.where((p_arr == 0) | (p_arr == 1), p_arr, out)
    return float(out) if np.ndim(p) == 0 else out


def miscalibrated_labels(P, spec: MiscalSpec):
    """Deterministic miscalibration of the plurality class of each row.

    The remaining mass is shared by the other classes in proportion to
    their original probabilities (evenly if they were all zero).
    """
    P = np.atleast_2d(np.asarray(P, dtype=float))
    rows = np.arange(P.shape[0])
    c = np.argmax(P, axis=1)
    top = P[rows, c]
    new_top = miscalibrate_scalar(top, spec)
    rest = 1 - top
    out = P.copy()
    out[rows, c] = 0.0
    k = P.shape[1]
    scale = np.divide(1 - new_top, rest, out=np.zeros_like(rest), where=rest > 0)
    out *= scale[:, None]
    even = rest <= 0
    if np.any(even):
        out[even] = ((1 - new_top[even]) / (k - 1))[:, None]
    out[rows, c] = new_top
    return out


def apply_miscalibration(label, spec: MiscalSpec, rng):
    ori = _probs(label)
    mod = miscalibrated_labels(ori, spec)[0]
    return stochastic_blend(ori, mod, rng)


def corrupt_labels(P, model, beta, seed):
    """Noisy copy of the soft-label matrix ``P``; see :func:`corrupt_dataset`."""
    P = np.asarray(P, dtype=float)
    model = model.lower()
    if not 0 <= beta <= MAX_BETA + 1e-12:
        raise OutOfRangeError(f"beta must lie in [0, {MAX_BETA}], got {beta}")
    beta = min(beta, MAX_BETA)
    if beta == 0:
        # every model is the identity at zero strength; skip the float round trip of the blend
        return P.copy()
    k = P.shape[1]
    if model == "ncar":
        mod = P @ ncar_matrix(beta, k)
    elif model == "nar":
        mod = P @ nar_matrix(beta, k, substream(seed, 0))
    elif model in MISCALIBRATION:
        mod = miscalibrated_labels(P, MiscalSpec(model, beta))
    else:
        raise ValueError(f"unknown noise model {model!r}; choose from {NOISE_MODELS}")
    x = substream(seed, 1).normal(BLEND_MEAN, BLEND_STD, size=P.shape[0])
    return blend(P, mod, x)


def corrupt_dataset(data: SoftDataset, model, beta, seed) -> SoftDataset:
    """Apply noise ``model`` with strength ``beta`` independently to every label.

    NCAR/NAR use one transition matrix per call (``p_e = beta``); the
    miscalibration models adjust each instance's plurality probability.
    Every instance gets its own blending weight.
    """
    noisy = corrupt_labels(data.labels, model, beta, seed)
    return SoftDataset(data.features, noisy, data.class_count, data.feature_names)
