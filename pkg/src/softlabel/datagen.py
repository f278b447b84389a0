"""Ground-truth and partial-ground-truth datasets built from a hard-labelled table.

A ground-truth model is fit on the raw data and its predictions replace the
original labels. Hiding features then turns those clean labels into soft
ones: the hidden columns are redrawn from a kernel density estimate many
times, and the vote frequencies of the ground-truth model become the label.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .classifiers import BaggedTrees, LogisticRegression, ProbabilisticClassifier
from .core import HardDataset, OutOfRangeError, SoftDataset, SoftLabelError, one_hot_matrix, substream, subseed
from .metrics import mean_tvd

GT_MODELS = ("LR", "bagged-DT")
DEFAULT_RESAMPLES = 1000
PERMUTATION_REPEATS = 5
# rows pushed through the ground-truth model at once while resampling
_BATCH_ROWS = 200_000


class TooFewFeaturesError(SoftLabelError):
    pass


@dataclass(frozen=True)
class GroundTruth:
    model: ProbabilisticClassifier
    dataset: HardDataset
    kind: str
    seed: int


@dataclass(frozen=True)
class PartialGroundTruth:
    visible: tuple
    hidden: tuple
    dataset: SoftDataset
    resamples: int
    mean_tvd: float


def _kind(model_kind):
    k = {"lr": "LR", "bagged-dt": "bagged-DT", "rf": "bagged-DT"}.get(str(model_kind).lower())
    if k is None:
        raise ValueError(f"unknown ground-truth model {model_kind!r}; choose from {GT_MODELS}")
    return k


def build_ground_truth(raw: HardDataset, model_kind="LR", seed=0, **params) -> GroundTruth:
    """Fit ``model_kind`` on ``raw`` and relabel every row with its prediction."""
    kind = _kind(model_kind)
    cls = LogisticRegression if kind == "LR" else BaggedTrees
    model = cls(n_classes=raw.class_count, random_state=subseed(seed, 0), **params)
    model.fit(raw.features, raw.labels)
    y = model.predict(raw.features)
    return GroundTruth(model, HardDataset(raw.features, y, raw.class_count, raw.feature_names), kind, int(seed))


def _permutation_importance(gt: GroundTruth, repeats=PERMUTATION_REPEATS):
    X, y = gt.dataset.features, gt.dataset.labels
    base = np.mean(gt.model.predict(X) == y)
    rng = substream(gt.seed, 1)
    drop = np.zeros(X.shape[1])
    for j in range(X.shape[1]):
        for _ in range(repeats):
            Xp = X.copy()
            Xp[:, j] = rng.permutation(Xp[:, j])
            drop[j] += base - np.mean(gt.model.predict(Xp) == y)
    return drop / repeats


def importance_scores(gt: GroundTruth):
    """Per-feature importance: mean |coefficient| for LR, permutation accuracy drop otherwise."""
    if gt.kind == "LR":
        return np.abs(gt.model.coef_).mean(axis=0)
    return _permutation_importance(gt)


def feature_importance(gt: GroundTruth):
    """Feature indices from least to most important; ties keep the lower index first."""
    return np.argsort(importance_scores(gt), kind="stable")


def kde_bandwidth(Z):
    """Diagonal kernel scale: Scott's factor times each column's standard deviation."""
    n, h = Z.shape
    return n ** (-1.0 / (h + 4)) * Z.std(axis=0, ddof=1)


def kde_sample(Z, size, rng):
    """``size`` joint draws from a Gaussian KDE over the rows of ``Z``."""
    bw = kde_bandwidth(Z)
    rows = rng.integers(0, Z.shape[0], size=size)
    return Z[rows] + rng.standard_normal((size, Z.shape[1])) * bw


def hide_features(gt: GroundTruth, hidden, resamples=DEFAULT_RESAMPLES, seed=0) -> PartialGroundTruth:
    """Soft labels from ``resamples`` redraws of the ``hidden`` columns.

    Every resample keeps each row's visible values, replaces its hidden
    values by a joint KDE draw, and records the ground-truth prediction.
    The returned dataset only carries the visible columns.
    """
    X = gt.dataset.features
    n, d = X.shape
    hidden = tuple(sorted({int(j) for j in hidden}))
    if not 1 <= len(hidden) <= d - 1 or hidden[0] < 0 or hidden[-1] >= d:
        raise OutOfRangeError(f"need between 1 and {d - 1} valid hidden features, got {hidden}")
    if resamples < 1:
        raise OutOfRangeError("resamples must be positive")
    visible = tuple(j for j in range(d) if j not in hidden)
    Z = X[:, hidden]
    k = gt.dataset.class_count
    counts = np.zeros((n, k))
    per_batch = max(1, _BATCH_ROWS // n)
    for start in range(0, resamples, per_batch):
        block = []
        for r in range(start, min(resamples, start + per_batch)):
            Xr = X.copy()
            Xr[:, hidden] = kde_sample(Z, n, substream(seed, r))
            block.append(Xr)
        pred = gt.model.predict(np.vstack(block)).reshape(-1, n)
        for row in pred:
            counts[np.arange(n), row] += 1
    P = counts / resamples
    names = tuple(gt.dataset.feature_names[j] for j in visible)
    data = SoftDataset(X[:, visible], P, k, names)
    tvd = mean_tvd(P, one_hot_matrix(gt.dataset.labels, k))
    return PartialGroundTruth(visible, hidden, data, int(resamples), tvd)


def prefix_sweep(gt: GroundTruth, resamples=DEFAULT_RESAMPLES, seed=0, order=None):
    """Hide the 1, 2, ..., d-1 least important features in turn."""
    order = feature_importance(gt) if order is None else np.asarray(order)
    return [hide_features(gt, order[:m], resamples, seed) for m in range(1, len(order))]


def select_uncertainty_levels(gt: GroundTruth, resamples=DEFAULT_RESAMPLES, seed=0):
    """``(low, high)`` partial ground truths nearest 1/3 and 2/3 of the TVD range.

    The range runs from hiding the least important feature to hiding all
    but the most important one.
    """
    d = gt.dataset.features.shape[1]
    if d < 3:
        raise TooFewFeaturesError(f"need at least 3 features, got {d}")
    sweep = prefix_sweep(gt, resamples, seed)
    tvds = np.array([p.mean_tvd for p in sweep])
    lo, hi = tvds[0], tvds[-1]
    gap_low = np.abs(tvds - (lo + (hi - lo) / 3))
    gap_high = np.abs(tvds - (lo + 2 * (hi - lo) / 3))
    # ties: the smaller prefix for the low setting, the larger one for high
    i_low = int(np.argmin(gap_low))
    i_high = len(tvds) - 1 - int(np.argmin(gap_high[::-1]))
    if i_low == i_high:
        # one prefix is nearest to both targets: it goes to the closer one and
        # the other setting takes its best prefix on the far side
        i = i_low
        if (gap_low[i] <= gap_high[i] and i + 1 < len(tvds)) or i == 0:
            i_high = i + 1 + int(np.argmin(gap_high[i + 1:]))
        else:
            i_low = int(np.argmin(gap_low[:i]))
    return sweep[i_low], sweep[i_high]
