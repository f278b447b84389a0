from dataclasses import dataclass

import numpy as np
from scipy.stats import rankdata

from .core import ClassDistribution, DimensionMismatchError, ShapeMismatchError, SoftLabelError


class SingleClassError(SoftLabelError):
    """AUC is undefined when only one class is present."""


@dataclass(frozen=True)
class EvalResult:
    metric: str
    value: float
    n: int


def _probs(p):
    return p.probs if isinstance(p, ClassDistribution) else np.asarray(p, dtype=float)


def tvd(p, q):
    """Total variation distance: half the L1 distance between two distributions."""
    p, q = _probs(p), _probs(q)
    if p.shape != q.shape:
        raise DimensionMismatchError(f"distributions differ in shape: {p.shape} vs {q.shape}")
    return 0.5 * float(np.abs(p - q).sum())


def mean_tvd(preds, targets):
    preds = np.asarray(preds, dtype=float)
    targets = np.array([_probs(t) for t in targets]) if not isinstance(targets, np.ndarray) else targets
    if preds.shape != targets.shape or preds.ndim != 2:
        raise ShapeMismatchError(f"predictions {preds.shape} vs targets {targets.shape}")
    if preds.shape[0] == 0:
        raise ShapeMismatchError("need at least one instance")
    return float(np.mean(0.5 * np.abs(preds - targets).sum(axis=1)))


def binary_auc(scores, positive):
    """Mann-Whitney estimate of P(score_pos > score_neg), ties counting one half."""
    scores = np.asarray(scores, dtype=float)
    positive = np.asarray(positive, dtype=bool)
    n_pos = int(positive.sum())
    n_neg = positive.size - n_pos
    if n_pos == 0 or n_neg == 0:
        raise SingleClassError("AUC needs both positive and negative instances")
    ranks = rankdata(scores)
    u = ranks[positive].sum() - n_pos * (n_pos + 1) / 2
    return float(u / (n_pos * n_neg))


def auc(scores, labels, k=None):
    """AUC of an ``(n, k)`` score matrix against integer labels.

    Binary problems score on the class-1 column. With more classes this is
    the unweighted mean of one-vs-rest AUCs over the classes present in
    ``labels``.
    """
    scores = np.asarray(scores, dtype=float)
    labels = np.asarray(labels, dtype=int)
    if scores.ndim == 1:
        scores = np.column_stack([1 - scores, scores])
    k = scores.shape[1] if k is None else k
    if scores.shape != (labels.shape[0], k):
        raise ShapeMismatchError(f"scores {scores.shape} for {labels.shape[0]} labels and {k} classes")
    present = np.unique(labels)
    if present.size < 2:
        raise SingleClassError("AUC needs at least two classes in the labels")
    if k == 2:
        return binary_auc(scores[:, 1], labels == 1)
    return float(np.mean([binary_auc(scores[:, c], labels == c) for c in present]))
