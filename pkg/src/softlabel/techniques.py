"""Building blocks for the wrapper methods.

Each function takes an immutable dataset (or label) plus an explicit
``numpy.random.Generator`` and returns a new object; nothing is modified
in place.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .core import (
    AllZeroError,
    ClassDistribution,
    DegenerateDataError,
    PROB_TOL,
    OutOfRangeError,
    ShapeMismatchError,
    SoftDataset,
    WeightedHardDataset,
)


@dataclass(frozen=True)
class ThresholdRule:
    """Which low-confidence instances to drop.

    ``mode="percentile"`` drops the ``floor(value * n)`` instances with the
    lowest plurality probability; ``mode="bound"`` drops every instance
    whose plurality probability is below ``value``.
    """

    mode: str = "percentile"
    value: float = 0.1

    def __post_init__(self):
        if self.mode == "percentile":
            if not 0 <= self.value < 1:
                raise OutOfRangeError(f"percentile must lie in [0, 1), got {self.value}")
        elif self.mode == "bound":
            if not 0 < self.value <= 1:
                raise OutOfRangeError(f"bound must lie in [1/k, 1], got {self.value}")
        else:
            raise ValueError(f"unknown threshold mode {self.mode!r}")


def threshold_filter(data: SoftDataset, rule: ThresholdRule) -> SoftDataset:
    conf = data.labels.max(axis=1)
    n = len(data)
    if rule.mode == "percentile":
        # stable sort: equal confidences are dropped in index order
        drop = np.argsort(conf, kind="stable")[: math.floor(rule.value * n)]
        keep = np.setdiff1d(np.arange(n), drop)
    else:
        # a bound of exactly 1/k keeps everything: no plurality probability is lower
        if rule.value < 1 / data.class_count - PROB_TOL:
            raise OutOfRangeError(f"bound must be at least 1/k = {1 / data.class_count:.4g}")
        keep = np.nonzero(conf >= rule.value - PROB_TOL)[0]
    plurality = np.argmax(data.labels[keep], axis=1)
    if keep.size < 2 or np.unique(plurality).size < 2:
        raise DegenerateDataError(f"thresholding leaves {keep.size} instances in "
                                  f"{np.unique(plurality).size} plurality classes")
    return data.subset(keep)


def plurality_vote(label):
    """``(argmax class, its probability)``; ties go to the lowest class."""
    p = label.probs if isinstance(label, ClassDistribution) else np.asarray(label)
    c = int(np.argmax(p))
    return c, float(p[c])


def plurality_votes(labels):
    """Vectorised :func:`plurality_vote` over the rows of ``labels``."""
    labels = np.asarray(labels)
    c = np.argmax(labels, axis=1)
    return c, labels[np.arange(labels.shape[0]), c]


def bootstrap_sample(data, size=None, rng=None):
    """Indices drawn uniformly with replacement."""
    n = len(data)
    size = n if size is None else size
    if size < 1 or n < 1:
        raise OutOfRangeError("bootstrap needs a non-empty dataset and size >= 1")
    return rng.integers(0, n, size=size)


def weighted_sample(weights, size, rng):
    """``size`` indices drawn with replacement, proportional to ``weights``."""
    w = np.asarray(weights, dtype=float)
    if np.any(w < 0):
        raise OutOfRangeError("sampling weights must be non-negative")
    cdf = np.cumsum(w)
    if not cdf[-1] > 0:
        raise AllZeroError("no positive sampling weight")
    # u < cdf[-1], so the first cdf entry above u never belongs to a zero weight
    return np.searchsorted(cdf, rng.random(size) * cdf[-1], side="right")


def max_sample(data: SoftDataset, size=None, rng=None):
    """Indices drawn with replacement, proportional to each instance's plurality probability."""
    size = len(data) if size is None else size
    return weighted_sample(data.labels.max(axis=1), size, rng)


def duplicate(data: SoftDataset) -> WeightedHardDataset:
    """One weighted hard-labelled copy per class with non-zero probability.

    Copies keep the original row order: all copies of instance ``i`` come
    before those of ``i + 1``, in class order.
    """
    rows, classes = np.nonzero(data.labels > 0)
    return WeightedHardDataset(data.features[rows], classes, data.labels[rows, classes], data.class_count)


def duplicate_rows(labels):
    """Source row and class of each copy :func:`duplicate` would create."""
    return np.nonzero(np.asarray(labels) > 0)


def label_sample(label, rng):
    p = label.probs if isinstance(label, ClassDistribution) else np.asarray(label)
    return int(weighted_sample(p, 1, rng)[0])


def label_samples(labels, rng):
    """One class per row drawn from that row's distribution (inverse CDF)."""
    labels = np.asarray(labels)
    cdf = np.cumsum(labels, axis=1)
    u = rng.random(labels.shape[0]) * cdf[:, -1]
    return (u[:, None] >= cdf).sum(axis=1)


def average_probs(member_outputs):
    outs = [np.asarray(o, dtype=float) for o in member_outputs]
    if not outs:
        raise ShapeMismatchError("need at least one member output")
    if any(o.shape != outs[0].shape for o in outs):
        raise ShapeMismatchError(f"member outputs differ in shape: {sorted({o.shape for o in outs})}")
    return np.mean(outs, axis=0)
