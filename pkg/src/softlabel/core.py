"""Label types and conversions shared by the rest of the package.

Soft labels are stored as rows of an ``(n, k)`` float array; a single soft
label is a :class:`ClassDistribution`. Classes are the integers ``0..k-1``.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

PROB_TOL = 1e-9
# inputs this close to a valid distribution are silently renormalised
RENORM_TOL = 1e-6


class SoftLabelError(ValueError):
    """Base class for validation errors raised by this package."""


class AllZeroError(SoftLabelError):
    pass


class OutOfRangeError(SoftLabelError):
    pass


class InvalidDistributionError(SoftLabelError):
    pass


class DimensionMismatchError(SoftLabelError):
    pass


class ShapeMismatchError(SoftLabelError):
    pass


class NotFittedError(RuntimeError):
    pass


class DegenerateDataError(SoftLabelError):
    pass


def _readonly(a):
    a = np.array(a, dtype=float)
    a.setflags(write=False)
    return a


@dataclass(frozen=True)
class ClassDistribution:
    """A probability vector over ``k >= 2`` classes."""

    probs: np.ndarray

    def __post_init__(self):
        p = check_distribution(np.asarray(self.probs, dtype=float))
        object.__setattr__(self, "probs", _readonly(p))

    @property
    def k(self):
        return self.probs.shape[0]

    def __eq__(self, other):
        if not isinstance(other, ClassDistribution):
            return NotImplemented
        return np.array_equal(self.probs, other.probs)

    def __hash__(self):
        return hash(self.probs.tobytes())

    def __repr__(self):
        return f"ClassDistribution({self.probs.tolist()})"


def check_distribution(p, tol=RENORM_TOL):
    """Validate a probability vector (or rows of a matrix) and renormalise.

    Rows within ``tol`` of summing to one are rescaled to sum to one
    exactly; anything further off raises :class:`InvalidDistributionError`.
    """
    p = np.array(p, dtype=float)
    if p.shape[-1] < 2:
        raise InvalidDistributionError("need at least two classes")
    if not np.all(np.isfinite(p)):
        raise InvalidDistributionError("non-finite probability")
    if np.any(p < -tol) or np.any(p > 1 + tol):
        raise InvalidDistributionError("probability outside [0, 1]")
    p = np.clip(p, 0.0, 1.0)
    s = p.sum(axis=-1, keepdims=True)
    if np.any(np.abs(s - 1.0) > tol):
        raise InvalidDistributionError(f"probabilities sum to {np.ravel(s)[np.argmax(np.abs(np.ravel(s) - 1))]!r}, not 1")
    # rows already within PROB_TOL are kept bit-for-bit so validation is idempotent
    return np.where(np.abs(s - 1.0) > PROB_TOL, p / s, p)


def normalize(raw):
    """Truncate ``raw`` to [0, 1] and rescale it to sum to one."""
    v = np.clip(np.asarray(raw, dtype=float), 0.0, 1.0)
    total = v.sum()
    if not total > 0:
        raise AllZeroError("label truncates to the zero vector")
    return ClassDistribution(v / total)


def one_hot(label, k):
    if not 0 <= label < k:
        raise OutOfRangeError(f"label {label} not in [0, {k})")
    p = np.zeros(k)
    p[label] = 1.0
    return ClassDistribution(p)


def one_hot_matrix(labels, k):
    labels = np.asarray(labels, dtype=int)
    if labels.size and (labels.min() < 0 or labels.max() >= k):
        raise OutOfRangeError(f"labels must lie in [0, {k})")
    out = np.zeros((labels.shape[0], k))
    out[np.arange(labels.shape[0]), labels] = 1.0
    return out


def confidence_to_soft(label, confidence):
    """Turn a binary hard label plus a 5..10 confidence score into a soft label.

    The asserted class receives ``confidence / 10`` of the mass.
    """
    if label not in (0, 1):
        raise OutOfRangeError(f"binary label expected, got {label}")
    if int(confidence) != confidence or not 5 <= confidence <= 10:
        raise OutOfRangeError(f"confidence {confidence} not in 5..10")
    c = confidence / 10
    return ClassDistribution([c, 1 - c] if label == 0 else [1 - c, c])


def argmax_lowest(p):
    """Row-wise argmax; ties go to the lowest class index (numpy's rule)."""
    return np.argmax(np.asarray(p), axis=-1)


@dataclass(frozen=True, eq=False)
class SoftDataset:
    features: np.ndarray
    labels: np.ndarray
    class_count: int = field(default=None)
    feature_names: tuple = field(default=None)

    def __post_init__(self):
        X = np.asarray(self.features, dtype=float)
        if X.ndim != 2:
            raise DimensionMismatchError("features must be a 2-d matrix")
        P = check_distribution(np.atleast_2d(self.labels))
        if P.shape[0] != X.shape[0]:
            raise DimensionMismatchError(f"{P.shape[0]} labels for {X.shape[0]} rows")
        k = P.shape[1] if self.class_count is None else self.class_count
        if P.shape[1] != k:
            raise DimensionMismatchError(f"labels have {P.shape[1]} classes, expected {k}")
        object.__setattr__(self, "features", _readonly(X))
        object.__setattr__(self, "labels", _readonly(P))
        object.__setattr__(self, "class_count", int(k))
        object.__setattr__(self, "feature_names", _names(self.feature_names, X.shape[1]))

    def __len__(self):
        return self.features.shape[0]

    def label(self, i):
        return ClassDistribution(self.labels[i])

    def subset(self, idx):
        idx = np.asarray(idx, dtype=int)
        return SoftDataset(self.features[idx], self.labels[idx], self.class_count, self.feature_names)


@dataclass(frozen=True, eq=False)
class HardDataset:
    features: np.ndarray
    labels: np.ndarray
    class_count: int = field(default=None)
    feature_names: tuple = field(default=None)

    def __post_init__(self):
        X = np.asarray(self.features, dtype=float)
        y = np.asarray(self.labels)
        if X.ndim != 2:
            raise DimensionMismatchError("features must be a 2-d matrix")
        if y.shape != (X.shape[0],):
            raise DimensionMismatchError(f"{y.shape} labels for {X.shape[0]} rows")
        if y.size and not np.all(y == np.round(y)):
            raise OutOfRangeError("labels must be integers")
        y = y.astype(int)
        k = (int(y.max()) + 1 if y.size else 2) if self.class_count is None else int(self.class_count)
        k = max(k, 2)
        if y.size and (y.min() < 0 or y.max() >= k):
            raise OutOfRangeError(f"labels must lie in [0, {k})")
        y.setflags(write=False)
        object.__setattr__(self, "features", _readonly(X))
        object.__setattr__(self, "labels", y)
        object.__setattr__(self, "class_count", k)
        object.__setattr__(self, "feature_names", _names(self.feature_names, X.shape[1]))

    def __len__(self):
        return self.features.shape[0]

    def subset(self, idx):
        idx = np.asarray(idx, dtype=int)
        return HardDataset(self.features[idx], self.labels[idx], self.class_count, self.feature_names)


@dataclass(frozen=True, eq=False)
class WeightedHardDataset:
    features: np.ndarray
    labels: np.ndarray
    weights: np.ndarray
    class_count: int = field(default=None)

    def __post_init__(self):
        hard = HardDataset(self.features, self.labels, self.class_count)
        w = np.asarray(self.weights, dtype=float)
        if w.shape != hard.labels.shape:
            raise DimensionMismatchError("weights and labels differ in length")
        if np.any(w < 0) or not np.all(np.isfinite(w)):
            raise OutOfRangeError("weights must be finite and non-negative")
        if w.size and not np.any(w > 0):
            raise DegenerateDataError("all weights are zero")
        object.__setattr__(self, "features", hard.features)
        object.__setattr__(self, "labels", hard.labels)
        object.__setattr__(self, "weights", _readonly(w))
        object.__setattr__(self, "class_count", hard.class_count)

    def __len__(self):
        return self.features.shape[0]

    @classmethod
    def unit(cls, features, labels, class_count):
        return cls(features, labels, np.ones(len(labels)), class_count)


def _names(names, d):
    if names is None:
        return tuple(f"f_{j}" for j in range(d))
    names = tuple(names)
    if len(names) != d:
        raise DimensionMismatchError(f"{len(names)} feature names for {d} columns")
    return names


def substream(seed, *keys):
    """Independent generator for ``(seed, *keys)``.

    Streams derived from distinct key tuples are statistically independent,
    so work can be scheduled in any order without changing results.
    """
    keys = tuple(int(k) for k in keys)
    return np.random.default_rng(np.random.SeedSequence(int(seed), spawn_key=keys))


def subseed(seed, *keys):
    """Integer seed derived from ``(seed, *keys)``; see :func:`substream`."""
    keys = tuple(int(k) for k in keys)
    return int(np.random.SeedSequence(int(seed), spawn_key=keys).generate_state(1, np.uint64)[0] >> 1)
