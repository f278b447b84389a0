"""The nineteen wrapper methods, as compositions of techniques around a base classifier.

Stages always run in the same order: thresholding, plurality voting,
instance sampling, duplication, then the final label processing step
("weights", "label_sampling" or "max_sampling").

>>> spec = get_method("BootstrapDuplicateWeightsClf", ensemble_size=10)
>>> fitted = fit_method(spec, "DT", data, seed=0)        # doctest: +SKIP
>>> proba = predict_proba_method(fitted, X_test)         # doctest: +SKIP
"""
from __future__ import annotations

import re
from dataclasses import dataclass, replace

import numpy as np

from . import techniques as tq
from .classifiers import make_classifier
from .core import DimensionMismatchError, NotFittedError, SoftDataset, substream, subseed

DEFAULT_ENSEMBLE_SIZE = 50
DEFAULT_THRESHOLD = 0.1

CATEGORIES = ("HardSingle", "SoftSingle", "HardEns", "SoftEns")
SAMPLINGS = (None, "bootstrap", "max")
PROCESSINGS = (None, "weights", "label_sampling", "max_sampling")


@dataclass(frozen=True)
class MethodSpec:
    name: str
    category: str
    threshold: bool = False
    plurality: bool = False
    sampling: str | None = None
    duplication: bool = False
    processing: str | None = None
    ensemble_size: int = 1
    threshold_rule: tq.ThresholdRule | None = None

    def __post_init__(self):
        if self.category not in CATEGORIES:
            raise ValueError(f"unknown category {self.category!r}")
        if self.sampling not in SAMPLINGS or self.processing not in PROCESSINGS:
            raise ValueError(f"bad stage configuration for {self.name}")
        single = self.category.endswith("Single")
        if single and self.ensemble_size != 1:
            raise ValueError(f"{self.name} is a single-model method; ensemble_size must be 1")
        if not single and self.ensemble_size < 2:
            raise ValueError(f"{self.name} is an ensemble; ensemble_size must be >= 2")
        if self.category.startswith("Hard") and (self.duplication or self.processing == "label_sampling"
                                                 or not self.plurality):
            raise ValueError(f"{self.name}: hard-label methods must vote first and never duplicate")
        if self.threshold and self.threshold_rule is None:
            object.__setattr__(self, "threshold_rule", tq.ThresholdRule("percentile", DEFAULT_THRESHOLD))

    @property
    def stages(self):
        out = []
        if self.threshold:
            out.append("threshold")
        if self.plurality:
            out.append("plurality_vote")
        if self.sampling:
            out.append(f"{self.sampling}_sampling")
        if self.duplication:
            out.append("duplication")
        if self.processing:
            out.append(self.processing)
        return tuple(out)

    @property
    def is_ensemble(self):
        return self.category.endswith("Ens")


def _m(name, category, **kw):
    if category.endswith("Ens"):
        kw.setdefault("ensemble_size", DEFAULT_ENSEMBLE_SIZE)
    return MethodSpec(name, category, **kw)


_METHODS = [
    _m("PluralityClf", "HardSingle", plurality=True),
    _m("PluralityWeightsClf", "HardSingle", plurality=True, processing="weights"),
    _m("ThresholdClf", "HardSingle", threshold=True, plurality=True),
    _m("ThresholdWeightsClf", "HardSingle", threshold=True, plurality=True, processing="weights"),
    _m("SampleClf", "SoftSingle", processing="label_sampling"),
    _m("DuplicateWeightsClf", "SoftSingle", duplication=True, processing="weights"),
    _m("PluralityBootstrapClf", "HardEns", plurality=True, sampling="bootstrap"),
    _m("PluralityBootstrapWeightsClf", "HardEns", plurality=True, sampling="bootstrap", processing="weights"),
    _m("PluralityEnsembleClf", "HardEns", plurality=True, sampling="max"),
    _m("ThresholdBootstrapClf", "HardEns", threshold=True, plurality=True, sampling="bootstrap"),
    _m("ThresholdBootstrapWeightsClf", "HardEns", threshold=True, plurality=True, sampling="bootstrap",
       processing="weights"),
    _m("ThresholdEnsembleClf", "HardEns", threshold=True, plurality=True, sampling="max"),
    _m("BootstrapSamplingClf", "SoftEns", sampling="bootstrap", processing="label_sampling"),
    _m("EnsembleSamplingClf", "SoftEns", sampling="max", processing="label_sampling"),
    _m("DuplicateEnsembleClf", "SoftEns", duplication=True, processing="max_sampling"),
    _m("BootstrapDuplicateWeightsClf", "SoftEns", sampling="bootstrap", duplication=True, processing="weights"),
    _m("EnsembleDuplicateWeightsClf", "SoftEns", sampling="max", duplication=True, processing="weights"),
    _m("BootstrapDuplicateSamplingClf", "SoftEns", sampling="bootstrap", duplication=True,
       processing="max_sampling"),
    _m("EnsembleDuplicateSamplingClf", "SoftEns", sampling="max", duplication=True, processing="max_sampling"),
]
METHOD_NAMES = tuple(m.name for m in _METHODS)


def registry():
    """Map of method name to :class:`MethodSpec`, in table order."""
    return {m.name: m for m in _METHODS}


def canonical_name(name):
    """Accept long ("...Classifier") and short ("...Dup...Clf") spellings."""
    short = re.sub(r"Classifier$", "Clf", name)
    short = re.sub(r"Dup(?!licate)", "Duplicate", short)
    short = re.sub(r"Ens(?!emble)", "Ensemble", short)
    if short not in METHOD_NAMES:
        raise KeyError(f"unknown method {name!r}")
    return short


def get_method(name, ensemble_size=None, threshold=None):
    """Look up a method, optionally overriding its ensemble size or threshold.

    ``threshold`` is a percentile fraction or a :class:`ThresholdRule`.
    """
    spec = registry()[canonical_name(name)]
    if ensemble_size is not None and spec.is_ensemble:
        spec = replace(spec, ensemble_size=int(ensemble_size))
    if threshold is not None and spec.threshold:
        rule = threshold if isinstance(threshold, tq.ThresholdRule) else tq.ThresholdRule("percentile", threshold)
        spec = replace(spec, threshold_rule=rule)
    return spec


@dataclass(frozen=True)
class FittedMethod:
    spec: MethodSpec
    members: tuple
    n_features: int
    class_count: int


DEFAULT_SAMPLERS = {"bootstrap": tq.bootstrap_sample, "max": tq.max_sample}


def member_training_set(spec, data: SoftDataset, member, seed, samplers=None):
    """The ``(X, y, w)`` a given ensemble member is trained on.

    ``data`` must already be thresholded. Random streams are keyed by
    ``(seed, member, stage)`` so that methods sharing a stage draw the same
    indices for it.
    """
    samplers = DEFAULT_SAMPLERS if samplers is None else {**DEFAULT_SAMPLERS, **samplers}
    X, P = data.features, data.labels
    n = len(data)
    if spec.sampling is None:
        idx = np.arange(n)
    else:
        idx = np.asarray(samplers[spec.sampling](data, n, substream(seed, member, 0)))
    rng = substream(seed, member, 1)
    if spec.plurality:
        y, conf = tq.plurality_votes(P[idx])
        w = conf if spec.processing == "weights" else np.ones(len(idx))
        return X[idx], y, w
    Xm, Pm = X[idx], P[idx]
    if spec.duplication:
        rows, y = tq.duplicate_rows(Pm)
        w = Pm[rows, y]
        if spec.processing == "weights":
            return Xm[rows], y, w
        # max sampling over the duplicated copies, back to n rows
        pick = tq.weighted_sample(w, n, rng)
        return Xm[rows[pick]], y[pick], np.ones(n)
    if spec.processing == "label_sampling":
        return Xm, tq.label_samples(Pm, rng), np.ones(len(idx))
    raise ValueError(f"{spec.name} has no label processing step")


def fit_method(spec, base, data: SoftDataset, seed, ensemble_size=None, base_params=None, samplers=None):
    """Train every member of ``spec`` with base classifier ``base`` on soft-labelled ``data``."""
    if isinstance(spec, str):
        spec = get_method(spec)
    size = spec.ensemble_size if ensemble_size is None else int(ensemble_size)
    if spec.threshold:
        data = tq.threshold_filter(data, spec.threshold_rule)
    members = []
    for m in range(size):
        X, y, w = member_training_set(spec, data, m, seed, samplers)
        clf = make_classifier(base, data.class_count, subseed(seed, m, 2), **(base_params or {}))
        members.append(clf.fit(X, y, w))
    return FittedMethod(spec, tuple(members), data.features.shape[1], data.class_count)


def predict_proba_method(m: FittedMethod, features):
    if not isinstance(m, FittedMethod) or not m.members:
        raise NotFittedError("method is not fitted")
    X = np.asarray(features, dtype=float)
    if X.ndim != 2 or X.shape[1] != m.n_features:
        raise DimensionMismatchError(f"expected {m.n_features} features, got shape {X.shape}")
    if len(m.members) == 1:
        return m.members[0].predict_proba(X)
    return tq.average_probs([c.predict_proba(X) for c in m.members])


def predict_method(m: FittedMethod, features):
    return np.argmax(predict_proba_method(m, features), axis=1)
