"""From-scratch base learners supporting sample weights and probability output."""
from ..core import WeightedHardDataset
from .base import NonFiniteError, ProbabilisticClassifier
from .logistic import LogisticRegression
from .naive_bayes import GaussianNB
from .sgd import SGDClassifier
from .tree import BaggedTrees, DecisionTree

BASE_CLASSIFIERS = {
    "GNB": GaussianNB,
    "LR": LogisticRegression,
    "SGD": SGDClassifier,
    "DT": DecisionTree,
}


def make_classifier(name, n_classes, random_state=None, **params):
    try:
        cls = BASE_CLASSIFIERS[name]
    except KeyError:
        raise KeyError(f"unknown base classifier {name!r}; choose from {sorted(BASE_CLASSIFIERS)}") from None
    return cls(n_classes=n_classes, random_state=random_state, **params)


def fit(name, data: WeightedHardDataset, seed=None, **params):
    """Fit base classifier ``name`` on a weighted hard-labelled dataset."""
    clf = make_classifier(name, data.class_count, seed, **params)
    return clf.fit(data.features, data.labels, data.weights)


__all__ = [
    "BASE_CLASSIFIERS", "BaggedTrees", "DecisionTree", "GaussianNB", "LogisticRegression",
    "NonFiniteError", "ProbabilisticClassifier", "SGDClassifier", "fit", "make_classifier",
]
