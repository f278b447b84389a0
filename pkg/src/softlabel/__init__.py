"""Training classifiers from soft labels: wrapper methods, noise models, metrics and experiments."""
from .core import (
    ClassDistribution,
    HardDataset,
    SoftDataset,
    WeightedHardDataset,
    confidence_to_soft,
    normalize,
    one_hot,
)
from .methods import METHOD_NAMES, fit_method, get_method, predict_method, predict_proba_method
from .metrics import auc, mean_tvd, tvd

__all__ = [
    "ClassDistribution", "HardDataset", "METHOD_NAMES", "SoftDataset", "WeightedHardDataset", "auc",
    "confidence_to_soft", "fit_method", "get_method", "mean_tvd", "normalize", "one_hot", "predict_method",
    "predict_proba_method", "tvd",
]
