"""A quick tour of the method families on one soft-labelled problem.

Single hard-label methods collapse each soft label to its plurality class,
soft single methods keep the distribution, and the ensemble variants train
many members on resampled data and average their probabilities.
"""
from pathlib import Path

import numpy as np

from softlabel import datagen
from softlabel.io import load_dataset
from softlabel.methods import fit_method, get_method, predict_proba_method, registry
from softlabel.metrics import auc, mean_tvd

raw = load_dataset(Path(__file__).parents[1] / "tests" / "fixtures" / "breast_cancer.csv")
gt = datagen.build_ground_truth(raw, "LR", seed=0)
_, high = datagen.select_uncertainty_levels(gt, resamples=100, seed=0)
X, P, y = high.dataset.features, high.dataset.labels, gt.dataset.labels

rng = np.random.default_rng(0)
perm = rng.permutation(len(y))
train, test = perm[:400], perm[400:]
train_data = high.dataset.subset(train)

print(f"{'method':32s} {'family':10s}  AUC(y^G)  mean TVD")
for name, spec in registry().items():
    fitted = fit_method(get_method(name, ensemble_size=10), "DT", train_data, seed=3)
    pred = predict_proba_method(fitted, X[test])
    print(f"{name:32s} {spec.category:10s}  {auc(pred, y[test], 2):.4f}    {mean_tvd(pred, P[test]):.4f}")
