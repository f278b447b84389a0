"""Turning a hard-labelled table into soft labels by hiding features.

A logistic regression fit on the wine data becomes the ground truth. We
then hide the least important features, redraw them from a kernel density
estimate, and count how the ground-truth predictions move around.
"""
from pathlib import Path

import numpy as np

from softlabel import datagen
from softlabel.io import load_dataset

raw = load_dataset(Path(__file__).parents[1] / "tests" / "fixtures" / "wine.csv")
gt = datagen.build_ground_truth(raw, "LR", seed=0)
print(f"wine: {len(raw)} rows, {raw.features.shape[1]} features, {raw.class_count} classes")
print("agreement of the ground truth with the original labels:", np.mean(gt.dataset.labels == raw.labels))

order = datagen.feature_importance(gt)
print("features from least to most important:", [raw.feature_names[j] for j in order])

# hiding more features leaves the model less sure, and the mean TVD to
# the clean one-hot labels grows
sweep = datagen.prefix_sweep(gt, resamples=200, seed=1)
for pg in sweep:
    print(f"  hide {len(pg.hidden):2d}  mean TVD {pg.mean_tvd:.3f}")

low, high = datagen.select_uncertainty_levels(gt, resamples=200, seed=1)
print(f"low uncertainty hides {len(low.hidden)} features, high hides {len(high.hidden)}")
print("three high-uncertainty soft labels:\n", np.round(high.dataset.labels[:3], 3))
