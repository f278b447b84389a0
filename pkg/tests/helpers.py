import numpy as np

from softlabel.core import SoftDataset


def random_soft(n=60, d=3, k=2, seed=0, concentration=1.0):
    """Features from class-shifted Gaussians, labels from a Dirichlet around the true class."""
    rng = np.random.default_rng(seed)
    y = rng.integers(0, k, n)
    X = rng.standard_normal((n, d)) + y[:, None]
    alpha = np.full((n, k), concentration)
    alpha[np.arange(n), y] += 3
    P = np.array([rng.dirichlet(a) for a in alpha])
    return SoftDataset(X, P, k)
