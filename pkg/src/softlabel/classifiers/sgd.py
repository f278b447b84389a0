"""Linear classifier trained by SGD on the modified Huber loss.

Binary problems use one weight vector; multi-class problems are fit
one-vs-rest. The learning-rate schedule is the "optimal" schedule
``eta_t = 1 / (alpha * (t0 + t))`` with ``t0`` chosen so the first step
has the size of a typical weight.
"""
import numpy as np
from numba import njit

from .base import NonFiniteError, ProbabilisticClassifier

EARLY_STOPPING_MIN_SAMPLES = 5000


@njit(cache=True)
def modified_huber(z):
    if z >= 1.0:
        return 0.0
    if z >= -1.0:
        return (1.0 - z) * (1.0 - z)
    return -4.0 * z


@njit(cache=True)
def _dloss(z):
    # derivative of modified_huber with respect to z
    if z >= 1.0:
        return 0.0
    if z >= -1.0:
        return -2.0 * (1.0 - z)
    return -4.0


@njit(cache=True)
def _epoch(X, y, sw, order, w, state, alpha):
    """One pass over ``order``. ``state`` holds [intercept, wscale, t, t0]."""
    b, wscale, t, t0 = state[0], state[1], state[2], state[3]
    d = X.shape[1]
    sumloss = 0.0
    for idx in order:
        eta = 1.0 / (alpha * (t0 + t - 1.0))
        p = 0.0
        for j in range(d):
            p += w[j] * X[idx, j]
        p = p * wscale + b
        z = p * y[idx]
        sumloss += sw[idx] * modified_huber(z)
        update = -eta * _dloss(z) * y[idx] * sw[idx]
        wscale *= max(0.0, 1.0 - eta * alpha)
        if update != 0.0:
            for j in range(d):
                w[j] += update * X[idx, j] / wscale
            b += update
        if wscale < 1e-9:
            for j in range(d):
                w[j] *= wscale
            wscale = 1.0
        t += 1.0
    state[0], state[1], state[2] = b, wscale, t
    return sumloss


def objective(coef, intercept, X, y_pm, sample_weight, alpha):
    """Weighted mean modified-Huber loss plus ``alpha/2 * ||coef||^2``.

    ``y_pm`` holds targets in {-1, +1}. Duplicating a row ``w`` times and
    giving it weight ``w`` yield the same value.
    """
    z = y_pm * (np.asarray(X) @ coef + intercept)
    loss = np.where(z >= 1, 0.0, np.where(z >= -1, (1 - z) ** 2, -4 * z))
    sw = np.asarray(sample_weight, dtype=float)
    return float(np.sum(sw * loss) / sw.sum() + 0.5 * alpha * coef @ coef)


class SGDClassifier(ProbabilisticClassifier):
    def __init__(self, n_classes=None, random_state=None, alpha=1e-4, max_iter=1000, tol=1e-3,
                 n_iter_no_change=5, early_stopping="auto", validation_fraction=0.1):
        super().__init__(n_classes, random_state)
        self.alpha = alpha
        self.max_iter = max_iter
        self.tol = tol
        self.n_iter_no_change = n_iter_no_change
        self.early_stopping = early_stopping
        self.validation_fraction = validation_fraction

    def _fit(self, X, y, w):
        rng = np.random.default_rng(self.random_state)
        m = len(self.classes_)
        d = X.shape[1]
        early = self.early_stopping
        if early == "auto":
            early = X.shape[0] > EARLY_STOPPING_MIN_SAMPLES
        val = np.zeros(X.shape[0], dtype=bool)
        if early:
            n_val = max(1, int(round(self.validation_fraction * X.shape[0])))
            val[rng.permutation(X.shape[0])[:n_val]] = True
        targets = [self.classes_[1]] if m == 2 else list(self.classes_)
        self.coef_ = np.zeros((len(targets), d))
        self.intercept_ = np.zeros(len(targets))
        self.n_iter_ = 0
        if m == 1:
            return
        for i, c in enumerate(targets):
            y_pm = np.where(y == c, 1.0, -1.0)
            self.coef_[i], self.intercept_[i], n_iter = self._fit_binary(X, y_pm, w, val, rng)
            self.n_iter_ = max(self.n_iter_, n_iter)

    def _fit_binary(self, X, y_pm, sw, val, rng):
        Xt, yt, swt = X[~val], y_pm[~val], sw[~val]
        alpha = self.alpha
        typw = np.sqrt(1.0 / np.sqrt(alpha))
        eta0 = typw / max(1.0, -_dloss(-typw))
        state = np.array([0.0, 1.0, 1.0, 1.0 / (eta0 * alpha)])
        coef = np.zeros(X.shape[1])
        best = np.inf if not val.any() else -np.inf
        stale = 0
        epoch = 0
        for epoch in range(1, self.max_iter + 1):
            sumloss = _epoch(Xt, yt, swt, rng.permutation(len(yt)), coef, state, alpha)
            if val.any():
                f = X[val] @ (coef * state[1]) + state[0]
                score = -np.average(np.sign(f) != y_pm[val], weights=sw[val])
                # sklearn-style: stop once the validation score has stalled
                if score < best + self.tol:
                    stale += 1
                else:
                    stale = 0
                best = max(best, score)
            else:
                if sumloss > best - self.tol * len(yt):
                    stale += 1
                else:
                    stale = 0
                best = min(best, sumloss)
            if stale >= self.n_iter_no_change:
                break
        coef = coef * state[1]
        if not np.all(np.isfinite(coef)) or not np.isfinite(state[0]):
            raise NonFiniteError("SGD diverged")
        return coef, state[0], epoch

    def decision_function(self, X):
        return X @ self.coef_.T + self.intercept_

    def _predict_present(self, X):
        m = len(self.classes_)
        if m == 1:
            return np.ones((X.shape[0], 1))
        p = (np.clip(self.decision_function(X), -1, 1) + 1) / 2
        if m == 2:
            return np.hstack([1 - p, p])
        s = p.sum(axis=1, keepdims=True)
        zero = s[:, 0] == 0
        p[zero] = 1.0
        s[zero] = m
        return p / s
