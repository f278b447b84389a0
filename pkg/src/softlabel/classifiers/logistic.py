import numpy as np
from scipy.special import logsumexp

from ..core import NotFittedError
from .base import NonFiniteError, ProbabilisticClassifier, softmax


def objective_and_grad(params, X, Y, w, C):
    """Weighted L2-regularised multinomial log-loss and its gradient.

    ``params`` is the flattened ``(m, d + 1)`` matrix of coefficients with
    the intercept in the last column; ``Y`` is the one-hot ``(n, m)`` target.
    The intercepts are not penalised.

        f = C * sum_i w_i * (-log softmax(x_i W^T + b)[y_i]) + ||W||^2 / 2
    """
    m = Y.shape[1]
    d = X.shape[1]
    theta = params.reshape(m, d + 1)
    W, b = theta[:, :d], theta[:, d]
    Z = X @ W.T + b
    lse = logsumexp(Z, axis=1)
    loss = C * np.sum(w * (lse - np.sum(Y * Z, axis=1))) + 0.5 * np.sum(W * W)
    R = (np.exp(Z - lse[:, None]) - Y) * (C * w)[:, None]
    grad = np.empty_like(theta)
    grad[:, :d] = R.T @ X + W
    grad[:, d] = R.sum(axis=0)
    return loss, grad.ravel()


class LogisticRegression(ProbabilisticClassifier):
    """Multinomial logistic regression fit by full-batch gradient descent.

    Steps start from the Barzilai-Borwein estimate and are shortened by
    Armijo backtracking; iteration stops once the gradient's max-norm drops
    below ``tol`` or after ``max_iter`` steps.
    """

    def __init__(self, n_classes=None, random_state=None, C=1.0, tol=1e-6, max_iter=1000):
        super().__init__(n_classes, random_state)
        self.C = C
        self.tol = tol
        self.max_iter = max_iter

    def _fit(self, X, y, w):
        m = len(self.classes_)
        d = X.shape[1]
        if m == 1:
            self.coef_ = np.zeros((1, d))
            self.intercept_ = np.zeros(1)
            self.n_iter_ = 0
            return
        Y = (y[:, None] == self.classes_[None, :]).astype(float)
        x = np.zeros(m * (d + 1))
        f, g = objective_and_grad(x, X, Y, w, self.C)
        step = 1.0 / (self.C * w.sum() + 1.0)
        it = 0
        for it in range(1, self.max_iter + 1):
            if np.max(np.abs(g)) < self.tol:
                break
            t = step
            gg = g @ g
            while True:
                x_new = x - t * g
                f_new, g_new = objective_and_grad(x_new, X, Y, w, self.C)
                if f_new <= f - 1e-4 * t * gg or t < 1e-20:
                    break
                t *= 0.5
            s, r = x_new - x, g_new - g
            x, f, g = x_new, f_new, g_new
            if not np.isfinite(f):
                raise NonFiniteError("logistic regression diverged")
            sr = s @ r
            step = (s @ s) / sr if sr > 1e-300 else t * 2
        theta = x.reshape(m, d + 1)
        self.coef_ = theta[:, :d].copy()
        self.intercept_ = theta[:, d].copy()
        self.n_iter_ = it
        if not np.all(np.isfinite(theta)):
            raise NonFiniteError("non-finite coefficients")

    def objective(self, X, y, sample_weight=None):
        """Training objective at the fitted parameters, using raw weights."""
        if not self.fitted_:
            raise NotFittedError("LogisticRegression is not fitted")
        X = np.asarray(X, dtype=float)
        w = np.ones(len(y)) if sample_weight is None else np.asarray(sample_weight, dtype=float)
        Y = (np.asarray(y)[:, None] == self.classes_[None, :]).astype(float)
        params = np.hstack([self.coef_, self.intercept_[:, None]]).ravel()
        return objective_and_grad(params, X, Y, w, self.C)[0]

    def _predict_present(self, X):
        return softmax(X @ self.coef_.T + self.intercept_)
