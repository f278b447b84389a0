import numpy as np
from scipy.special import logsumexp

from .base import ProbabilisticClassifier

VAR_SMOOTHING = 1e-9


class GaussianNB(ProbabilisticClassifier):
    """Gaussian naive Bayes with weighted maximum-likelihood estimates."""

    def _fit(self, X, y, w):
        m = len(self.classes_)
        d = X.shape[1]
        self.theta_ = np.zeros((m, d))
        self.var_ = np.zeros((m, d))
        class_w = np.zeros(m)
        for i, c in enumerate(self.classes_):
            mask = y == c
            wc = w[mask]
            class_w[i] = wc.sum()
            self.theta_[i] = np.average(X[mask], axis=0, weights=wc)
            self.var_[i] = np.average((X[mask] - self.theta_[i]) ** 2, axis=0, weights=wc)
        overall = np.average((X - np.average(X, axis=0, weights=w)) ** 2, axis=0, weights=w)
        self.epsilon_ = VAR_SMOOTHING * overall.max()
        if self.epsilon_ <= 0:
            # every feature constant
            self.epsilon_ = VAR_SMOOTHING
        self.var_ += self.epsilon_
        self.class_prior_ = class_w / class_w.sum()

    def joint_log_likelihood(self, X):
        jll = np.log(self.class_prior_)[None, :].repeat(X.shape[0], axis=0)
        for i in range(len(self.classes_)):
            jll[:, i] -= 0.5 * np.sum(np.log(2 * np.pi * self.var_[i]))
            jll[:, i] -= 0.5 * np.sum((X - self.theta_[i]) ** 2 / self.var_[i], axis=1)
        return jll

    def _predict_present(self, X):
        jll = self.joint_log_likelihood(X)
        return np.exp(jll - logsumexp(jll, axis=1, keepdims=True))
