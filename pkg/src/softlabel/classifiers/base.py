import numpy as np

from ..core import DegenerateDataError, DimensionMismatchError, NotFittedError, OutOfRangeError


class NonFiniteError(ArithmeticError):
    pass


class ProbabilisticClassifier:
    """Weighted fit / per-class probability interface shared by all base learners.

    ``n_classes`` fixes the width of :meth:`predict_proba`; classes absent
    from the training labels get probability zero.
    """

    def __init__(self, n_classes=None, random_state=None):
        self.n_classes = n_classes
        self.random_state = random_state
        self.fitted_ = False

    def fit(self, X, y, sample_weight=None):
        X, y, w = self._validate_fit(X, y, sample_weight)
        self.n_features_ = X.shape[1]
        self.classes_ = np.unique(y)
        self._fit(X, y, w)
        self.fitted_ = True
        return self

    def predict_proba(self, X):
        X = self._validate_predict(X)
        if X.shape[0] == 0:
            return np.zeros((0, self.n_classes))
        present = self._predict_present(X)
        out = np.zeros((X.shape[0], self.n_classes))
        out[:, self.classes_] = present
        return out

    def predict(self, X):
        return np.argmax(self.predict_proba(X), axis=1)

    def _fit(self, X, y, w):
        raise NotImplementedError

    def _predict_present(self, X):
        """Probabilities over ``self.classes_`` only."""
        raise NotImplementedError

    def _validate_fit(self, X, y, sample_weight):
        X = np.asarray(X, dtype=float)
        y = np.asarray(y)
        if X.ndim != 2 or y.shape != (X.shape[0],):
            raise DimensionMismatchError(f"X {X.shape} and y {y.shape} do not line up")
        if not np.all(np.isfinite(X)):
            raise OutOfRangeError("features must be finite")
        y = y.astype(int)
        if self.n_classes is None:
            self.n_classes = max(int(y.max()) + 1, 2)
        if y.min() < 0 or y.max() >= self.n_classes:
            raise OutOfRangeError(f"labels must lie in [0, {self.n_classes})")
        w = np.ones(len(y)) if sample_weight is None else np.asarray(sample_weight, dtype=float)
        if w.shape != y.shape:
            raise DimensionMismatchError("sample_weight and y differ in length")
        if np.any(w < 0) or not np.all(np.isfinite(w)):
            raise OutOfRangeError("weights must be finite and non-negative")
        keep = w > 0
        if not keep.any():
            raise DegenerateDataError("all weights are zero")
        X, y, w = X[keep], y[keep], w[keep]
        # mean-one weights make the fit independent of the global weight scale
        return X, y, w / w.mean()

    def _validate_predict(self, X):
        if not self.fitted_:
            raise NotFittedError(f"{type(self).__name__} is not fitted")
        X = np.asarray(X, dtype=float)
        if X.ndim != 2 or X.shape[1] != self.n_features_:
            raise DimensionMismatchError(f"expected {self.n_features_} features, got shape {X.shape}")
        return X


def softmax(z):
    z = z - z.max(axis=1, keepdims=True)
    e = np.exp(z)
    return e / e.sum(axis=1, keepdims=True)
