import math

import numpy as np

from .base import ProbabilisticClassifier

# relative slack under which two split scores count as tied
_TIE = 1e-10


def gini(counts):
    """Gini impurity of a vector of (weighted) class counts."""
    counts = np.asarray(counts, dtype=float)
    total = counts.sum()
    if total <= 0:
        return 0.0
    return 1.0 - np.sum((counts / total) ** 2)


def _best_threshold(x, Y):
    """Best weighted-Gini cut on one feature.

    ``Y`` holds the per-row weighted one-hot labels. Returns
    ``(score, threshold)`` where score is ``sum_c L_c^2/W_L + sum_c R_c^2/W_R``
    (larger is purer), or ``None`` if ``x`` is constant.
    """
    order = np.argsort(x, kind="stable")
    xs = x[order]
    cut = np.nonzero(xs[1:] > xs[:-1])[0]
    if cut.size == 0:
        return None
    left = np.cumsum(Y[order], axis=0)[cut]
    right = Y.sum(axis=0) - left
    wl = left.sum(axis=1)
    wr = right.sum(axis=1)
    score = (left ** 2).sum(axis=1) / wl + (right ** 2).sum(axis=1) / wr
    best = score.max()
    i = np.nonzero(score >= best - _TIE * abs(best))[0][0]
    lo, hi = xs[cut[i]], xs[cut[i] + 1]
    thr = lo + (hi - lo) / 2
    if not lo <= thr < hi:
        thr = lo
    return score[i], thr


class DecisionTree(ProbabilisticClassifier):
    """Unpruned weighted-Gini CART tree.

    At each node features are visited in a random order; the best split is
    taken over the first ``ceil(sqrt(d))`` non-constant features, and more
    features are visited only while no split reduces impurity. Equal scores
    go to the lowest feature index, then the lowest threshold. Leaves keep
    their weighted class counts.
    """

    def __init__(self, n_classes=None, random_state=None, max_features="sqrt"):
        super().__init__(n_classes, random_state)
        self.max_features = max_features

    def _n_candidates(self, d):
        if self.max_features == "sqrt":
            return max(1, math.ceil(math.sqrt(d)))
        if self.max_features is None:
            return d
        return int(self.max_features)

    def _fit(self, X, y, w):
        rng = np.random.default_rng(self.random_state)
        d = X.shape[1]
        n_cand = self._n_candidates(d)
        Yw = np.zeros((len(y), self.n_classes))
        Yw[np.arange(len(y)), y] = w
        feature, threshold, left, right, value = [], [], [], [], []

        def new_node(counts):
            feature.append(-1)
            threshold.append(0.0)
            left.append(-1)
            right.append(-1)
            value.append(counts)
            return len(feature) - 1

        root = new_node(Yw.sum(axis=0))
        stack = [(root, np.arange(len(y)))]
        while stack:
            node, idx = stack.pop()
            counts = value[node]
            W = counts.sum()
            if np.count_nonzero(counts) <= 1:
                continue
            parent = (counts ** 2).sum() / W
            best = None
            seen = 0
            for j in rng.permutation(d):
                if seen >= n_cand and best is not None:
                    break
                res = _best_threshold(X[idx, j], Yw[idx])
                if res is None:
                    continue
                seen += 1
                score, thr = res
                if score <= parent + _TIE * parent:
                    continue
                if best is None or score > best[0] + _TIE * abs(best[0]) or (
                        score >= best[0] - _TIE * abs(best[0]) and (j, thr) < (best[1], best[2])):
                    best = (score, j, thr)
            if best is None:
                continue
            _, j, thr = best
            go_left = X[idx, j] <= thr
            li, ri = idx[go_left], idx[~go_left]
            feature[node] = j
            threshold[node] = thr
            left[node] = new_node(Yw[li].sum(axis=0))
            right[node] = new_node(Yw[ri].sum(axis=0))
            stack.append((right[node], ri))
            stack.append((left[node], li))

        self.feature_ = np.array(feature, dtype=int)
        self.threshold_ = np.array(threshold)
        self.children_left_ = np.array(left, dtype=int)
        self.children_right_ = np.array(right, dtype=int)
        self.value_ = np.array(value)

    @property
    def node_count(self):
        return len(self.feature_)

    def apply(self, X):
        """Leaf index reached by each row."""
        node = np.zeros(X.shape[0], dtype=int)
        active = self.feature_[node] >= 0
        while active.any():
            cur = node[active]
            go_left = X[active, self.feature_[cur]] <= self.threshold_[cur]
            node[active] = np.where(go_left, self.children_left_[cur], self.children_right_[cur])
            active = self.feature_[node] >= 0
        return node

    def _predict_present(self, X):
        v = self.value_[self.apply(X)]
        return (v / v.sum(axis=1, keepdims=True))[:, self.classes_]


class BaggedTrees(ProbabilisticClassifier):
    """Average of :class:`DecisionTree` members each fit on a bootstrap sample."""

    def __init__(self, n_classes=None, random_state=None, n_estimators=50):
        super().__init__(n_classes, random_state)
        self.n_estimators = n_estimators

    def _fit(self, X, y, w):
        seq = np.random.SeedSequence(self.random_state)
        self.estimators_ = []
        for child in seq.spawn(self.n_estimators):
            rng = np.random.default_rng(child)
            idx = rng.integers(0, len(y), size=len(y))
            tree = DecisionTree(self.n_classes, random_state=rng.integers(2 ** 63))
            self.estimators_.append(tree.fit(X[idx], y[idx], w[idx]))

    def predict_proba(self, X):
        X = self._validate_predict(X)
        return np.mean([t.predict_proba(X) for t in self.estimators_], axis=0)
