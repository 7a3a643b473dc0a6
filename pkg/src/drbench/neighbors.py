"""Nearest-neighbor classifiers: plain KNN and extended NN (ENN).

Distances are squared Euclidean in the (embedded) feature space. Among
equidistant neighbors the lower row index wins, which together with the
documented tie rules makes both predictors fully deterministic.
"""

import numpy as np
from sklearn.base import BaseEstimator, ClassifierMixin

from .numerics import check_matrix


def _k_nearest(dists, k, exclude=None):
    """Indices of the k smallest entries, ties broken by lower index."""
    d = dists.copy()
    if exclude is not None:
        d[exclude] = np.inf
    order = np.lexsort((np.arange(len(d)), d))
    return order[:k]


class KNNClassifier(BaseEstimator, ClassifierMixin):
    """K-nearest-neighbors vote with deterministic tie handling.

    The class posterior is the fraction of the k nearest training points
    in each class. Vote ties are broken by the smaller summed neighbor
    distance, then by the lower class id.
    """

    def __init__(self, n_neighbors=5):
        self.n_neighbors = n_neighbors

    def fit(self, X, y):
        X = check_matrix(X)
        y = np.asarray(y, dtype=int)
        if len(y) != X.shape[0]:
            raise ValueError("X and y length mismatch")
        if not 1 <= self.n_neighbors <= X.shape[0] - 1:
            raise ValueError(
                f"n_neighbors must be in [1, {X.shape[0] - 1}], "
                f"got {self.n_neighbors}"
            )
        self.train_X_ = X
        self.train_y_ = y
        self.n_classes_ = int(np.max(y)) + 1
        return self

    def predict_one(self, x):
        """Predict a single point; returns (label, posterior vector)."""
        x = np.asarray(x, dtype=float)
        diffs = self.train_X_ - x
        dists = np.einsum("ij,ij->i", diffs, diffs)
        nbrs = _k_nearest(dists, self.n_neighbors)
        posterior = np.bincount(
            self.train_y_[nbrs], minlength=self.n_classes_
        ) / self.n_neighbors
        best = np.max(posterior)
        tied = np.flatnonzero(posterior == best)
        if len(tied) > 1:
            # nearer tied class wins, then lower class id
            sums = np.array(
                [np.sum(dists[nbrs[self.train_y_[nbrs] == c]]) for c in tied]
            )
            tied = tied[sums == np.min(sums)]
        return int(tied[0]), posterior

    def predict(self, X):
        X = check_matrix(X)
        return np.array([self.predict_one(x)[0] for x in X], dtype=int)

    def predict_proba(self, X):
        X = check_matrix(X)
        return np.array([self.predict_one(x)[1] for x in X])


def enn_class_statistic(X, y, k, class_id):
    """Class-wise neighbor coherence Q_i.

    Fraction of same-class points among the k nearest neighbors (self
    excluded) of each class-i sample, averaged over the class.
    """
    X = check_matrix(X)
    y = np.asarray(y, dtype=int)
    members = np.flatnonzero(y == class_id)
    if len(members) == 0:
        raise ValueError(f"class {class_id} has no samples")
    D = _sq_dist_matrix(X)
    hits = 0
    for p in members:
        nbrs = _k_nearest(D[p], k, exclude=p)
        hits += int(np.sum(y[nbrs] == class_id))
    return hits / (len(members) * k)


def _sq_dist_matrix(X):
    sq = np.einsum("ij,ij->i", X, X)
    D = sq[:, None] + sq[None, :] - 2.0 * (X @ X.T)
    np.maximum(D, 0.0, out=D)
    return D


class ENNClassifier(BaseEstimator, ClassifierMixin):
    """Extended nearest neighbors.

    A query point is tentatively inserted into each candidate class in
    turn; the class statistics Q_i are recomputed over the augmented
    sample, and the candidate maximizing sum_i Q_i wins (ties to the
    lower class id). The query is never its own neighbor, but it does
    enter other points' neighbor lists while inserted.
    """

    def __init__(self, n_neighbors=5):
        self.n_neighbors = n_neighbors

    def fit(self, X, y):
        X = check_matrix(X)
        y = np.asarray(y, dtype=int)
        if len(y) != X.shape[0]:
            raise ValueError("X and y length mismatch")
        if not 1 <= self.n_neighbors <= X.shape[0] - 1:
            raise ValueError(
                f"n_neighbors must be in [1, {X.shape[0] - 1}], "
                f"got {self.n_neighbors}"
            )
        self.train_X_ = X
        self.train_y_ = y
        self.n_classes_ = int(np.max(y)) + 1
        self.base_stats_ = np.array(
            [enn_class_statistic(X, y, self.n_neighbors, c)
             for c in range(self.n_classes_)]
        )
        # neighbor bookkeeping reused by every predict call
        self._train_D_ = _sq_dist_matrix(X)
        return self

    def _augmented_neighbors(self, x):
        """Neighbor lists over train + query; query has index n."""
        x = np.asarray(x, dtype=float)
        n = len(self.train_y_)
        k = self.n_neighbors
        diffs = self.train_X_ - x
        dx = np.einsum("ij,ij->i", diffs, diffs)
        # train points: k nearest among the n-1 other train points and x
        nbrs = []
        for p in range(n):
            d = np.append(self._train_D_[p], dx[p])
            nbrs.append(_k_nearest(d, k, exclude=p))
        # the query itself: k nearest train points (self excluded by construction)
        nbrs.append(_k_nearest(dx, k))
        return nbrs

    def predict_one(self, x):
        n = len(self.train_y_)
        k = self.n_neighbors
        nbrs = self._augmented_neighbors(x)
        # per point: counts of train-neighbor classes and whether x is a neighbor
        base_counts = np.zeros((n + 1, self.n_classes_), dtype=int)
        has_query = np.zeros(n + 1, dtype=bool)
        for p in range(n + 1):
            for q in nbrs[p]:
                if q == n:
                    has_query[p] = True
                else:
                    base_counts[p, self.train_y_[q]] += 1

        best_label, best_score = 0, -np.inf
        for j in range(self.n_classes_):
            score = 0.0
            for i in range(self.n_classes_):
                members = list(np.flatnonzero(self.train_y_ == i))
                if i == j:
                    members.append(n)
                hits = 0
                for p in members:
                    hits += base_counts[p, i]
                    if i == j and has_query[p]:
                        hits += 1  # the inserted query counts as class j
                score += hits / (len(members) * k)
            if score > best_score:
                best_label, best_score = j, score
        return best_label

    def predict(self, X):
        X = check_matrix(X)
        return np.array([self.predict_one(x) for x in X], dtype=int)
