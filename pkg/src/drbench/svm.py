"""Linear soft-margin SVM trained by deterministic dual coordinate ascent.

Solves min_u 1/2 u.u + C sum_i max(0, 1 - y_i u.x~_i) through its dual
(box-constrained in [0, C]); the bias enters as a constant appended
feature of value 1, which keeps the dual free of an equality constraint
at the price of slightly regularizing the bias. Multi-class problems are
handled one-vs-rest.
"""

from dataclasses import dataclass, field

import numpy as np
from sklearn.base import BaseEstimator, ClassifierMixin

from .numerics import RandomStream, check_matrix


class MarginError(ValueError):
    """Margin undefined for a zero weight vector."""


@dataclass
class LinearModel:
    """One binary max-margin separator in bias-augmented coordinates."""

    u: np.ndarray  # length d+1, last entry is the bias weight
    C: float
    alphas: np.ndarray
    primal_history: list = field(default_factory=list)  # per-epoch objective
    dual_history: list = field(default_factory=list)

    def decision_value(self, x):
        x = np.asarray(x, dtype=float)
        return float(self.u[:-1] @ x + self.u[-1])


def _augment(X):
    return np.hstack([X, np.ones((X.shape[0], 1))])


def primal_objective(u, X_aug, y, C):
    """1/2 u.u + C * sum of hinge losses."""
    margins = y * (X_aug @ u)
    return 0.5 * float(u @ u) + C * float(np.sum(np.maximum(0.0, 1.0 - margins)))


def svm_train_binary(X, y, C=1.0, epochs=1000, tol=1e-6, seed=0):
    """Train a binary linear SVM by dual coordinate ascent.

    The coordinate visiting order is one seed-fixed permutation reused
    every epoch; training stops when the largest single alpha change in
    an epoch falls below tol, or at the epoch limit.
    """
    X = check_matrix(X)
    y = np.asarray(y, dtype=float)
    if not np.all(np.isin(y, (-1.0, 1.0))):
        raise ValueError("labels must be +-1")
    if len(np.unique(y)) < 2:
        raise ValueError("both classes must be present")
    if C <= 0:
        raise ValueError("C must be positive")

    Xa = _augment(X)
    n = Xa.shape[0]
    sq_norms = np.einsum("ij,ij->i", Xa, Xa)
    order = RandomStream(seed).permutation(n)

    alphas = np.zeros(n)
    u = np.zeros(Xa.shape[1])
    primal_history, dual_history = [], []
    for _ in range(epochs):
        max_delta = 0.0
        for i in order:
            grad = y[i] * (Xa[i] @ u) - 1.0
            new_alpha = min(max(alphas[i] - grad / sq_norms[i], 0.0), C)
            delta = new_alpha - alphas[i]
            if delta != 0.0:
                u = u + delta * y[i] * Xa[i]
                alphas[i] = new_alpha
                max_delta = max(max_delta, abs(delta))
        primal_history.append(primal_objective(u, Xa, y, C))
        dual_history.append(float(np.sum(alphas)) - 0.5 * float(u @ u))
        if max_delta <= tol:
            break
    return LinearModel(u, C, alphas, primal_history, dual_history)


def svm_margin(model):
    """Geometric margin 2 / |w| (bias coordinate excluded)."""
    w = model.u[:-1]
    norm = np.linalg.norm(w)
    if norm == 0.0:
        raise MarginError("margin undefined: zero weight vector")
    return 2.0 / norm


class LinearSVM(BaseEstimator, ClassifierMixin):
    """One-vs-rest linear SVM classifier.

    Trains one binary model per class (class c vs rest) and predicts the
    argmax decision value, ties to the lower class id. Binary problems
    reduce to the sign of the first model's decision value since the
    second model is its mirror.
    """

    def __init__(self, C=1.0, epochs=1000, tol=1e-6, random_state=0):
        self.C = C
        self.epochs = epochs
        self.tol = tol
        self.random_state = random_state

    def fit(self, X, y):
        X = check_matrix(X)
        y = np.asarray(y, dtype=int)
        if len(y) != X.shape[0]:
            raise ValueError("X and y length mismatch")
        self.n_classes_ = int(np.max(y)) + 1
        if self.n_classes_ < 2:
            raise ValueError("need at least 2 classes")
        self.models_ = []
        for c in range(self.n_classes_):
            y_bin = np.where(y == c, 1.0, -1.0)
            self.models_.append(
                svm_train_binary(
                    X, y_bin, C=self.C, epochs=self.epochs,
                    tol=self.tol, seed=self.random_state,
                )
            )
        return self

    def decision_function(self, X):
        X = check_matrix(X)
        Xa = _augment(X)
        return np.column_stack([Xa @ m.u for m in self.models_])

    def predict(self, X):
        scores = self.decision_function(X)
        # argmax returns the first (lowest-id) class on exact ties
        return np.argmax(scores, axis=1).astype(int)
