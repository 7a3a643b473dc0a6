"""Exact (O(n^2)) t-SNE.

Per-point Gaussian bandwidths are calibrated by binary search so each
conditional affinity row hits a target perplexity; the joint affinities
are the symmetrized conditionals; the embedding minimizes the KL
divergence to the Student-t low-dimensional affinities by momentum
gradient descent with early exaggeration.
"""

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin

from .numerics import RandomStream, check_matrix, pairwise_sq_dists

EPS = 1e-12  # floor for affinities inside logs/divisions


class CalibrationError(RuntimeError):
    """Bandwidth search failed to bracket the target perplexity."""


class DivergenceError(RuntimeError):
    """Optimization produced a non-finite cost."""


def _row_affinities(sq_row, i, beta):
    """Conditional affinity row for precision beta = 1/(2 sigma^2)."""
    p = np.exp(-beta * (sq_row - np.min(np.delete(sq_row, i))))
    p[i] = 0.0
    return p / np.sum(p)


def calibrate_row(sq_dists_row, i, perplexity, tol=1e-5, max_doublings=50):
    """Find sigma_i so the conditional row has the target perplexity.

    Binary search on the precision beta = 1/(2 sigma^2); 2^H(row) is
    monotone decreasing in beta. Returns (sigma_i, row).
    """
    sq_row = np.asarray(sq_dists_row, dtype=float)
    n = len(sq_row)
    if not 2 <= perplexity <= n - 1:
        raise CalibrationError(
            f"perplexity {perplexity} outside [2, {n - 1}] for row {i}"
        )
    target = np.log2(perplexity)

    def entropy(beta):
        p = _row_affinities(sq_row, i, beta)
        nz = p[p > 0]
        return -np.sum(nz * np.log2(nz))

    # entropy(beta) is non-increasing in beta: bracket with
    # entropy(lo) >= target >= entropy(hi)
    lo, hi = 1.0, 1.0
    for _ in range(max_doublings):
        if entropy(lo) >= target:
            break
        lo /= 2.0
    else:
        raise CalibrationError(f"cannot bracket perplexity from below, point {i}")
    for _ in range(max_doublings):
        if entropy(hi) <= target:
            break
        hi *= 2.0
    else:
        raise CalibrationError(f"cannot bracket perplexity from above, point {i}")

    for _ in range(200):
        beta = 0.5 * (lo + hi)
        h = entropy(beta)
        if abs(2.0 ** h - perplexity) <= tol * perplexity:
            break
        if h > target:
            lo = beta
        else:
            hi = beta
    else:
        beta = 0.5 * (lo + hi)
    sigma = 1.0 / np.sqrt(2.0 * beta)
    return sigma, _row_affinities(sq_row, i, beta)


def conditional_affinities(X, perplexity):
    """Row-calibrated conditional affinity matrix and per-point sigmas."""
    D = pairwise_sq_dists(X)
    n = D.shape[0]
    P = np.zeros((n, n))
    sigmas = np.zeros(n)
    for i in range(n):
        sigmas[i], P[i] = calibrate_row(D[i], i, perplexity)
    return P, sigmas


def joint_affinities(P_cond):
    """Symmetrize conditionals: P[i,j] = (p_{j|i} + p_{i|j}) / (2n).

    Entries are floored at EPS to protect downstream logs; the floor is
    additive noise of order n^2 * 1e-12 and does not disturb the sum-1
    contract at test tolerances.
    """
    P_cond = np.asarray(P_cond, dtype=float)
    n = P_cond.shape[0]
    P = (P_cond + P_cond.T) / (2.0 * n)
    np.fill_diagonal(P, 0.0)
    return np.maximum(P, EPS) - np.diag(np.full(n, EPS))


def low_dim_affinities(Y):
    """Student-t joint affinities of the embedding.

    q_ij = (1 + |y_i - y_j|^2)^-1 / Z with Z the sum of the unnormalized
    kernels over all ordered pairs. Returns (Q, Z).
    """
    Y = check_matrix(Y, "Y")
    W = 1.0 / (1.0 + pairwise_sq_dists(Y))
    np.fill_diagonal(W, 0.0)
    Z = np.sum(W)
    Q = W / Z
    return Q, Z


def kl_cost(P, Q):
    """KL(P || Q) over off-diagonal entries, with 0*log(0) = 0."""
    P = np.asarray(P, dtype=float)
    Q = np.asarray(Q, dtype=float)
    mask = P > 0
    return float(np.sum(P[mask] * np.log(P[mask] / np.maximum(Q[mask], EPS))))


def kl_gradient(P, Q, Z, Y):
    """Gradient of the KL cost wrt Y: row i is
    4 * sum_j (p_ij - q_ij) * q_ij * Z * (y_i - y_j).
    """
    PQ = (P - Q) * Q * Z  # q_ij * Z is the unnormalized Student-t kernel
    np.fill_diagonal(PQ, 0.0)
    deg = np.diag(np.sum(PQ, axis=1))
    return 4.0 * ((deg - PQ) @ Y)


class TSNE(BaseEstimator, TransformerMixin):
    """t-SNE embedding estimator.

    Parameters follow the common defaults: perplexity 30 (auto-capped at
    (n-1)/3), 1000 iterations at learning rate 200, momentum 0.5 before
    iteration 250 and 0.8 after, 4x early exaggeration for the first 100
    iterations, gaussian init at scale 1e-4.

    Attributes (after fit)
    ----------------------
    embedding_ : (n, n_components) array
    kl_cost_ : final KL divergence (unexaggerated P)
    cost_history_ : per-iteration KL divergence, length n_iter
    sigmas_ : calibrated per-point bandwidths
    """

    def __init__(self, n_components=2, perplexity=30.0, n_iter=1000,
                 learning_rate=200.0, early_exaggeration=4.0,
                 exaggeration_iter=100, momentum_switch_iter=250,
                 initial_momentum=0.5, final_momentum=0.8,
                 init_scale=1e-4, random_state=0):
        self.n_components = n_components
        self.perplexity = perplexity
        self.n_iter = n_iter
        self.learning_rate = learning_rate
        self.early_exaggeration = early_exaggeration
        self.exaggeration_iter = exaggeration_iter
        self.momentum_switch_iter = momentum_switch_iter
        self.initial_momentum = initial_momentum
        self.final_momentum = final_momentum
        self.init_scale = init_scale
        self.random_state = random_state

    def fit(self, X, y=None):
        X = check_matrix(X)
        n = X.shape[0]
        if n < 5:
            raise ValueError("t-SNE needs at least 5 samples")
        if self.n_components < 1 or self.n_iter < 1:
            raise ValueError("n_components and n_iter must be positive")
        perplexity = min(self.perplexity, (n - 1) / 3.0)
        perplexity = max(perplexity, 2.0)

        P_cond, self.sigmas_ = conditional_affinities(X, perplexity)
        P = joint_affinities(P_cond)

        rng = RandomStream(self.random_state)
        d = self.n_components
        Y = self.init_scale * rng.gaussian((n, d))
        velocity = np.zeros_like(Y)
        history = np.zeros(self.n_iter)

        for it in range(self.n_iter):
            exaggerate = it < self.exaggeration_iter
            P_eff = P * self.early_exaggeration if exaggerate else P
            Q, Z = low_dim_affinities(Y)
            grad = kl_gradient(P_eff, Q, Z, Y)
            momentum = (self.initial_momentum if it < self.momentum_switch_iter
                        else self.final_momentum)
            velocity = momentum * velocity - self.learning_rate * grad
            Y = Y + velocity
            cost = kl_cost(P, Q)
            if not np.isfinite(cost):
                raise DivergenceError(
                    f"non-finite cost at iteration {it} "
                    f"(learning_rate={self.learning_rate})"
                )
            history[it] = cost

        self.embedding_ = Y
        self.cost_history_ = history
        self.kl_cost_ = float(history[-1])
        self.P_ = P
        return self

    def fit_transform(self, X, y=None):
        return self.fit(X).embedding_

    def transform(self, X):
        raise NotImplementedError(
            "t-SNE is transductive: there is no out-of-sample map. "
            "Use fit_transform on the full point set."
        )
