"""Classical (Torgerson) MDS: double centering plus eigendecomposition.

The dissimilarity matrix is squared elementwise, double-centered with
B = -1/2 * J D2 J, and the top-d eigenpairs of B give the coordinates
X[:, j] = sqrt(lambda_j) * e_j. Negative eigenvalues (non-Euclidean
input) are clamped to zero and counted.
"""

from dataclasses import dataclass

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin

from .numerics import NumericsError, check_matrix, jacobi_eigh, pairwise_sq_dists


class DegenerateGeometryError(ValueError):
    """No positive eigenvalue among the requested components."""


def double_center(D):
    """Gram matrix B = -1/2 * J D2 J from a dissimilarity matrix D.

    D2 is the elementwise square of D and J = I - (1/n) 11' the
    centering matrix. B is symmetric with zero row sums.
    """
    D = check_matrix(D, "D")
    n, m = D.shape
    if n != m:
        raise NumericsError(f"D must be square, got {D.shape}")
    if np.max(np.abs(D - D.T)) > 1e-10 * (1.0 + np.max(np.abs(D))):
        raise NumericsError("D must be symmetric")
    if np.min(D) < 0:
        raise NumericsError("D must be nonnegative")
    D2 = D * D
    J = np.eye(n) - np.full((n, n), 1.0 / n)
    B = -0.5 * (J @ D2 @ J)
    return 0.5 * (B + B.T)


def strain(B, X):
    """Normalized discrepancy between B and the Gram matrix of X.

    sqrt( sum_ij (b_ij - <x_i, x_j>)^2 / sum_ij b_ij^2 ).
    """
    B = check_matrix(B, "B")
    X = check_matrix(X, "X")
    denom = np.sum(B * B)
    if denom == 0.0:
        raise NumericsError("strain undefined: B is all zero")
    G = X @ X.T
    return float(np.sqrt(np.sum((B - G) ** 2) / denom))


@dataclass
class MdsResult:
    """Embedding plus diagnostics from one classical-MDS run."""

    X: np.ndarray  # n x d, columns ordered by descending eigenvalue
    eigenvalues: np.ndarray  # the d largest, negatives clamped to 0
    positive_rank: int  # count of positive eigenvalues of B
    n_clamped: int  # how many of the d used eigenvalues were clamped
    strain: float


def classical_mds(D, d):
    """Classical MDS of a dissimilarity matrix into d dimensions."""
    B = double_center(D)
    n = B.shape[0]
    if not 1 <= d <= n - 1:
        raise NumericsError(f"d must be in [1, {n - 1}], got {d}")
    eig = jacobi_eigh(B)
    evals = eig.eigenvalues[:d].copy()
    vecs = eig.eigenvectors[:, :d]
    if np.all(evals <= 0):
        raise DegenerateGeometryError(
            "all requested eigenvalues are non-positive; no embedding exists"
        )
    n_clamped = int(np.sum(evals < 0))
    evals = np.maximum(evals, 0.0)
    X = vecs * np.sqrt(evals)[None, :]
    return MdsResult(
        X=X,
        eigenvalues=evals,
        positive_rank=int(np.sum(eig.eigenvalues > 0)),
        n_clamped=n_clamped,
        strain=strain(B, X),
    )


class ClassicalMDS(BaseEstimator, TransformerMixin):
    """Classical-MDS estimator.

    With dissimilarity="euclidean" (default) the input to fit is a
    feature matrix and Euclidean distances are computed internally; with
    "precomputed" the input is the dissimilarity matrix itself.

    Attributes (after fit)
    ----------------------
    embedding_ : (n, n_components) array
    eigenvalues_ : the n_components largest eigenvalues of B (clamped)
    strain_ : final strain of the embedding
    n_clamped_ : clamped (negative) eigenvalues among those used
    """

    def __init__(self, n_components=2, dissimilarity="euclidean"):
        self.n_components = n_components
        self.dissimilarity = dissimilarity

    def fit(self, X, y=None):
        if self.dissimilarity == "euclidean":
            D = np.sqrt(pairwise_sq_dists(X))
        elif self.dissimilarity == "precomputed":
            D = check_matrix(X, "D")
        else:
            raise ValueError(f"unknown dissimilarity {self.dissimilarity!r}")
        result = classical_mds(D, self.n_components)
        self.embedding_ = result.X
        self.eigenvalues_ = result.eigenvalues
        self.strain_ = result.strain
        self.n_clamped_ = result.n_clamped
        self.positive_rank_ = result.positive_rank
        return self

    def fit_transform(self, X, y=None):
        return self.fit(X).embedding_

    def transform(self, X):
        raise NotImplementedError(
            "classical MDS is transductive: no out-of-sample map; "
            "use fit_transform on the full point set."
        )
