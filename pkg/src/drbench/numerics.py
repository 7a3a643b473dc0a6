"""Dense numeric primitives shared by every other module.

Everything here is deterministic: the eigensolver is a cyclic Jacobi
sweep with a fixed rotation order, and :class:`RandomStream` produces the
same draw sequence for the same seed on every platform (uniforms come
from PCG64, gaussians from Box-Muller applied to those uniforms).
"""

from dataclasses import dataclass

import numpy as np


class NumericsError(ValueError):
    """Invalid numeric input (non-finite, wrong shape, asymmetric...)."""


class ConvergenceError(RuntimeError):
    """An iterative routine failed to reach its tolerance."""


def check_matrix(X, name="X"):
    """Coerce to a finite 2-D float array or raise NumericsError."""
    X = np.asarray(X, dtype=float)
    if X.ndim != 2:
        raise NumericsError(f"{name} must be 2-D, got shape {X.shape}")
    if not np.all(np.isfinite(X)):
        raise NumericsError(f"{name} contains non-finite entries")
    return X


def pairwise_sq_dists(X):
    """Squared Euclidean distance matrix of the rows of X.

    Returns an n x n symmetric matrix with zero diagonal. Computed via
    the expansion |a-b|^2 = |a|^2 + |b|^2 - 2<a,b>, then clipped at 0
    and symmetrized to kill rounding noise.
    """
    X = check_matrix(X)
    sq = np.einsum("ij,ij->i", X, X)
    D = sq[:, None] + sq[None, :] - 2.0 * (X @ X.T)
    np.maximum(D, 0.0, out=D)
    D = 0.5 * (D + D.T)
    np.fill_diagonal(D, 0.0)
    return D


@dataclass
class EighResult:
    """Eigendecomposition of a symmetric matrix, eigenvalues descending.

    Column j of `eigenvectors` pairs with `eigenvalues[j]`; columns are
    unit-norm and mutually orthogonal. The largest-magnitude component
    of each eigenvector is made positive so the decomposition is unique
    up to degeneracy.
    """

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray


def jacobi_eigh(S, max_sweeps=100, rel_tol=1e-10):
    """Eigendecomposition of a symmetric matrix by cyclic Jacobi rotations.

    Sweeps over all (p, q) pairs in a fixed row-major order, rotating
    away each off-diagonal element. Converged when the off-diagonal
    Frobenius norm drops below ``rel_tol * ||S||_F``.

    Raises
    ------
    NumericsError
        if S is not square or not symmetric within 1e-10.
    ConvergenceError
        if the tolerance is not met after ``max_sweeps`` sweeps.
    """
    S = check_matrix(S, "S")
    n, m = S.shape
    if n != m:
        raise NumericsError(f"S must be square, got {S.shape}")
    if n > 1 and np.max(np.abs(S - S.T)) > 1e-10 * (1.0 + np.max(np.abs(S))):
        raise NumericsError("S is not symmetric within tolerance")

    A = 0.5 * (S + S.T)
    V = np.eye(n)
    norm_S = np.linalg.norm(A)
    if n == 1:
        return EighResult(np.array([A[0, 0]]), np.array([[1.0]]))

    def off_norm(M):
        # computed entrywise: the ||M||^2 - sum(diag^2) form loses the
        # small residual to cancellation near convergence
        off = M - np.diag(np.diag(M))
        return np.linalg.norm(off)

    tol = rel_tol * max(norm_S, np.finfo(float).tiny)
    converged = off_norm(A) <= tol
    for _ in range(max_sweeps):
        if converged:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = A[p, q]
                if apq == 0.0:
                    continue
                # classic Jacobi rotation zeroing A[p, q]
                theta = (A[q, q] - A[p, p]) / (2.0 * apq)
                if theta == 0.0:
                    t = 1.0
                elif abs(theta) > 1e150:  # theta^2 would overflow
                    t = 1.0 / (2.0 * theta)
                else:
                    t = np.sign(theta) / (abs(theta) + np.sqrt(theta * theta + 1.0))
                c = 1.0 / np.sqrt(t * t + 1.0)
                s = t * c
                rot_p = c * A[p, :] - s * A[q, :]
                rot_q = s * A[p, :] + c * A[q, :]
                A[p, :], A[q, :] = rot_p, rot_q
                rot_p = c * A[:, p] - s * A[:, q]
                rot_q = s * A[:, p] + c * A[:, q]
                A[:, p], A[:, q] = rot_p, rot_q
                A[p, q] = A[q, p] = 0.0
                rot_p = c * V[:, p] - s * V[:, q]
                rot_q = s * V[:, p] + c * V[:, q]
                V[:, p], V[:, q] = rot_p, rot_q
        converged = off_norm(A) <= tol
    if not converged:
        raise ConvergenceError(
            f"Jacobi eigensolver: off-diagonal residual {off_norm(A):.3e} "
            f"after {max_sweeps} sweeps (tol {tol:.3e})"
        )

    evals = np.diag(A).copy()
    order = np.argsort(-evals, kind="stable")
    evals = evals[order]
    V = V[:, order]
    # sign convention: largest-magnitude component of each column positive
    for j in range(n):
        k = np.argmax(np.abs(V[:, j]))
        if V[k, j] < 0:
            V[:, j] = -V[:, j]
    return EighResult(evals, V)


def standardize(X):
    """Center each column and scale to unit population (1/n) std.

    Zero-variance columns come out all-zero instead of raising; UCI
    tables can contain constant columns after row filtering.

    Returns (X_std, means, stds) where stds holds the raw population
    standard deviations (possibly zero).
    """
    X = check_matrix(X)
    if X.shape[0] < 2:
        raise NumericsError("standardize needs at least 2 rows")
    means = X.mean(axis=0)
    stds = X.std(axis=0)  # population (1/n) variance
    safe = np.where(stds > 0.0, stds, 1.0)
    Z = (X - means) / safe
    Z[:, stds == 0.0] = 0.0
    return Z, means, stds


class RandomStream:
    """Seeded deterministic random source.

    Uniform draws come straight from a PCG64 generator. Gaussian draws
    are produced by the Box-Muller transform on pairs of those uniforms
    (second value cached), and shuffles are in-place Fisher-Yates driven
    by uniform draws, so the entire draw sequence is a pure function of
    the seed.
    """

    def __init__(self, seed):
        self.seed = int(seed)
        self._gen = np.random.Generator(np.random.PCG64(self.seed))
        self._spare_gaussian = None

    def uniform(self, size=None):
        """Uniform draw(s) on [0, 1)."""
        return self._gen.random(size)

    def gaussian(self, size=None):
        """Standard normal draw(s) via Box-Muller on the uniform stream."""
        if size is None:
            if self._spare_gaussian is not None:
                z = self._spare_gaussian
                self._spare_gaussian = None
                return z
            z0, z1 = self._box_muller_pair()
            self._spare_gaussian = z1
            return z0
        count = int(np.prod(size))
        out = np.empty(count)
        for i in range(count):
            out[i] = self.gaussian()
        return out.reshape(size)

    def _box_muller_pair(self):
        u1 = self._gen.random()
        while u1 == 0.0:  # log(0) guard
            u1 = self._gen.random()
        u2 = self._gen.random()
        r = np.sqrt(-2.0 * np.log(u1))
        return r * np.cos(2.0 * np.pi * u2), r * np.sin(2.0 * np.pi * u2)

    def shuffle(self, items):
        """Return a shuffled copy of a sequence (Fisher-Yates)."""
        arr = list(items)
        for i in range(len(arr) - 1, 0, -1):
            j = int(self.uniform() * (i + 1))
            j = min(j, i)
            arr[i], arr[j] = arr[j], arr[i]
        return arr

    def permutation(self, n):
        """Shuffled indices 0..n-1 as an int array."""
        return np.array(self.shuffle(range(n)), dtype=int)


def random_stream(seed):
    """Convenience constructor for RandomStream."""
    return RandomStream(seed)
