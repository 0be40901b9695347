"""Dense symmetric eigensolver, Cholesky factor and the symmetric-definite
generalized eigenproblem det[x M - A] = 0."""

from dataclasses import dataclass
from typing import Optional

import numpy as np

from ._errors import DomainError, NotPositiveDefiniteError, NumericalError
from ._validation import as_symmetric

MAX_SWEEPS = 60
MAX_CONDITION = 1e12


@dataclass(frozen=True)
class Spectrum:
    """Eigenvalues in descending order, eigenvectors as matching columns."""

    values: np.ndarray
    vectors: Optional[np.ndarray] = None

    def __len__(self):
        return len(self.values)


def _jacobi(a, want_vectors):
    a = a.copy()
    p = a.shape[0]
    v = np.eye(p) if want_vectors else None
    fro = np.linalg.norm(a)
    if fro == 0:
        return np.diag(a).copy(), v
    for _ in range(MAX_SWEEPS):
        off = np.sqrt(2.0 * np.sum(np.triu(a, 1) ** 2))
        if off < 1e-12 * fro:
            return np.diag(a).copy(), v
        for i in range(p - 1):
            for j in range(i + 1, p):
                aij = a[i, j]
                if abs(aij) < 1e-18 * fro:
                    # far below the stopping level; dropping it avoids overflow
                    a[i, j] = a[j, i] = 0.0
                    continue
                tau = (a[j, j] - a[i, i]) / (2.0 * aij)
                if abs(tau) > 1e150:
                    t = 0.5 / tau
                else:
                    t = (1.0 if tau >= 0 else -1.0) / (abs(tau) + np.sqrt(1.0 + tau * tau))
                c = 1.0 / np.sqrt(1.0 + t * t)
                s = t * c
                ci, cj = a[:, i].copy(), a[:, j].copy()
                a[:, i] = c * ci - s * cj
                a[:, j] = s * ci + c * cj
                ri, rj = a[i, :].copy(), a[j, :].copy()
                a[i, :] = c * ri - s * rj
                a[j, :] = s * ri + c * rj
                a[i, j] = a[j, i] = 0.0
                if v is not None:
                    vi, vj = v[:, i].copy(), v[:, j].copy()
                    v[:, i] = c * vi - s * vj
                    v[:, j] = s * vi + c * vj
    raise NumericalError(f"Jacobi iteration did not converge in {MAX_SWEEPS} sweeps")


def sym_eig(a, want_vectors=False, method="jacobi"):
    """Full spectrum of a real symmetric matrix, largest eigenvalue first.

    ``method="jacobi"`` runs cyclic Jacobi rotations until the off-diagonal
    Frobenius norm drops below 1e-12 of the matrix norm.  ``method="lapack"``
    hands the same problem to LAPACK and is what the Monte Carlo code uses.
    """
    a = as_symmetric(a)
    if a.shape[0] > 4096:
        raise DomainError("order must be <= 4096")
    if method == "jacobi":
        w, v = _jacobi(a, want_vectors)
    elif method == "lapack":
        if want_vectors:
            w, v = np.linalg.eigh(a)
        else:
            w, v = np.linalg.eigvalsh(a), None
    else:
        raise DomainError(f"unknown method {method!r}")
    order = np.argsort(w, kind="stable")[::-1]
    return Spectrum(w[order], None if v is None else v[:, order])


def cholesky(a):
    """Lower-triangular L with L L^T = a."""
    a = as_symmetric(a)
    p = a.shape[0]
    low = np.zeros_like(a)
    for j in range(p):
        row = low[j, :j]
        pivot = a[j, j] - row @ row
        if not pivot > 0:
            raise NotPositiveDefiniteError(f"non-positive pivot {pivot:.3e} at column {j}")
        low[j, j] = np.sqrt(pivot)
        if j + 1 < p:
            low[j + 1 :, j] = (a[j + 1 :, j] - low[j + 1 :, :j] @ row) / low[j, j]
    return low


def _forward(low, b):
    y = np.array(b, dtype=float, copy=True)
    for i in range(low.shape[0]):
        y[i] = (y[i] - low[i, :i] @ y[:i]) / low[i, i]
    return y


def _backward_transposed(low, b):
    """Solve L^T x = b."""
    x = np.array(b, dtype=float, copy=True)
    for i in range(low.shape[0] - 1, -1, -1):
        x[i] = (x[i] - low[i + 1 :, i] @ x[i + 1 :]) / low[i, i]
    return x


def generalized_eig(a, m, want_vectors=False, method="jacobi"):
    """Roots x of det[x m - a] = 0 by congruence with the Cholesky factor of m.

    Returned vectors (if requested) are m-orthonormal: V^T m V = I.
    """
    a = as_symmetric(a, "a")
    m = as_symmetric(m, "m")
    if a.shape != m.shape:
        raise DomainError("a and m must have the same shape")
    low = cholesky(m)
    diag = np.diag(low)
    if (diag.max() / diag.min()) ** 2 > MAX_CONDITION:
        raise NumericalError("m is too close to singular")
    half = _forward(low, a)  # L^-1 a
    c = _forward(low, half.T)  # L^-1 a L^-T
    c = 0.5 * (c + c.T)
    spec = sym_eig(c, want_vectors, method)
    if not want_vectors:
        return spec
    return Spectrum(spec.values, _backward_transposed(low, spec.vectors))
