"""Small input-validation helpers used across the package."""

import math

import numpy as np

from ._errors import DomainError


def check_finite_scalar(x, name="x"):
    try:
        x = float(x)
    except (TypeError, ValueError):
        raise DomainError(f"{name} must be a real number, got {x!r}") from None
    if not math.isfinite(x):
        raise DomainError(f"{name} must be finite, got {x}")
    return x


def check_positive(x, name="x", strict=True):
    x = check_finite_scalar(x, name)
    if x < 0 or (strict and x == 0):
        raise DomainError(f"{name} must be {'> 0' if strict else '>= 0'}, got {x}")
    return x


def check_positive_int(n, name="n", minimum=1):
    if isinstance(n, bool) or int(n) != n:
        raise DomainError(f"{name} must be an integer, got {n!r}")
    n = int(n)
    if n < minimum:
        raise DomainError(f"{name} must be >= {minimum}, got {n}")
    return n


def check_probability(p, name="p", open_interval=True):
    p = check_finite_scalar(p, name)
    if open_interval and not 0.0 < p < 1.0:
        raise DomainError(f"{name} must lie in (0, 1), got {p}")
    if not open_interval and not 0.0 <= p <= 1.0:
        raise DomainError(f"{name} must lie in [0, 1], got {p}")
    return p


def check_matrix(a, name="a", square=False):
    a = np.asarray(a, dtype=float)
    if a.ndim != 2 or a.size == 0:
        raise DomainError(f"{name} must be a non-empty 2-D array, got shape {a.shape}")
    if square and a.shape[0] != a.shape[1]:
        raise DomainError(f"{name} must be square, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise DomainError(f"{name} has non-finite entries")
    return a


def as_symmetric(a, name="a", rtol=1e-8):
    """Return a symmetric copy built from the lower triangle of ``a``.

    Asymmetry larger than ``rtol * max|a|`` is rejected rather than hidden.
    """
    a = check_matrix(a, name, square=True)
    scale = np.max(np.abs(a))
    if np.max(np.abs(a - a.T)) > rtol * max(scale, np.finfo(float).tiny):
        raise DomainError(f"{name} is not symmetric")
    lower = np.tril(a)
    return lower + np.tril(a, -1).T


def check_unit_vector(v, name="v", tol=1e-8):
    v = np.asarray(v, dtype=float).ravel()
    if v.size == 0 or not np.all(np.isfinite(v)):
        raise DomainError(f"{name} must be a finite non-empty vector")
    if abs(np.linalg.norm(v) - 1.0) > tol:
        raise DomainError(f"{name} must have unit norm (got {np.linalg.norm(v)})")
    return v
