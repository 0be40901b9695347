"""Largest-root tests, spiked-model predictions and canonical correlations."""

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from . import linalg, specfun
from ._errors import DomainError, NotPositiveDefiniteError, NumericalError
from ._validation import (
    check_finite_scalar,
    check_matrix,
    check_positive,
    check_positive_int,
    check_unit_vector,
)
from .laws import CenterScale, EnsembleCase, center_scale


@dataclass(frozen=True)
class TestResult:
    case: EnsembleCase
    raw_statistic: float
    standardized: float
    p_value: float
    center_scale: CenterScale

    __test__ = False  # not a pytest class


def largest_root_test(case, l1_hat):
    """Tracy-Widom test of the null W_p(n, I) (or its double-Wishart analogue).

    ``l1_hat`` is the largest eigenvalue of S = X X^T / n for single Wishart
    (the statistic is n * l1_hat), or the largest root of
    det[x(A + B) - A] = 0 for double Wishart.
    """
    l1_hat = check_finite_scalar(l1_hat, "l1_hat")
    if case.family == "single":
        if l1_hat <= 0:
            raise DomainError("l1_hat must be positive")
        raw = case.n * l1_hat
    else:
        if not 0 < l1_hat < 1:
            raise DomainError("double Wishart root must lie in (0, 1)")
        raw = l1_hat
    cs = center_scale(case)
    z = (raw - cs.mu) / cs.sigma
    dist = specfun.tracy_widom(case.beta)
    return TestResult(case, raw, z, specfun.tw_sf(dist, z), cs)


def sample_covariance(x, center=True):
    """S = n^-1 X X^T for a p x n data matrix, variables centered first."""
    x = check_matrix(x, "x")
    if center:
        x = x - x.mean(axis=1, keepdims=True)
    return x @ x.T / x.shape[1]


def largest_root_test_from_data(x, center=True):
    """Single-Wishart real test on a p x n data matrix.

    Centering uses up one degree of freedom, so the null is W_p(n - 1, I)
    for n S when ``center`` is true.
    """
    x = check_matrix(x, "x")
    p, n = x.shape
    dof = n - 1 if center else n
    if dof < 1:
        raise DomainError("need at least two observations")
    s = sample_covariance(x, center)
    top = linalg.sym_eig(s, method="lapack").values[0]
    # n S ~ W_p(dof, I): rescale so that dof * l1 is the Wishart eigenvalue
    return largest_root_test(EnsembleCase.single(dof, p), top * n / dof)


def _cca_pencil(x_block, y_block):
    x = check_matrix(x_block, "x_block")
    y = check_matrix(y_block, "y_block")
    if x.shape[1] != y.shape[1]:
        raise DomainError("blocks must share the number of observations")
    x = x - x.mean(axis=1, keepdims=True)
    y = y - y.mean(axis=1, keepdims=True)
    n = x.shape[1]
    sxx = x @ x.T / n
    syy = y @ y.T / n
    sxy = x @ y.T / n
    try:
        ly = linalg.cholesky(syy)
        linalg.cholesky(sxx)
    except NotPositiveDefiniteError as exc:
        raise NumericalError(f"rank-deficient within-block covariance: {exc}") from None
    w = linalg._forward(ly, sxy.T)  # L_y^-1 S_yx
    a = w.T @ w  # S_xy S_yy^-1 S_yx
    return a, sxx, syy, sxy


def canonical_correlations(x_block, y_block, want_vectors=False):
    """Squared sample canonical correlations, largest first.

    Blocks are p x n and q x n.  With A = S_xy S_yy^-1 S_yx and B = S_xx - A
    the values solve A v = r^2 (A + B) v.  Only min(p, q) values are
    returned; the smaller block plays the role of X.
    """
    x = check_matrix(x_block, "x_block")
    y = check_matrix(y_block, "y_block")
    swapped = x.shape[0] > y.shape[0]
    if swapped:
        x, y = y, x
    p, n = x.shape
    q = y.shape[0]
    if n <= p + q:
        raise DomainError("need n > p + q observations")
    a, sxx, _, _ = _cca_pencil(x, y)
    spec = linalg.generalized_eig(a, sxx, want_vectors=want_vectors)
    values = np.clip(spec.values, 0.0, 1.0)
    if want_vectors:
        return values, spec.vectors, swapped
    return values


def cca_root_test(x_block, y_block):
    """Double-Wishart real test of independence between two data blocks.

    Under independence (and after centering) A ~ W_p(q, I) and
    B ~ W_p(n - 1 - q, I).
    """
    r2 = canonical_correlations(x_block, y_block)
    x = np.asarray(x_block)
    y = np.asarray(y_block)
    p, q = sorted((x.shape[0], y.shape[0]))
    n = x.shape[1]
    case = EnsembleCase.double(q, n - 1 - q, p)
    top = float(min(max(r2[0], np.nextafter(0, 1)), np.nextafter(1, 0)))
    return largest_root_test(case, top)


# --------------------------------------------------------------------------
# Spiked covariance model
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class SpikedModel:
    """Sigma = diag(l_1, ..., l_M, s2, ..., s2) with aspect ratio gamma = p/n.

    ``spikes`` are covariance eigenvalues; ``strengths`` are the
    base-variance-relative excesses l_k / s2 - 1.
    """

    gamma: float
    spikes: tuple
    base_var: float = 1.0

    def __post_init__(self):
        check_positive(self.gamma, "gamma")
        check_positive(self.base_var, "base_var")
        spikes = tuple(float(s) for s in np.atleast_1d(self.spikes))
        if not spikes:
            raise DomainError("at least one spike is required")
        if any(a < b for a, b in zip(spikes, spikes[1:])):
            raise DomainError("spikes must be in descending order")
        if any(not math.isfinite(s) or s <= 0 for s in spikes):
            raise DomainError("spikes must be positive")
        object.__setattr__(self, "gamma", float(self.gamma))
        object.__setattr__(self, "base_var", float(self.base_var))
        object.__setattr__(self, "spikes", spikes)

    @property
    def strengths(self):
        return tuple(s / self.base_var - 1 for s in self.spikes)


@dataclass(frozen=True)
class SpikePrediction:
    """Predicted location and spread of a top sample eigenvalue.

    In the Tracy-Widom regime ``scale`` is the TW scale parameter and ``sd``
    the implied standard deviation; in the Gaussian regime both equal the
    asymptotic standard deviation.  At the critical point the spread
    vanishes to leading order and no law is attached.
    """

    regime: str
    threshold: float
    mean: float
    sd: Optional[float]
    fluctuation_law: Optional[str]
    scale: Optional[float] = None


def spiked_mean(ell, gamma):
    """l (1 + gamma/(l - 1)) for a unit-base-variance spike above threshold."""
    return ell * (1 + gamma / (ell - 1))


def spiked_sd_factor(ell, gamma):
    """sigma(l) = l sqrt(1 - gamma/(l - 1)^2); zero at the transition."""
    return ell * math.sqrt(max(1 - gamma / (ell - 1) ** 2, 0.0))


def spike_predict(model, which=0, n=None, field="real"):
    """Phase-transition prediction for the ``which``-th (0-based) spike.

    The displayed Gaussian variance sigma^2(l)/n is the complex-data value;
    for real data it doubles (as in the fixed-p limit 2 l^2/n), and
    ``field`` selects which one is reported.
    """
    if field not in ("real", "complex"):
        raise DomainError("field must be 'real' or 'complex'")
    if not 0 <= which < len(model.spikes):
        raise DomainError(f"which must index one of {len(model.spikes)} spikes")
    if n is not None:
        n = check_positive_int(n, "n")
    ell = model.spikes[which] / model.base_var
    if ell <= 1:
        raise DomainError("spike must exceed the base variance")
    g = model.gamma
    s2 = model.base_var
    rg = math.sqrt(g)
    threshold = 1 + rg
    edge = (1 + rg) ** 2
    beta = 1 if field == "real" else 2
    if ell > threshold:
        sd = None
        if n is not None:
            sd = s2 * spiked_sd_factor(ell, g) * math.sqrt(2 / beta) / math.sqrt(n)
        return SpikePrediction("supercritical", threshold * s2, s2 * spiked_mean(ell, g), sd, "Gaussian", sd)
    if ell == threshold:
        return SpikePrediction("critical", threshold * s2, s2 * edge, 0.0, None, 0.0)
    scale = sd = None
    if n is not None:
        scale = s2 * (1 + rg) * (1 + 1 / rg) ** (1 / 3) * n ** (-2 / 3)
        sd = scale * specfun.tw_moments(specfun.tracy_widom(beta))[1]
    return SpikePrediction("subcritical", threshold * s2, s2 * edge, sd, "TW", scale)


def overlap_limit(model, which=0):
    """Limit of the squared cosine between sample and population eigenvectors.

    (1 - gamma/lambda^2) / (1 + gamma/lambda) above lambda = sqrt(gamma),
    zero below.  Monte Carlo (see ``simulate_spike``) shows this limit is
    attained by the squared cosine, not the cosine itself.
    """
    lam = model.strengths[which]
    if lam < 0:
        raise DomainError("spike strength must be >= 0")
    return overlap_from_strength(model.gamma, lam)


def overlap_from_strength(gamma, lam):
    gamma = check_positive(gamma, "gamma")
    lam = check_positive(lam, "lambda", strict=False)
    if lam <= math.sqrt(gamma):
        return 0.0
    return (1 - gamma / lam**2) / (1 + gamma / lam)


def loss(theta_hat, theta):
    """||theta_hat - sign(<theta_hat, theta>) theta||^2 for unit vectors."""
    a = check_unit_vector(theta_hat, "theta_hat")
    b = check_unit_vector(theta, "theta")
    if a.shape != b.shape:
        raise DomainError("vectors must have equal length")
    sign = 1.0 if a @ b >= 0 else -1.0
    d = a - sign * b
    return float(d @ d)


# --------------------------------------------------------------------------
# Four-factor model
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class BrownEigenvalues:
    ell1: float
    ell2: float  # shared by factors 2..4
    base: float


def brown_population_eigs(p, beta_f, sigma_b, sigma_f, sigma_e):
    """l_j = p sigma_f^2 (sigma_b^2 + 4 beta delta_j1) + sigma_e^2."""
    p = check_positive_int(p, "p")
    beta_f = check_positive(beta_f, "beta_f", strict=False)
    sigma_b = check_positive(sigma_b, "sigma_b", strict=False)
    sigma_f = check_positive(sigma_f, "sigma_f", strict=False)
    sigma_e = check_positive(sigma_e, "sigma_e")
    base = sigma_e**2
    common = p * sigma_f**2 * sigma_b**2
    return BrownEigenvalues(common + p * sigma_f**2 * 4 * beta_f + base, common + base, base)


@dataclass(frozen=True)
class Detectability:
    detectable: bool
    threshold: float
    mp_edge: float


def detectability(p, T, sigma_e, ell):
    """Is a population eigenvalue above the phase transition for p/T?"""
    p = check_positive_int(p, "p")
    T = check_positive_int(T, "T")
    sigma_e = check_positive(sigma_e, "sigma_e")
    ell = check_finite_scalar(ell, "ell")
    r = math.sqrt(p / T)
    threshold = sigma_e**2 * (1 + r)
    return Detectability(ell > threshold, threshold, sigma_e**2 * (1 + r) ** 2)
