"""Limit laws and exact null densities for single and double Wishart spectra.

Also home of the centering and scaling constants that put the largest
eigenvalue on the Tracy-Widom scale.
"""

import math
from dataclasses import dataclass, field

import numpy as np

from ._errors import DomainError
from ._validation import check_finite_scalar, check_positive, check_positive_int

FAMILIES = ("single", "double")
FIELDS = ("real", "complex")


# --------------------------------------------------------------------------
# Marcenko-Pastur
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class MPLaw:
    """Marcenko-Pastur law for aspect ratio gamma = p / n and unit variance."""

    gamma: float

    def __post_init__(self):
        object.__setattr__(self, "gamma", check_positive(self.gamma, "gamma"))

    @property
    def b_minus(self):
        return (1 - math.sqrt(self.gamma)) ** 2

    @property
    def b_plus(self):
        return (1 + math.sqrt(self.gamma)) ** 2

    @property
    def atom_at_zero(self):
        return max(0.0, 1 - 1 / self.gamma)


def mp_density(law, t):
    """Density of the continuous part; the atom at zero is not included."""
    t = np.asarray(t, dtype=float)
    lo, hi = law.b_minus, law.b_plus
    inside = (t > lo) & (t < hi) & (t > 0)
    with np.errstate(invalid="ignore", divide="ignore"):
        val = np.sqrt((hi - t) * (t - lo)) / (2 * math.pi * law.gamma * t)
    out = np.where(inside, val, 0.0)
    return float(out) if out.ndim == 0 else out


def mp_cdf(law, t, nodes=200):
    """Distribution function, the continuous part integrated numerically.

    The substitution t = b- + (b+ - b-)(1 - cos theta)/2 removes the square-root
    edges, leaving a smooth integrand for Gauss-Legendre.
    """
    t_arr = np.atleast_1d(np.asarray(t, dtype=float))
    lo, hi = law.b_minus, law.b_plus
    half = (hi - lo) / 2
    x, w = np.polynomial.legendre.leggauss(int(nodes))
    out = np.empty_like(t_arr)
    for i, ti in enumerate(t_arr):
        if ti < 0:
            out[i] = 0.0
            continue
        base = law.atom_at_zero
        if ti <= lo:
            out[i] = base
            continue
        if ti >= hi:
            out[i] = 1.0
            continue
        top = 2 * math.asin(math.sqrt((ti - lo) / (2 * half)))
        if top == 0:
            out[i] = base
            continue
        theta = (x + 1) * top / 2
        tt = lo + 2 * half * np.sin(theta / 2) ** 2
        f = half**2 * np.sin(theta) ** 2 / (2 * math.pi * law.gamma * tt)
        out[i] = min(base + top / 2 * (w @ f), 1.0)
    return float(out[0]) if np.ndim(t) == 0 else out


# --------------------------------------------------------------------------
# Ensembles and joint densities
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class EnsembleCase:
    """One of the four null settings: (single | double) x (real | complex).

    Single Wishart uses ``n`` and ``p``; double Wishart uses ``n1``, ``n2``
    (degrees of freedom of A and B) and ``p``.
    """

    family: str
    field: str
    p: int
    n: int = None
    n1: int = None
    n2: int = None

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise DomainError(f"family must be one of {FAMILIES}")
        if self.field not in FIELDS:
            raise DomainError(f"field must be one of {FIELDS}")
        object.__setattr__(self, "p", check_positive_int(self.p, "p"))
        if self.family == "single":
            object.__setattr__(self, "n", check_positive_int(self.n, "n"))
        else:
            n1 = check_positive_int(self.n1, "n1", minimum=self.p)
            n2 = check_positive_int(self.n2, "n2", minimum=self.p)
            object.__setattr__(self, "n1", n1)
            object.__setattr__(self, "n2", n2)

    @classmethod
    def single(cls, n, p, field="real"):
        return cls("single", field, p, n=n)

    @classmethod
    def double(cls, n1, n2, p, field="real"):
        return cls("double", field, p, n1=n1, n2=n2)

    @property
    def beta(self):
        return 1 if self.field == "real" else 2

    def dims(self):
        if self.family == "single":
            return {"n": self.n, "p": self.p}
        return {"n1": self.n1, "n2": self.n2, "p": self.p}


@dataclass(frozen=True)
class CenterScale:
    mu: float
    sigma: float
    detail: dict = field(default_factory=dict, compare=False)


def _single_constants(n, p):
    if n <= 0 or p <= 0:
        raise DomainError("effective dimensions must be positive")
    rn, rp = math.sqrt(n), math.sqrt(p)
    return (rn + rp) ** 2, (rn + rp) * (1 / rn + 1 / rp) ** (1 / 3)


def _double_constants(n1, p, kappa, shift):
    a = (n1 + shift) / kappa
    b = (p + shift) / kappa
    if not (0 < a < 1 and 0 < b < 1):
        raise DomainError("double Wishart angles out of range")
    phi = 2 * math.asin(math.sqrt(a))
    gam = 2 * math.asin(math.sqrt(b))
    if phi + gam >= math.pi:
        raise DomainError("double Wishart angles out of range")
    mu = math.sin((phi + gam) / 2) ** 2
    sigma3 = math.sin(phi + gam) ** 4 / (4 * kappa**2 * math.sin(phi) * math.sin(gam))
    return mu, sigma3 ** (1 / 3)


def center_scale(case):
    """Centering and scaling for the largest-eigenvalue statistic.

    single/real     n*l1 against (sqrt(n-1/2) + sqrt(p-1/2))^2
    single/complex  mean of the (n, p) -> (n+1/2, p+1/2) constants taken at
                    (n-1, p) and (n, p-1)
    double/real     largest root x1, kappa = n1+n2-1, half-shifts of -1/2
    double/complex  largest root x1, kappa = n1+n2+1, half-shifts of +1/2,
                    mean of the p and p-1 constants
    """
    if case.family == "single":
        n, p = case.n, case.p
        if case.field == "real":
            mu, sigma = _single_constants(n - 0.5, p - 0.5)
            return CenterScale(mu, sigma)
        lo = _single_constants(n - 1 + 0.5, p + 0.5)
        hi = _single_constants(n + 0.5, p - 1 + 0.5)
        return CenterScale(
            (lo[0] + hi[0]) / 2,
            (lo[1] + hi[1]) / 2,
            {"weights": (0.5, 0.5), "n_minus_1": lo, "p_minus_1": hi},
        )
    n1, n2, p = case.n1, case.n2, case.p
    if case.field == "real":
        kappa = n1 + n2 - 1
        mu, sigma = _double_constants(n1, p, kappa, -0.5)
        return CenterScale(mu, sigma, {"kappa": kappa})
    kappa = n1 + n2 + 1
    at_p = _double_constants(n1, p, kappa, 0.5)
    at_pm1 = _double_constants(n1, p - 1, kappa, 0.5)
    return CenterScale(
        (at_p[0] + at_pm1[0]) / 2,
        (at_p[1] + at_pm1[1]) / 2,
        {"kappa": kappa, "weights": (0.5, 0.5), "p": at_p, "p_minus_1": at_pm1},
    )


def log_multigamma(a, p):
    """log Gamma_p(a) = p(p-1)/4 log(pi) + sum_i log Gamma(a - (i-1)/2)."""
    if a <= (p - 1) / 2:
        raise DomainError("multivariate gamma requires a > (p - 1)/2")
    return p * (p - 1) / 4 * math.log(math.pi) + sum(math.lgamma(a - i / 2) for i in range(p))


@dataclass(frozen=True)
class JointDensityParams:
    family: str
    p: int
    n: int = None
    n1: int = None
    n2: int = None

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise DomainError(f"family must be one of {FAMILIES}")
        p = check_positive_int(self.p, "p")
        if self.family == "single":
            check_positive_int(self.n, "n", minimum=p)
        else:
            check_positive_int(self.n1, "n1", minimum=p)
            check_positive_int(self.n2, "n2", minimum=p)

    def log_constant(self):
        p = self.p
        if self.family == "single":
            n = self.n
            return (
                -p * n / 2 * math.log(2)
                + p * p / 2 * math.log(math.pi)
                - log_multigamma(p / 2, p)
                - log_multigamma(n / 2, p)
            )
        n1, n2 = self.n1, self.n2
        return (
            p * p / 2 * math.log(math.pi)
            + log_multigamma((n1 + n2) / 2, p)
            - log_multigamma(p / 2, p)
            - log_multigamma(n1 / 2, p)
            - log_multigamma(n2 / 2, p)
        )


def joint_density_log(params, x):
    """Log of the exact null joint density of ordered eigenvalues.

    Single Wishart: eigenvalues of A ~ W_p(n, I).  Double Wishart: roots of
    det[x(A + B) - A] = 0 with A ~ W_p(n1, I), B ~ W_p(n2, I).
    """
    x = np.asarray(x, dtype=float).ravel()
    if x.size != params.p:
        raise DomainError(f"expected {params.p} eigenvalues, got {x.size}")
    if not np.all(np.isfinite(x)):
        raise DomainError("eigenvalues must be finite")
    gaps = -np.diff(x)
    if np.any(gaps < 0):
        raise DomainError("eigenvalues must be sorted in descending order")
    if params.family == "single":
        if np.any(x <= 0):
            raise DomainError("single Wishart eigenvalues must be positive")
    elif np.any((x <= 0) | (x >= 1)):
        raise DomainError("double Wishart roots must lie in (0, 1)")
    if np.any(gaps == 0):
        return -math.inf
    p = params.p
    if params.family == "single":
        log_w = (params.n - p - 1) * np.log(x) - x
    else:
        log_w = (params.n1 - p - 1) * np.log(x) + (params.n2 - p - 1) * np.log1p(-x)
    diffs = x[:, None] - x[None, :]
    iu = np.triu_indices(p, 1)
    return float(params.log_constant() + 0.5 * log_w.sum() + np.log(diffs[iu]).sum())


def weight_function(family, x, a=0.0, b=0.0):
    """Classical orthogonal-polynomial weights; zero outside the support."""
    x = check_finite_scalar(x, "x")
    if family == "hermite":
        return math.exp(-x * x / 2)
    if family == "laguerre":
        return x**a * math.exp(-x) if x > 0 or (x == 0 and a >= 0) else 0.0
    if family == "jacobi":
        return (1 - x) ** a * (1 + x) ** b if -1 < x < 1 else 0.0
    raise DomainError(f"unknown family {family!r}")
