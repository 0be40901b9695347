"""Seeded Monte Carlo for null spectra, spiked models and the four-factor model.

Replicate ``r`` of a run with seed ``s`` draws from its own PCG64 stream,
seeded by ``SeedSequence(s, spawn_key=(r,))``.  Results therefore do not
depend on how replicates are scheduled across worker threads.
"""

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np
from . import inference, linalg, specfun
from ._errors import DomainError
from ._validation import as_symmetric, check_positive, check_positive_int
from .laws import EnsembleCase, MPLaw, center_scale, mp_cdf

THREADS_ENV = "RMT_INFER_THREADS"


@dataclass(frozen=True)
class SimConfig:
    seed: int
    replicates: int
    center: bool = True
    workers: Optional[int] = None

    def __post_init__(self):
        seed = int(self.seed)
        if not 0 <= seed < 2**64:
            raise DomainError("seed must be a 64-bit unsigned integer")
        object.__setattr__(self, "seed", seed)
        object.__setattr__(self, "replicates", check_positive_int(self.replicates, "replicates"))
        if self.workers is not None:
            object.__setattr__(self, "workers", check_positive_int(self.workers, "workers"))


@dataclass(frozen=True)
class FactorModelParams:
    beta_f: float = 0.6
    sigma_b: float = 0.4
    sigma_f: float = 0.01257
    sigma_e: float = 0.0671
    num_factors: int = 4
    T: int = 80

    def __post_init__(self):
        for name in ("beta_f", "sigma_b", "sigma_f", "sigma_e"):
            check_positive(getattr(self, name), name)
        check_positive_int(self.num_factors, "num_factors")
        check_positive_int(self.T, "T")


@dataclass(frozen=True)
class EmpiricalSummary:
    """Per-replicate statistics plus their ECDF and a KS distance."""

    values: np.ndarray  # replicate order
    ks: Optional[float] = None
    reference: Optional[str] = None
    extra: dict = field(default_factory=dict)

    @property
    def samples(self):
        return np.sort(self.values, kind="stable")

    @property
    def mean(self):
        return float(np.mean(self.values))

    @property
    def sd(self):
        return float(np.std(self.values, ddof=1)) if self.values.size > 1 else 0.0

    def ecdf(self, t):
        s = self.samples
        return np.searchsorted(s, np.asarray(t, dtype=float), side="right") / s.size


# --------------------------------------------------------------------------
# RNG and sampling
# --------------------------------------------------------------------------


def replicate_rng(seed, r):
    ss = np.random.SeedSequence(int(seed), spawn_key=(int(r),))
    return np.random.Generator(np.random.PCG64(ss))


def standard_normals(rng, shape):
    """Box-Muller normals from the generator's uniforms."""
    size = int(np.prod(shape))
    half = (size + 1) // 2
    u1 = 1.0 - rng.random(half)  # (0, 1]
    u2 = rng.random(half)
    rad = np.sqrt(-2.0 * np.log(u1))
    ang = 2.0 * math.pi * u2
    z = np.empty(2 * half)
    z[0::2] = rad * np.cos(ang)
    z[1::2] = rad * np.sin(ang)
    return z[:size].reshape(shape)


def sample_data_matrix(p, n, cov=None, seed=0, rng=None):
    """p x n matrix with independent N_p(0, Sigma) columns.

    ``cov`` is None (identity), a ``SpikedModel`` whose spikes sit on the
    first coordinate axes, or a covariance matrix (applied by Cholesky).
    """
    p = check_positive_int(p, "p")
    n = check_positive_int(n, "n")
    if rng is None:
        rng = replicate_rng(seed, 0)
    if isinstance(cov, inference.SpikedModel):
        m = len(cov.spikes)
        if m > p:
            raise DomainError("more spikes than variables")
        # x = sum_k sqrt(l_k - s2) u_k e_k + s z
        z = standard_normals(rng, (p, n))
        u = standard_normals(rng, (m, n))
        x = math.sqrt(cov.base_var) * z
        extra = np.sqrt(np.maximum(np.array(cov.spikes) - cov.base_var, 0.0))
        x[:m] += extra[:, None] * u
        return x
    z = standard_normals(rng, (p, n))
    if cov is None:
        return z
    cov = as_symmetric(cov, "cov")
    if cov.shape != (p, p):
        raise DomainError(f"cov must be {p} x {p}")
    return linalg.cholesky(cov) @ z


def _worker_count(config):
    cap = os.environ.get(THREADS_ENV)
    workers = config.workers or os.cpu_count() or 1
    if cap:
        try:
            workers = min(workers, max(int(cap), 1))
        except ValueError:
            raise DomainError(f"{THREADS_ENV} must be an integer") from None
    return max(1, min(workers, config.replicates))


def run_replicates(config, fn: Callable):
    """[fn(r, rng_r) for r in range(replicates)], possibly in parallel.

    Any exception aborts the whole set.
    """
    workers = _worker_count(config)

    def one(r):
        return fn(r, replicate_rng(config.seed, r))

    if workers == 1:
        return [one(r) for r in range(config.replicates)]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(one, range(config.replicates)))


def _centered_cov(x, center):
    if center:
        x = x - x.mean(axis=1, keepdims=True)
    return x @ x.T / x.shape[1]


def ks_distance(samples, reference_cdf):
    """sup_t |ECDF(t) - F(t)|, checked on both sides of each jump."""
    s = np.sort(np.asarray(samples, dtype=float).ravel())
    if s.size == 0:
        raise DomainError("samples must be nonempty")
    m = s.size
    f = np.asarray(reference_cdf(s), dtype=float)
    hi = np.arange(1, m + 1) / m - f
    lo = f - np.arange(m) / m
    return float(min(max(hi.max(), lo.max(), 0.0), 1.0))


# --------------------------------------------------------------------------
# Experiments
# --------------------------------------------------------------------------


def simulate_largest_root(config, case):
    """Standardized largest-root statistic under the null, real data.

    Single Wishart: n l1 of the sample covariance.  With centering on, n S
    has n - 1 degrees of freedom, so the statistic is (n - 1) l1(S') with S'
    the unbiased covariance and the centering constants use n - 1.
    Double Wishart: largest root of det[x(A + B) - A] = 0 for directly
    drawn A ~ W_p(n1, I) and B ~ W_p(n2, I).
    """
    if case.field != "real":
        raise DomainError("only real-field cases can be simulated")
    if case.family == "single":
        p, n = case.p, case.n
        dof = n - 1 if config.center else n
        ref_case = EnsembleCase.single(dof, p)

        def stat(r, rng):
            x = standard_normals(rng, (p, n))
            s = _centered_cov(x, config.center)
            return n * linalg.sym_eig(s, method="lapack").values[0]

    else:
        p, n1, n2 = case.p, case.n1, case.n2
        ref_case = case

        def stat(r, rng):
            x = standard_normals(rng, (p, n1))
            y = standard_normals(rng, (p, n2))
            a = x @ x.T
            b = y @ y.T
            return linalg.generalized_eig(a, a + b, method="lapack").values[0]

    raw = np.array(run_replicates(config, stat))
    cs = center_scale(ref_case)
    z = (raw - cs.mu) / cs.sigma
    dist = specfun.tracy_widom(1)
    ks = ks_distance(z, lambda t: specfun.tw_cdf(dist, t))
    return EmpiricalSummary(
        z,
        ks,
        "F1",
        {"raw": raw, "mu": cs.mu, "sigma": cs.sigma, "effective_dims": ref_case.dims()},
    )


def simulate_cca_root(config, p, q, n):
    """Largest squared canonical correlation of independent N(0, I) blocks.

    Blocks are p x n and q x n and are centered, so the null law is the
    double Wishart case with n1 = q and n2 = n - 1 - q.
    """

    def stat(r, rng):
        x = standard_normals(rng, (p, n))
        y = standard_normals(rng, (q, n))
        return inference.canonical_correlations(x, y)[0]

    return EmpiricalSummary(np.array(run_replicates(config, stat)), extra={"n1": q, "n2": n - 1 - q, "p": p})


def simulate_mp(config, n, p):
    """Pooled eigenvalues of S under Sigma = I against MP(p / n)."""
    n = check_positive_int(n, "n")
    p = check_positive_int(p, "p")

    def eig(r, rng):
        s = _centered_cov(standard_normals(rng, (p, n)), config.center)
        return linalg.sym_eig(s, method="lapack").values

    spectra = np.array(run_replicates(config, eig))
    law = MPLaw(p / n)
    ks = ks_distance(spectra.ravel(), lambda t: mp_cdf(law, t))
    return EmpiricalSummary(
        spectra.ravel(),
        ks,
        f"MP({law.gamma:g})",
        {"spectra": spectra, "b_minus": law.b_minus, "b_plus": law.b_plus},
    )


@dataclass(frozen=True)
class SpikeSummary:
    top: EmpiricalSummary
    cosines: np.ndarray
    mean_cos: float
    mean_cos2: float
    limit: float
    matches: str  # "cosine", "squared", "both" or "neither"
    prediction: inference.SpikePrediction


def simulate_spike(config, gamma, ell1, n, rtol=0.02):
    """Top eigenvalue and overlap with e_1 for one spike of size ``ell1``.

    The sample eigenvector is sign-aligned so its cosine with the population
    direction is nonnegative.  ``matches`` says which cosine moment lands
    within ``rtol`` of the overlap limit.
    """
    gamma = check_positive(gamma, "gamma")
    n = check_positive_int(n, "n")
    p = int(round(gamma * n))
    if p < 1:
        raise DomainError("gamma * n must round to at least 1")
    model = inference.SpikedModel(gamma, (float(ell1),))

    def one(r, rng):
        x = sample_data_matrix(p, n, model, rng=rng)
        spec = linalg.sym_eig(_centered_cov(x, config.center), want_vectors=True, method="lapack")
        return spec.values[0], abs(spec.vectors[0, 0])

    out = np.array(run_replicates(config, one))
    top, cos = out[:, 0], out[:, 1]
    limit = inference.overlap_from_strength(gamma, max(ell1 - 1, 0.0))
    m1, m2 = float(cos.mean()), float((cos**2).mean())

    def close(v):
        return abs(v - limit) <= rtol * limit if limit > 0 else v <= rtol

    matches = {(True, True): "both", (True, False): "cosine", (False, True): "squared"}.get(
        (close(m1), close(m2)), "neither"
    )
    pred = inference.spike_predict(model, n=n) if ell1 > 1 else None
    return SpikeSummary(EmpiricalSummary(top, extra={"p": p}), cos, m1, m2, limit, matches, pred)


@dataclass(frozen=True)
class HardingRow:
    p: int
    T: int
    ell1: float
    ell2: float
    base: float
    threshold: float
    mp_edge: float
    detectable: tuple  # (ell1, ell2) detectability
    predicted_top: float
    top_mean: float
    top_eigs: np.ndarray  # replicates x k
    realized_pop: Optional[np.ndarray] = None


def simulate_brown_harding(params, config, p_grid=range(50, 201, 25), top_k=10, mode="spiked"):
    """Sample eigenvalues of the four-factor model across a grid of p.

    ``mode="spiked"`` draws returns with covariance diag(l1, l2, l2, l2,
    s2, ...) built from ``brown_population_eigs``.  ``mode="factor"`` draws
    loadings, factors and noise literally, which yields population
    eigenvalues that differ from the closed form (its leading term carries
    beta squared); the realized ones are reported per replicate.
    """
    if mode not in ("spiked", "factor"):
        raise DomainError("mode must be 'spiked' or 'factor'")
    T = params.T
    s2 = params.sigma_e**2
    rows = []
    for p in p_grid:
        p = check_positive_int(p, "p")
        if params.num_factors > p:
            raise DomainError("num_factors must not exceed p")
        ev = inference.brown_population_eigs(p, params.beta_f, params.sigma_b, params.sigma_f, params.sigma_e)
        spikes = (ev.ell1,) + (ev.ell2,) * (params.num_factors - 1)
        model = inference.SpikedModel(p / T, spikes, s2)
        det1 = inference.detectability(p, T, params.sigma_e, ev.ell1)
        det2 = inference.detectability(p, T, params.sigma_e, ev.ell2)
        pred = inference.spike_predict(model, 0, n=T)
        k = min(top_k, p)
        # each p gets its own stream family so grids can be extended freely
        sub = SimConfig((config.seed + p) % 2**64, config.replicates, config.center, config.workers)

        def one(r, rng, p=p, model=model, k=k):
            pop = None
            if mode == "spiked":
                x = sample_data_matrix(p, T, model, rng=rng)
            else:
                b = params.beta_f + params.sigma_b * standard_normals(rng, (p, params.num_factors))
                f = params.sigma_f * standard_normals(rng, (params.num_factors, T))
                e = params.sigma_e * standard_normals(rng, (p, T))
                x = b @ f + e
                pop = np.linalg.eigvalsh(params.sigma_f**2 * b.T @ b)[::-1] + s2
            vals = linalg.sym_eig(_centered_cov(x, config.center), method="lapack").values[:k]
            return vals, pop

        out = run_replicates(sub, one)
        eigs = np.array([o[0] for o in out])
        pops = np.array([o[1] for o in out]) if mode == "factor" else None
        rows.append(
            HardingRow(
                p,
                T,
                ev.ell1,
                ev.ell2,
                ev.base,
                det1.threshold,
                det1.mp_edge,
                (det1.detectable, det2.detectable),
                pred.mean,
                float(eigs[:, 0].mean()),
                eigs,
                pops,
            )
        )
    return rows

