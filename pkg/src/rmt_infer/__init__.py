"""Largest-eigenvalue inference for high-dimensional covariance problems."""

__version__ = "0.1.0"

from ._errors import (  # noqa: E402
    BuildError,
    DomainError,
    IntegrationError,
    NotPositiveDefiniteError,
    NumericalError,
    RMTError,
)
from .inference import (  # noqa: E402
    SpikedModel,
    SpikePrediction,
    TestResult,
    brown_population_eigs,
    canonical_correlations,
    cca_root_test,
    detectability,
    largest_root_test,
    largest_root_test_from_data,
    loss,
    overlap_limit,
    spike_predict,
)
from .laws import CenterScale, EnsembleCase, MPLaw, center_scale, mp_cdf, mp_density  # noqa: E402
from .linalg import Spectrum, cholesky, generalized_eig, sym_eig  # noqa: E402
from .specfun import (  # noqa: E402
    airy_ai,
    fredholm_tw2_cdf,
    solve_painleve_ii,
    tracy_widom,
    tw_cdf,
    tw_pdf,
    tw_quantile,
)

__all__ = [name for name in dir() if not name.startswith("_")]
