"""scikit-learn style wrappers around the functional core.

These follow the usual convention of rows = observations, columns =
variables, and transpose internally to the p x n layout used elsewhere.
"""

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_array, check_is_fitted

from . import inference, linalg
from ._errors import DomainError


class LargestRootTest(BaseEstimator):
    """Tracy-Widom test that the covariance is the identity.

    After ``fit`` the attributes ``statistic_``, ``p_value_`` and
    ``result_`` hold the test outcome; ``eigenvalues_`` is the sample
    covariance spectrum, largest first.
    """

    def __init__(self, center=True):
        self.center = center

    def fit(self, X, y=None):
        X = check_array(X, ensure_min_samples=2)
        data = X.T
        self.result_ = inference.largest_root_test_from_data(data, center=self.center)
        s = inference.sample_covariance(data, self.center)
        self.eigenvalues_ = linalg.sym_eig(s, method="lapack").values
        self.statistic_ = self.result_.standardized
        self.p_value_ = self.result_.p_value
        self.n_features_in_ = X.shape[1]
        return self


class CanonicalCorrelation(BaseEstimator, TransformerMixin):
    """Sample canonical correlations between X and Y.

    ``transform`` projects X onto its canonical directions.  The number of
    components is min(p, q) unless ``n_components`` is smaller.
    """

    def __init__(self, n_components=None):
        self.n_components = n_components

    def fit(self, X, Y):
        X = check_array(X, ensure_min_samples=2)
        Y = check_array(Y, ensure_min_samples=2)
        if X.shape[0] != Y.shape[0]:
            raise DomainError("X and Y must have the same number of rows")
        k = min(X.shape[1], Y.shape[1])
        if self.n_components is not None:
            if not 1 <= self.n_components <= k:
                raise DomainError(f"n_components must be in [1, {k}]")
            k = self.n_components
        r2, vecs, swapped = inference.canonical_correlations(X.T, Y.T, want_vectors=True)
        self.squared_correlations_ = r2[:k]
        self.test_ = inference.cca_root_test(X.T, Y.T)
        if swapped:
            # directions came out for Y; recover X directions from the
            # population relation v_x proportional to S_xx^-1 S_xy v_y
            xc = X - X.mean(axis=0)
            yc = Y - Y.mean(axis=0)
            sxx = xc.T @ xc / X.shape[0]
            sxy = xc.T @ yc / X.shape[0]
            vecs = np.linalg.solve(sxx, sxy @ vecs[:, :k])
        self.x_weights_ = vecs[:, :k]
        self.x_mean_ = X.mean(axis=0)
        self.n_features_in_ = X.shape[1]
        return self

    def transform(self, X):
        check_is_fitted(self, "x_weights_")
        X = check_array(X)
        return (X - self.x_mean_) @ self.x_weights_
