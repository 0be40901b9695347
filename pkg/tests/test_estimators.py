import numpy as np
import pytest
from sklearn.base import clone

from rmt_infer import inference
from rmt_infer.estimators import CanonicalCorrelation, LargestRootTest


def test_largest_root_test_matches_functional_core():
    X = np.random.default_rng(0).standard_normal((80, 12))
    est = LargestRootTest().fit(X)
    res = inference.largest_root_test_from_data(X.T)
    assert est.p_value_ == res.p_value
    assert est.statistic_ == res.standardized
    assert est.eigenvalues_[0] >= est.eigenvalues_[-1]
    assert est.get_params() == {"center": True}
    assert clone(est).get_params() == {"center": True}


def test_largest_root_test_detects_spike():
    rng = np.random.default_rng(1)
    X = rng.standard_normal((200, 20))
    X[:, 0] *= 3
    assert LargestRootTest().fit(X).p_value_ < 1e-6


def test_cca_estimator():
    rng = np.random.default_rng(2)
    X = rng.standard_normal((300, 3))
    Y = np.column_stack([X[:, 0] + 0.5 * rng.standard_normal(300), rng.standard_normal((300, 4))])
    est = CanonicalCorrelation().fit(X, Y)
    assert est.squared_correlations_.shape == (3,)
    assert est.squared_correlations_[0] > 0.6
    scores = est.transform(X)
    assert scores.shape == (300, 3)
    # leading score correlates with Y's first column as strongly as r_1
    r = np.corrcoef(scores[:, 0], Y[:, 0])[0, 1]
    assert r * r == pytest.approx(est.squared_correlations_[0], rel=0.02)
    assert est.test_.p_value < 1e-6


def test_cca_estimator_when_x_is_larger():
    rng = np.random.default_rng(3)
    Y = rng.standard_normal((200, 2))
    X = np.column_stack([Y[:, 0] + rng.standard_normal(200), rng.standard_normal((200, 4))])
    est = CanonicalCorrelation(n_components=1).fit(X, Y)
    scores = est.transform(X)
    r = np.corrcoef(scores[:, 0], Y[:, 0])[0, 1]
    assert r * r == pytest.approx(est.squared_correlations_[0], rel=0.05)


def test_cca_estimator_validation():
    rng = np.random.default_rng(4)
    with pytest.raises(ValueError):
        CanonicalCorrelation().fit(rng.standard_normal((20, 2)), rng.standard_normal((21, 2)))
    with pytest.raises(ValueError):
        CanonicalCorrelation(n_components=5).fit(rng.standard_normal((40, 2)), rng.standard_normal((40, 3)))
