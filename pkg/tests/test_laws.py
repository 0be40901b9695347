import math

import numpy as np
import pytest
from scipy import integrate, stats

from rmt_infer import laws
from rmt_infer._errors import DomainError


def test_mp_support_quarter():
    law = laws.MPLaw(0.25)
    assert (law.b_minus, law.b_plus) == (0.25, 2.25)
    assert law.atom_at_zero == 0


def test_mp_support_one():
    law = laws.MPLaw(1.0)
    assert (law.b_minus, law.b_plus) == (0.0, 4.0)
    assert laws.mp_density(law, 4.0) == 0


@pytest.mark.parametrize("gamma", [0.25, 0.5, 1.0])
def test_mp_density_normalized(gamma):
    law = laws.MPLaw(gamma)
    total, _ = integrate.quad(lambda t: laws.mp_density(law, t), law.b_minus, law.b_plus, limit=200)
    assert total == pytest.approx(1, abs=1e-6)


@pytest.mark.parametrize("gamma", [1.5, 4.0])
def test_mp_atom(gamma):
    law = laws.MPLaw(gamma)
    assert law.atom_at_zero == pytest.approx(1 - 1 / gamma)
    total, _ = integrate.quad(lambda t: laws.mp_density(law, t), law.b_minus, law.b_plus, limit=200)
    assert total == pytest.approx(1 - law.atom_at_zero, abs=1e-8)
    assert laws.mp_cdf(law, law.b_minus) == pytest.approx(law.atom_at_zero)


def test_mp_density_outside_support():
    law = laws.MPLaw(0.25)
    assert laws.mp_density(law, 0.2) == 0
    assert laws.mp_density(law, 2.3) == 0
    assert np.all(laws.mp_density(law, np.array([-1.0, 0.0, 10.0])) == 0)


def test_mp_cdf_edges():
    law = laws.MPLaw(0.25)
    assert laws.mp_cdf(law, law.b_plus) == 1
    assert laws.mp_cdf(law, 7.0) == 1
    assert laws.mp_cdf(law, law.b_minus) == 0
    assert laws.mp_cdf(law, -1.0) == 0


def test_mp_cdf_converged_at_gamma_one():
    law = laws.MPLaw(1.0)
    a = laws.mp_cdf(law, 1.0, nodes=200)
    b = laws.mp_cdf(law, 1.0, nodes=800)
    assert 0 < a < 1
    assert abs(a - b) < 1e-8


def test_mp_cdf_matches_density_quadrature():
    law = laws.MPLaw(0.4)
    for t in (0.3, 0.9, 1.6, 2.4):
        ref, _ = integrate.quad(lambda u: laws.mp_density(law, u), law.b_minus, t, limit=200)
        assert laws.mp_cdf(law, t) == pytest.approx(ref, abs=1e-8)


def test_mp_cdf_nondecreasing():
    law = laws.MPLaw(0.7)
    vals = laws.mp_cdf(law, np.linspace(-0.5, 4, 300))
    assert np.all(np.diff(vals) >= 0)


def test_mp_bad_gamma():
    with pytest.raises(DomainError):
        laws.MPLaw(0.0)
    with pytest.raises(DomainError):
        laws.MPLaw(-1)


def test_center_scale_worked_example():
    cs = laws.center_scale(laws.EnsembleCase.single(10, 10))
    assert cs.mu == pytest.approx(38.0)
    assert cs.sigma == pytest.approx(2 * math.sqrt(9.5) * (2 / math.sqrt(9.5)) ** (1 / 3))


def test_center_scale_single_complex_average():
    case = laws.EnsembleCase.single(100, 30, "complex")
    cs = laws.center_scale(case)
    lo = laws._single_constants(99.5, 30.5)
    hi = laws._single_constants(100.5, 29.5)
    assert cs.mu == pytest.approx((lo[0] + hi[0]) / 2)
    assert cs.sigma == pytest.approx((lo[1] + hi[1]) / 2)
    assert cs.detail["weights"] == (0.5, 0.5)


@pytest.mark.parametrize("field", ["real", "complex"])
def test_double_center_in_unit_interval(field):
    cs = laws.center_scale(laws.EnsembleCase.double(25, 45, 5, field))
    assert 0 < cs.mu < 1
    assert cs.sigma > 0


@pytest.mark.parametrize("field", ["real", "complex"])
def test_double_approaches_single_as_n2_grows(field):
    # with B / n2 -> I the roots behave like the eigenvalues of A / n2
    n1, p, n2 = 200, 50, 10**7
    double = laws.center_scale(laws.EnsembleCase.double(n1, n2, p, field))
    single = laws.center_scale(laws.EnsembleCase.single(n1, p, field))
    assert n2 * double.mu == pytest.approx(single.mu, rel=0.05)
    assert n2 * double.sigma == pytest.approx(single.sigma, rel=0.05)


def test_ensemble_validation():
    with pytest.raises(DomainError):
        laws.EnsembleCase("triple", "real", 3, n=4)
    with pytest.raises(DomainError):
        laws.EnsembleCase.single(10, 5, "quaternion")
    with pytest.raises(DomainError):
        laws.EnsembleCase.double(4, 10, 5)
    with pytest.raises(DomainError):
        laws.EnsembleCase.single(0, 5)
    assert laws.EnsembleCase.double(5, 7, 5).beta == 1
    assert laws.EnsembleCase.single(5, 7, "complex").beta == 2


def test_log_multigamma():
    assert laws.log_multigamma(3.5, 1) == pytest.approx(math.lgamma(3.5))
    expected = 0.5 * math.log(math.pi) + math.lgamma(3.0) + math.lgamma(2.5)
    assert laws.log_multigamma(3.0, 2) == pytest.approx(expected)
    with pytest.raises(DomainError):
        laws.log_multigamma(0.5, 3)


def _density(params):
    def f(x2, x1):
        if x2 >= x1:
            return 0.0
        return math.exp(laws.joint_density_log(params, [x1, x2]))

    return f


def test_p2_single_density_integrates_to_one():
    params = laws.JointDensityParams("single", 2, n=4)
    total, _ = integrate.dblquad(_density(params), 0, 80, 0, lambda x1: x1, epsabs=1e-10, epsrel=1e-10)
    assert total == pytest.approx(1, abs=1e-4)
    # n = 4, p = 2: normalizing constant is 1/8
    assert math.exp(params.log_constant()) == pytest.approx(1 / 8)


def test_p2_double_density_integrates_to_one():
    params = laws.JointDensityParams("double", 2, n1=4, n2=5)
    total, _ = integrate.dblquad(_density(params), 0, 1, 0, lambda x1: x1, epsabs=1e-10, epsrel=1e-10)
    assert total == pytest.approx(1, abs=1e-4)


@pytest.mark.parametrize("n", [1, 2, 5, 17])
def test_p1_reduces_to_chi_square(n):
    params = laws.JointDensityParams("single", 1, n=max(n, 1))
    xs = np.linspace(0.05, 40, 200)
    ours = np.array([math.exp(laws.joint_density_log(params, [x])) for x in xs])
    assert np.max(np.abs(ours - stats.chi2.pdf(xs, n))) < 1e-12


def test_p1_double_reduces_to_beta():
    params = laws.JointDensityParams("double", 1, n1=3, n2=6)
    xs = np.linspace(0.01, 0.99, 50)
    ours = np.array([math.exp(laws.joint_density_log(params, [x])) for x in xs])
    assert np.max(np.abs(ours - stats.beta.pdf(xs, 1.5, 3.0))) < 1e-12


def test_joint_density_support_and_ties():
    params = laws.JointDensityParams("single", 2, n=4)
    assert laws.joint_density_log(params, [2.0, 2.0]) == -math.inf
    with pytest.raises(DomainError):
        laws.joint_density_log(params, [1.0, 2.0])
    with pytest.raises(DomainError):
        laws.joint_density_log(params, [1.0, -2.0])
    with pytest.raises(DomainError):
        laws.joint_density_log(params, [1.0])
    dparams = laws.JointDensityParams("double", 2, n1=4, n2=4)
    with pytest.raises(DomainError):
        laws.joint_density_log(dparams, [1.2, 0.5])


def test_joint_density_requires_n_at_least_p():
    with pytest.raises(DomainError):
        laws.JointDensityParams("single", 3, n=2)


def test_weight_functions():
    assert laws.weight_function("hermite", 0.0) == 1.0
    assert laws.weight_function("hermite", 2.0) == pytest.approx(math.exp(-2))
    assert laws.weight_function("laguerre", 2.0, a=1.5) == pytest.approx(2**1.5 * math.exp(-2))
    assert laws.weight_function("laguerre", -1.0, a=1.0) == 0.0
    assert laws.weight_function("jacobi", 0.5, a=1, b=2) == pytest.approx(0.5 * 1.5**2)
    assert laws.weight_function("jacobi", 1.5, a=1, b=2) == 0.0
    with pytest.raises(DomainError):
        laws.weight_function("legendre", 0.0)
