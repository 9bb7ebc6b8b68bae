import math
from fractions import Fraction as F

import numpy as np
import pytest

from randmaps.clt import (
    CltSample,
    Observable,
    center_observable,
    estimate_sigma2,
    jackknife_se,
    ks_normality,
    prop61_diagnostic,
    sample_Sn,
)
from randmaps.hypotheses import StochasticSystem
from randmaps.measure import AtomMeasure, WalkRng, invariant_estimate
from randmaps.pwlin import PwlError, identity


@pytest.fixture(scope="module")
def nu_hat(ex22):
    return invariant_estimate(ex22, prune_to=2000, steps=400, burn_in=100).measure


@pytest.fixture(scope="module")
def phi_c(nu_hat):
    return center_observable(Observable.identity(), nu_hat)


class TestObservable:
    def test_lipschitz(self):
        phi = Observable.from_points([(0, 0), (F(1, 4), 2), (1, -1)])
        assert phi.lipschitz_constant == 8
        assert phi(np.array([0.125])) == pytest.approx(1.0)

    def test_validation(self):
        with pytest.raises(PwlError):
            Observable((0, F(1, 2)), (0, 1))
        with pytest.raises(PwlError):
            Observable((0, 1), (0,))

    def test_scaled(self):
        phi = Observable((0, 1), (0, 1), 0.25)
        assert phi.scaled(-2)(np.array([0.5])) == pytest.approx(-0.5)


class TestCenter:
    def test_constant(self, nu_hat):
        c = center_observable(Observable.constant(F(7, 3)), nu_hat)
        np.testing.assert_allclose(c(np.linspace(0, 1, 11)), 0, atol=1e-12)

    def test_dirac_half(self):
        assert center_observable(Observable.identity(), AtomMeasure.dirac(0.5)).centered_offset == 0.5

    def test_atom_mean(self, nu_hat, phi_c):
        assert phi_c.centered_offset == pytest.approx(float(np.dot(nu_hat.positions, nu_hat.weights)), abs=1e-15)
        assert nu_hat.integrate(phi_c) == pytest.approx(0, abs=1e-14)

    def test_lipschitz_unchanged(self, nu_hat):
        phi = Observable.from_points([(0, 0), (F(1, 2), 3), (1, 1)])
        assert center_observable(phi, nu_hat).lipschitz_constant == phi.lipschitz_constant


class TestSampleSn:
    def test_zero(self, ex22):
        s = sample_Sn(ex22, Observable.constant(0), 0.3, 50, 100, WalkRng(0))
        assert np.all(s.values == 0) and s.sigma2_hat == 0 and s.trials == 100

    def test_halving_closed_form(self, halving):
        s = sample_Sn(halving, Observable.identity(), 1.0, 30, 3, WalkRng(0))
        want = sum(2.0**-k for k in range(1, 31)) / math.sqrt(30)
        np.testing.assert_allclose(s.values, want, rtol=1e-14)

    def test_include_x0(self, halving):
        a = sample_Sn(halving, Observable.identity(), 1.0, 10, 2, WalkRng(0))
        b = sample_Sn(halving, Observable.identity(), 1.0, 10, 2, WalkRng(0), include_x0=True)
        np.testing.assert_allclose(b.values - a.values, 1 / math.sqrt(10), rtol=1e-12)

    def test_rejects_bad_sizes(self, ex22):
        with pytest.raises(ValueError):
            sample_Sn(ex22, Observable.identity(), 0.3, 0, 10, WalkRng(0))

    def test_worker_invariance(self, ex22, phi_c):
        args = (ex22, phi_c, 0.3, 200, 1000, WalkRng(21))
        a = sample_Sn(*args, workers=1, chunk=128)
        b = sample_Sn(*args, workers=4, chunk=128)
        np.testing.assert_array_equal(a.values, b.values)

    def test_sign_and_scale(self, ex22, phi_c):
        args = (0.7, 100, 300, WalkRng(22))
        base = sample_Sn(ex22, phi_c, *args)
        neg = sample_Sn(ex22, phi_c.scaled(-1), *args)
        tri = sample_Sn(ex22, phi_c.scaled(3), *args)
        np.testing.assert_array_equal(neg.values, -base.values)
        np.testing.assert_allclose(tri.values, 3 * base.values, rtol=1e-12, atol=1e-12)
        assert tri.sigma2_hat == pytest.approx(9 * base.sigma2_hat, rel=1e-12)

    def test_mean_near_zero(self, ex22, phi_c):
        s = sample_Sn(ex22, phi_c, 0.3, 2000, 5000, WalkRng(23))
        assert abs(s.values.mean()) < 3 * math.sqrt(s.sigma2_hat / s.trials)


class TestSigma2:
    def test_zero_observable(self, ex22, nu_hat):
        est = estimate_sigma2(ex22, Observable.constant(0), nu_hat, 50, 100, WalkRng(0))
        assert est.sigma2 == 0 and est.sigma2_2n == 0 and not est.diverging

    def test_identity_system_diverges(self):
        sys = StochasticSystem((identity(),), (1,))
        nu = AtomMeasure.uniform_grid(101)
        phi = center_observable(Observable.identity(), nu)
        est = estimate_sigma2(sys, phi, nu, 100, 500, WalkRng(1))
        assert est.diverging
        assert est.sigma2_2n == pytest.approx(2 * est.sigma2, rel=1e-9)

    def test_sign_flip_exact(self, ex22, nu_hat, phi_c):
        a = estimate_sigma2(ex22, phi_c, nu_hat, 100, 200, WalkRng(2))
        b = estimate_sigma2(ex22, phi_c.scaled(-1), nu_hat, 100, 200, WalkRng(2))
        assert (a.sigma2, a.sigma2_2n) == (b.sigma2, b.sigma2_2n)

    def test_stable_for_example22(self, ex22, nu_hat, phi_c):
        est = estimate_sigma2(ex22, phi_c, nu_hat, 1000, 4000, WalkRng(5))
        assert est.relative_change < 0.1 and est.sigma2 > 0
        assert est.stderr > 0


class TestKS:
    def test_gaussian_data(self):
        vals = np.random.default_rng(0).standard_normal(10_000)
        assert ks_normality(CltSample(1, vals, float(np.mean(vals**2)))) < 1.63 / math.sqrt(10_000)

    def test_degenerate(self):
        assert ks_normality(CltSample(1, np.zeros(100), 0.0)) == 0.0
        vals = np.zeros(100)
        vals[:3] = 1e-13
        assert ks_normality(CltSample(1, vals, 3e-28)) == 0.0

    def test_wrong_variance_detected(self):
        vals = np.random.default_rng(1).standard_normal(10_000)
        assert ks_normality(CltSample(1, vals, 4.0)) > 0.1


def test_jackknife_matches_textbook():
    v = np.random.default_rng(3).standard_normal(500)
    assert jackknife_se(v) == pytest.approx(v.std(ddof=1) / math.sqrt(v.size), rel=1e-10)
    assert math.isnan(jackknife_se(np.array([1.0])))


class TestProp61:
    def test_same_start(self, ex22):
        assert all(v == 0 for _, v in prop61_diagnostic(ex22, Observable.identity(), 0.4, 0.4, 20, 50, WalkRng(0)))

    def test_halving_closed_form(self, halving):
        res = prop61_diagnostic(halving, Observable.identity(), 1.0, 0.2, 40, 5, WalkRng(0))
        for n, v in res:
            assert v == pytest.approx(0.8 * (1 - 2.0**-n), rel=1e-12)
        assert max(v for _, v in res) <= 2 * 0.8

    def test_worker_invariance(self, ex22):
        args = (ex22, Observable.identity(), 0.1, 0.9, 30, 500, WalkRng(4))
        assert prop61_diagnostic(*args, workers=1, chunk=64) == prop61_diagnostic(*args, workers=3, chunk=64)
