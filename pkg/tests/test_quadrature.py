import math

import numpy as np
import pytest
from scipy.special import ndtr

from pgchannel import (
    DEFAULT_SPEC,
    Interval,
    InvalidParams,
    NoiseParams,
    NonConvergent,
    NonFinite,
    QuadratureSpec,
    TruncationPolicy,
    integrate,
    integrate_batch,
    noise_support,
)

# Closed-form oracle: Phi(8) - Phi(-8), frozen from scipy.special.ndtr.
GAUSS_MASS_8SIGMA = 0.9999999999999988


def std_normal(x):
    return np.exp(-0.5 * x * x) / math.sqrt(2.0 * math.pi)


class TestIntegrate:
    def test_constant(self):
        value, err = integrate(lambda x: np.ones_like(x), Interval(0.0, 1.0))
        assert value == pytest.approx(1.0, abs=1e-13)
        assert err <= 1e-12

    def test_linear(self):
        value, _ = integrate(lambda x: x, Interval(0.0, 2.0))
        assert value == pytest.approx(2.0, abs=1e-13)

    def test_gaussian_mass(self):
        value, _ = integrate(std_normal, Interval(-8.0, 8.0))
        assert value == pytest.approx(GAUSS_MASS_8SIGMA, abs=1e-10)

    def test_error_bound_honored(self):
        spec = QuadratureSpec(rel_tol=1e-8, abs_tol=1e-10)
        value, err = integrate(lambda x: np.exp(np.sin(3 * x)), Interval(0.0, 7.0), spec)
        assert err <= max(spec.abs_tol, spec.rel_tol * abs(value))

    @pytest.mark.parametrize("a,b,c", [(0.0, 1.3, 4.0), (-2.0, 0.7, 5.5), (1.0, 2.0, 9.0)])
    def test_additivity(self, a, b, c):
        f = lambda x: np.exp(np.sin(x)) + 0.1 * x
        whole, e_whole = integrate(f, Interval(a, c))
        left, e_left = integrate(f, Interval(a, b))
        right, e_right = integrate(f, Interval(b, c))
        assert abs(left + right - whole) <= e_whole + e_left + e_right + 1e-12

    @pytest.mark.parametrize("alpha", [2.0, -0.5, 1e3])
    def test_linearity(self, alpha):
        f = lambda x: np.cos(x) ** 2
        base, _ = integrate(f, Interval(0.0, 3.0))
        scaled, _ = integrate(lambda x: alpha * f(x), Interval(0.0, 3.0))
        assert scaled == pytest.approx(alpha * base, rel=1e-10, abs=1e-11)

    def test_determinism(self):
        f = lambda x: np.exp(-x) * np.sin(5 * x)
        assert integrate(f, Interval(0.0, 10.0)) == integrate(f, Interval(0.0, 10.0))

    def test_non_finite_integrand(self):
        def f(x):
            return np.where(x > 0.5, np.nan, 1.0)

        with pytest.raises(NonFinite):
            integrate(f, Interval(0.0, 1.0))

    def test_subdivision_budget(self):
        spec = QuadratureSpec(rel_tol=1e-12, abs_tol=1e-14, max_subdivisions=8)
        with pytest.raises(NonConvergent):
            integrate(lambda x: 1.0 / np.sqrt(np.abs(x) + 1e-300), Interval(0.0, 1.0), spec)

    def test_batch_matches_single(self):
        shifts = np.array([0.0, 1.0, 2.5])
        values, errs = integrate_batch(
            lambda t: std_normal(t[None, :] - shifts[:, None]),
            Interval(-10.0, 10.0),
        )
        for shift, value in zip(shifts, values):
            single, _ = integrate(lambda x, s=shift: std_normal(x - s), Interval(-10.0, 10.0))
            assert value == pytest.approx(single, rel=1e-10)
        assert (errs <= np.maximum(DEFAULT_SPEC.abs_tol, DEFAULT_SPEC.rel_tol * np.abs(values))).all()


class TestValidation:
    def test_interval_requires_order(self):
        with pytest.raises(InvalidParams):
            Interval(2.0, 1.0)

    def test_interval_requires_finite(self):
        with pytest.raises(InvalidParams):
            Interval(0.0, math.inf)

    @pytest.mark.parametrize("kwargs", [
        {"rel_tol": 0.0},
        {"abs_tol": -1e-3},
        {"max_subdivisions": 0},
    ])
    def test_spec_invariants(self, kwargs):
        with pytest.raises(InvalidParams):
            QuadratureSpec(**kwargs)


class TestNoiseSupport:
    def test_pure_gaussian_contains_8_sigma(self):
        params = NoiseParams(lam=0.0, mu=0.0, sigma=1.0)
        iv = noise_support(params, 1e-12)
        assert iv.lo <= -8.0 and iv.hi >= 8.0

    def test_paper_parameters_interval(self):
        params = NoiseParams(lam=5.0, mu=0.0, sigma=15.0)
        iv = noise_support(params, 1e-12)
        assert iv.lo <= -120.0 and iv.hi >= 220.0
        # Oracle: component-wise Gaussian CDF masses summed over the mixture.
        ns = np.arange(0, 101)
        weights = np.exp(ns * math.log(5.0) - 5.0 - np.cumsum(np.log(np.arange(0, 101).clip(1))))
        mass = float(np.sum(weights * (ndtr((iv.hi - ns) / 15.0) - ndtr((iv.lo - ns) / 15.0))))
        assert mass >= 1.0 - 1e-12

    def test_loose_tail_mass_is_narrower(self):
        params = NoiseParams(lam=5.0, mu=0.0, sigma=15.0)
        tight = noise_support(params, 1e-12)
        loose = noise_support(params, 0.5)
        assert loose.width < 0.5 * tight.width
        value, _ = integrate(
            lambda z: np.exp(-0.5 * ((z[:, None] - np.arange(101)) / 15.0) ** 2).dot(
                np.exp(np.arange(101) * math.log(5.0) - 5.0
                       - np.concatenate([[0.0], np.cumsum(np.log(np.arange(1, 101)))]))
            ) / (15.0 * math.sqrt(2 * math.pi)),
            loose,
        )
        assert value >= 0.5

    def test_monotone_in_tail_mass(self):
        params = NoiseParams(lam=3.0, mu=1.0, sigma=4.0)
        masses = [1e-3, 1e-6, 1e-9, 1e-12]
        ivs = [noise_support(params, m) for m in masses]
        for wider, narrower in zip(ivs[1:], ivs[:-1]):
            assert wider.lo <= narrower.lo and wider.hi >= narrower.hi

    @pytest.mark.parametrize("tail_mass", [0.0, 1.0, -0.1, 1.5])
    def test_tail_mass_domain(self, tail_mass):
        params = NoiseParams(lam=1.0, mu=0.0, sigma=1.0)
        with pytest.raises(InvalidParams):
            noise_support(params, tail_mass)

    def test_accounts_for_truncation_terms(self):
        narrow = NoiseParams(lam=5.0, mu=0.0, sigma=15.0,
                             trunc=TruncationPolicy.fixed_terms(10))
        wide = NoiseParams(lam=5.0, mu=0.0, sigma=15.0,
                           trunc=TruncationPolicy.fixed_terms(500))
        assert noise_support(wide, 1e-12).hi > noise_support(narrow, 1e-12).hi
