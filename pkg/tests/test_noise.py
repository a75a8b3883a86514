import math

import numpy as np
import pytest

from pgchannel import (
    DEFAULT_SPEC,
    InvalidParams,
    NoiseParams,
    TruncationPolicy,
    UnsupportedMode,
    gaussian_pdf,
    hybrid_log_pdf,
    hybrid_moments,
    hybrid_pdf,
    integrate,
    moment_by_quadrature,
    noise_entropy,
    noise_support,
    poisson_pmf,
    tabulate_noise,
)

PAPER = NoiseParams(lam=5.0, mu=0.0, sigma=15.0)
PAPER_EXACT = NoiseParams(
    lam=5.0, mu=0.0, sigma=15.0,
    trunc=TruncationPolicy.fixed_terms(100, include_zero_term=False),
)

# Arbitrary-precision oracles (mpmath, 50 digits), frozen.
PMF_0_5 = 0.006737946999085467
PMF_5_5 = 0.17546736976785071
GAUSS_MODE_15 = 0.026596152026762179
LOG_PDF_AT_5 = -3.6379668076050237  # dense summation n=0..1000 at lam=5, mu=0, sigma=15
GAUSS_ENTROPY_15 = 5.953986180789160  # 0.5*log2(2*pi*e*225)

# Regression constant, pinned after cross-validation against the Monte-Carlo
# histogram oracle (|difference| = 0.0011 bits at one million samples).
H_Z_PAPER = 5.96984036338827


def dense_mixture_pdf(z, lam, mu, sigma, n_max):
    """Independent oracle: direct termwise summation, no log-space tricks."""
    ns = np.arange(0, n_max + 1)
    log_fact = np.concatenate([[0.0], np.cumsum(np.log(np.arange(1, n_max + 1)))])
    weights = np.exp(ns * math.log(lam) - lam - log_fact) if lam > 0 else (ns == 0) * 1.0
    gauss = np.exp(-0.5 * ((np.atleast_1d(z)[:, None] - ns - mu) / sigma) ** 2)
    return gauss.dot(weights) / (sigma * math.sqrt(2 * math.pi))


class TestPoissonPmf:
    def test_at_zero(self):
        assert poisson_pmf(0, 5.0) == pytest.approx(PMF_0_5, rel=1e-14)

    def test_at_five(self):
        assert poisson_pmf(5, 5.0) == pytest.approx(PMF_5_5, rel=1e-14)

    def test_normalization(self):
        total = poisson_pmf(np.arange(201), 5.0).sum()
        assert total == pytest.approx(1.0, abs=1e-14)

    def test_zero_rate(self):
        assert poisson_pmf(0, 0.0) == 1.0
        assert poisson_pmf(3, 0.0) == 0.0

    def test_negative_rate_rejected(self):
        with pytest.raises(InvalidParams):
            poisson_pmf(1, -0.5)

    def test_negative_count_rejected(self):
        with pytest.raises(InvalidParams):
            poisson_pmf(-1, 2.0)


class TestGaussianPdf:
    def test_mode_value(self):
        assert gaussian_pdf(0.0, 0.0, 15.0) == pytest.approx(GAUSS_MODE_15, rel=1e-14)

    def test_symmetry_exact(self):
        assert gaussian_pdf(7.3, 0.0, 2.0) == gaussian_pdf(-7.3, 0.0, 2.0)

    def test_one_sigma_ratio(self):
        mode = gaussian_pdf(0.0, 0.0, 15.0)
        assert gaussian_pdf(15.0, 0.0, 15.0) == pytest.approx(mode * math.exp(-0.5), rel=1e-14)

    def test_nonpositive_sigma_rejected(self):
        with pytest.raises(InvalidParams):
            gaussian_pdf(0.0, 0.0, 0.0)


class TestHybridPdf:
    def test_poisson_collapse_to_gaussian(self):
        params = NoiseParams(lam=1e-12, mu=2.0, sigma=3.0)
        zs = np.linspace(-20, 25, 41)
        expected = np.log(gaussian_pdf(zs, 2.0, 3.0))
        assert np.max(np.abs(hybrid_log_pdf(zs, params) - expected)) < 1e-12

    def test_dense_summation_oracle_at_5(self):
        assert hybrid_log_pdf(5.0, PAPER) == pytest.approx(LOG_PDF_AT_5, rel=1e-12)

    def test_far_tail_finite(self):
        z = PAPER.mu + PAPER.lam + 50 * PAPER.sigma
        value = hybrid_log_pdf(z, PAPER)
        assert math.isfinite(value) and value < -1000.0

    def test_mass_include_zero(self):
        mass, _ = integrate(lambda z: hybrid_pdf(z, PAPER), noise_support(PAPER), DEFAULT_SPEC)
        assert mass == pytest.approx(1.0, abs=1e-9)

    def test_mass_paper_exact(self):
        mass, _ = integrate(
            lambda z: hybrid_pdf(z, PAPER_EXACT), noise_support(PAPER_EXACT), DEFAULT_SPEC
        )
        assert mass == pytest.approx(1.0 - math.exp(-5.0), abs=1e-9)

    def test_translation_family(self):
        shifted = NoiseParams(lam=5.0, mu=3.7, sigma=15.0)
        zs = np.linspace(-40, 60, 23)
        ratio = hybrid_pdf(zs + 3.7, shifted) / hybrid_pdf(zs, PAPER)
        assert np.max(np.abs(ratio - 1.0)) < 1e-12

    def test_nonnegative_everywhere(self):
        rng = np.random.default_rng(1234)
        for _ in range(50):
            params = NoiseParams(
                lam=float(rng.uniform(0, 10)),
                mu=float(rng.uniform(-5, 5)),
                sigma=float(rng.uniform(0.5, 30)),
            )
            zs = rng.uniform(-200, 300, size=64)
            assert (hybrid_pdf(zs, params) >= 0.0).all()

    def test_dense_oracle_equivalence(self):
        rng = np.random.default_rng(999)
        for _ in range(25):
            lam = float(rng.uniform(0.01, 10))
            sigma = float(rng.uniform(0.5, 30))
            n_max = math.ceil(lam + 40 * math.sqrt(lam + 1))
            params = NoiseParams(lam=lam, mu=0.0, sigma=sigma,
                                 trunc=TruncationPolicy.fixed_terms(n_max))
            zs = rng.uniform(-4 * sigma, lam + 4 * sigma, size=32)
            ours = hybrid_pdf(zs, params)
            oracle = dense_mixture_pdf(zs, lam, 0.0, sigma, n_max)
            keep = oracle > 1e-300
            assert np.max(np.abs(ours[keep] - oracle[keep]) / oracle[keep]) < 1e-12

    def test_truncation_monotone_in_terms(self):
        zs = np.linspace(-30, 120, 31)
        previous = np.zeros_like(zs)
        for n in (1, 5, 20, 100, 400):
            params = NoiseParams(lam=5.0, mu=0.0, sigma=15.0,
                                 trunc=TruncationPolicy.fixed_terms(n))
            current = hybrid_pdf(zs, params)
            assert (current >= previous - 1e-18).all()
            previous = current

    def test_truncation_error_bounded_by_tail(self):
        rng = np.random.default_rng(7)
        for lam in (2.0, 10.0, 20.0):
            sigma = float(rng.uniform(1, 20))
            few = NoiseParams(lam=lam, mu=0.0, sigma=sigma,
                              trunc=TruncationPolicy.fixed_terms(100))
            many = NoiseParams(lam=lam, mu=0.0, sigma=sigma,
                               trunc=TruncationPolicy.fixed_terms(1000))
            zs = np.linspace(-5 * sigma, 120 + 5 * sigma, 101)
            gap = np.max(np.abs(hybrid_pdf(zs, few) - hybrid_pdf(zs, many)))
            tail = 1.0 - poisson_pmf(np.arange(0, 101), lam).sum()
            gauss_peak = 1.0 / (sigma * math.sqrt(2 * math.pi))
            assert gap <= tail * gauss_peak + 1e-15

    def test_tail_bound_policy_mass(self):
        eps = 1e-6
        params = NoiseParams(lam=5.0, mu=0.0, sigma=15.0,
                             trunc=TruncationPolicy.tail_bound(eps))
        mass, _ = integrate(lambda z: hybrid_pdf(z, params),
                            noise_support(params, eps), DEFAULT_SPEC)
        assert 1.0 - 10 * eps <= mass <= 1.0 + 1e-10


class TestMoments:
    def test_paper_values_exact(self):
        assert hybrid_moments(PAPER) == (5.0, 230.0)

    def test_pure_gaussian(self):
        params = NoiseParams(lam=0.0, mu=1.5, sigma=2.0)
        assert hybrid_moments(params) == (1.5, 4.0)

    def test_mean_shifts_with_mu(self):
        shifted = NoiseParams(lam=5.0, mu=2.25, sigma=15.0)
        mean0, var0 = hybrid_moments(PAPER)
        mean1, var1 = hybrid_moments(shifted)
        assert mean1 == mean0 + 2.25
        assert var1 == var0

    def test_paper_exact_mode_unsupported(self):
        with pytest.raises(UnsupportedMode):
            hybrid_moments(PAPER_EXACT)

    def test_first_moment_by_quadrature(self):
        assert moment_by_quadrature(PAPER, 1) == pytest.approx(5.0, abs=1e-6)

    def test_second_moment_by_quadrature(self):
        assert moment_by_quadrature(PAPER, 2) == pytest.approx(255.0, rel=1e-5)

    def test_gaussian_mean_by_quadrature(self):
        params = NoiseParams(lam=0.0, mu=4.0, sigma=2.0)
        assert moment_by_quadrature(params, 1) == pytest.approx(4.0, abs=1e-9)

    def test_moment_order_validated(self):
        with pytest.raises(InvalidParams):
            moment_by_quadrature(PAPER, 3)


class TestNoiseEntropy:
    def test_gaussian_limit(self):
        params = NoiseParams(lam=1e-12, mu=0.0, sigma=15.0)
        assert noise_entropy(params) == pytest.approx(GAUSS_ENTROPY_15, abs=1e-3)

    def test_paper_regression_value(self):
        value = noise_entropy(PAPER)
        assert value >= GAUSS_ENTROPY_15
        assert value == pytest.approx(H_Z_PAPER, abs=1e-9)

    def test_translation_invariance(self):
        shifted = NoiseParams(lam=5.0, mu=17.0, sigma=15.0)
        assert noise_entropy(shifted) == pytest.approx(noise_entropy(PAPER), abs=1e-9)

    @pytest.mark.parametrize("lam", [0.5, 2.0, 8.0])
    def test_exceeds_gaussian_entropy(self, lam):
        params = NoiseParams(lam=lam, mu=0.0, sigma=6.0)
        floor = 0.5 * math.log2(2 * math.pi * math.e * 36.0)
        assert noise_entropy(params) >= floor - 1e-9


class TestTabulateNoise:
    def test_grid_mass(self):
        table = tabulate_noise(PAPER, 2001)
        assert table.total_mass == pytest.approx(1.0, abs=1e-6)
        assert len(table.abscissae) == 2001

    def test_columns_well_formed(self):
        table = tabulate_noise(PAPER, 501)
        assert (table.densities >= 0.0).all()
        assert np.isfinite(table.entropy_integrand).all()

    def test_truncation_equivalence_pointwise(self):
        coarse = tabulate_noise(PAPER, 2001)
        fine = tabulate_noise(
            NoiseParams(lam=5.0, mu=0.0, sigma=15.0,
                        trunc=TruncationPolicy.fixed_terms(1000)),
            2001,
        )
        grid = coarse.abscissae
        dense = hybrid_pdf(grid, NoiseParams(lam=5.0, mu=0.0, sigma=15.0,
                                             trunc=TruncationPolicy.fixed_terms(1000)))
        assert np.max(np.abs(coarse.densities - dense)) <= 1e-12
        assert np.max(np.abs(fine.densities[: len(grid)] - dense[: len(grid)])) <= 1e-15

    def test_rejects_tiny_grid(self):
        with pytest.raises(InvalidParams):
            tabulate_noise(PAPER, 1)


class TestValidation:
    @pytest.mark.parametrize("kwargs", [
        {"lam": -1.0, "mu": 0.0, "sigma": 1.0},
        {"lam": 1.0, "mu": 0.0, "sigma": 0.0},
        {"lam": 1.0, "mu": math.nan, "sigma": 1.0},
    ])
    def test_noise_params(self, kwargs):
        with pytest.raises(InvalidParams):
            NoiseParams(**kwargs)

    def test_truncation_policy_exclusive_fields(self):
        with pytest.raises(InvalidParams):
            TruncationPolicy(n_terms=10, tail_epsilon=0.1)
        with pytest.raises(InvalidParams):
            TruncationPolicy(n_terms=None, tail_epsilon=None)

    @pytest.mark.parametrize("n", [0, -5])
    def test_truncation_terms_positive(self, n):
        with pytest.raises(InvalidParams):
            TruncationPolicy.fixed_terms(n)

    @pytest.mark.parametrize("eps", [0.0, 1.0])
    def test_tail_bound_domain(self, eps):
        with pytest.raises(InvalidParams):
            TruncationPolicy.tail_bound(eps)
