"""Hybrid Poisson-plus-Gaussian noise: density, moments, and entropy.

The noise variable is Z = N1 + N2 with N1 ~ Poisson(lam) and N2 ~
Normal(mu, sigma^2) independent, so its density is a Poisson-weighted
mixture of unit-shifted Gaussians. The mixture sum is truncated by a
:class:`TruncationPolicy` and always evaluated in log space with a
max-shifted sum so that far-tail evaluations stay finite.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np
from scipy.special import gammaln, logsumexp

from .errors import InvalidParams, UnsupportedMode
from .quadrature import (
    DEFAULT_SPEC,
    DEFAULT_TAIL_MASS,
    Interval,
    QuadratureSpec,
    _poisson_quantile,
    integrate,
    noise_support,
)

__all__ = [
    "TruncationPolicy",
    "NoiseParams",
    "TabulatedDensity",
    "poisson_pmf",
    "gaussian_pdf",
    "hybrid_log_pdf",
    "hybrid_pdf",
    "hybrid_moments",
    "moment_by_quadrature",
    "noise_entropy",
    "tabulate_noise",
]

_LOG_2PI = math.log(2.0 * math.pi)
_LN2 = math.log(2.0)


@dataclass(frozen=True)
class TruncationPolicy:
    """How many mixture terms to keep, and whether the n=0 term is included.

    Exactly one of ``n_terms`` (keep terms up to n = N) and ``tail_epsilon``
    (keep terms until the Poisson tail mass drops below epsilon) is set.
    ``include_zero_term=False`` reproduces the sum-from-n=1 convention, whose
    density integrates to 1 - exp(-lam) rather than 1.
    """

    n_terms: int | None = 100
    tail_epsilon: float | None = None
    include_zero_term: bool = True

    def __post_init__(self):
        if (self.n_terms is None) == (self.tail_epsilon is None):
            raise InvalidParams("set exactly one of n_terms and tail_epsilon")
        if self.n_terms is not None and self.n_terms < 1:
            raise InvalidParams(f"n_terms must be >= 1, got {self.n_terms}")
        if self.tail_epsilon is not None and not 0.0 < self.tail_epsilon < 1.0:
            raise InvalidParams(
                f"tail_epsilon must lie in (0, 1), got {self.tail_epsilon}"
            )

    @classmethod
    def fixed_terms(cls, n: int, include_zero_term: bool = True) -> "TruncationPolicy":
        return cls(n_terms=n, tail_epsilon=None, include_zero_term=include_zero_term)

    @classmethod
    def tail_bound(cls, epsilon: float, include_zero_term: bool = True) -> "TruncationPolicy":
        return cls(n_terms=None, tail_epsilon=epsilon, include_zero_term=include_zero_term)

    def max_term(self, lam: float) -> int:
        """Largest Poisson index n kept in the mixture sum."""
        if self.n_terms is not None:
            return self.n_terms
        return max(_poisson_quantile(lam, self.tail_epsilon), 1)


@dataclass(frozen=True)
class NoiseParams:
    """Full parameterization of the hybrid noise Z = N1 + N2."""

    lam: float
    mu: float
    sigma: float
    trunc: TruncationPolicy = field(default_factory=TruncationPolicy)

    def __post_init__(self):
        if not (math.isfinite(self.lam) and self.lam >= 0.0):
            raise InvalidParams(f"lam must be finite and >= 0, got {self.lam}")
        if not math.isfinite(self.mu):
            raise InvalidParams(f"mu must be finite, got {self.mu}")
        if not (math.isfinite(self.sigma) and self.sigma > 0.0):
            raise InvalidParams(f"sigma must be finite and > 0, got {self.sigma}")


@dataclass(frozen=True)
class TabulatedDensity:
    """A density sampled on a grid, with its entropy integrand alongside."""

    support: Interval
    abscissae: np.ndarray
    densities: np.ndarray
    total_mass: float
    entropy_integrand: np.ndarray

    def __post_init__(self):
        if len(self.abscissae) != len(self.densities):
            raise InvalidParams("abscissae and densities lengths differ")
        if not np.all(np.diff(self.abscissae) > 0):
            raise InvalidParams("abscissae must be strictly increasing")
        if np.any(self.densities < 0):
            raise InvalidParams("densities must be nonnegative")


def poisson_pmf(n, lam: float):
    """P(N = n) for N ~ Poisson(lam), evaluated via log-gamma.

    Accepts a scalar or array of nonnegative integers ``n``.
    """
    if lam < 0:
        raise InvalidParams(f"lam must be nonnegative, got {lam}")
    n_arr = np.asarray(n)
    if np.any(n_arr < 0):
        raise InvalidParams("n must be nonnegative")
    if lam == 0.0:
        out = np.where(n_arr == 0, 1.0, 0.0)
    else:
        out = np.exp(n_arr * math.log(lam) - lam - gammaln(n_arr + 1.0))
    return float(out) if np.isscalar(n) else out


def gaussian_pdf(t, mu: float, sigma: float):
    """Normal(mu, sigma^2) density at ``t`` (scalar or array)."""
    if sigma <= 0:
        raise InvalidParams(f"sigma must be positive, got {sigma}")
    t_arr = np.asarray(t, dtype=float)
    u = (t_arr - mu) / sigma
    out = np.exp(-0.5 * u * u) / (sigma * math.sqrt(2.0 * math.pi))
    return float(out) if np.isscalar(t) else out


def _log_weights(params: NoiseParams):
    """Poisson log-weights and their indices for the truncated mixture."""
    n_top = params.trunc.max_term(params.lam)
    n_lo = 0 if params.trunc.include_zero_term else 1
    ns = np.arange(n_lo, n_top + 1, dtype=float)
    if params.lam == 0.0:
        logw = np.where(ns == 0, 0.0, -np.inf)
    else:
        logw = ns * math.log(params.lam) - params.lam - gammaln(ns + 1.0)
    return ns, logw


def hybrid_log_pdf(z, params: NoiseParams):
    """log f_Z(z) for the truncated Poisson-Gaussian mixture.

    The sum over mixture terms is carried out with a max-shifted
    log-sum-exp, so deep-tail arguments produce a large negative value
    instead of overflowing to -inf. Accepts scalar or array ``z``; the
    paper-exact (no zero term) mixture with lam = 0 is identically zero
    and yields -inf.
    """
    ns, logw = _log_weights(params)
    z_arr = np.asarray(z, dtype=float)
    u = (z_arr[..., None] - ns - params.mu) / params.sigma
    log_terms = logw - 0.5 * u * u - math.log(params.sigma) - 0.5 * _LOG_2PI
    out = logsumexp(log_terms, axis=-1)
    return float(out) if np.isscalar(z) else out


def hybrid_pdf(z, params: NoiseParams):
    """f_Z(z) = exp(hybrid_log_pdf(z)); nonnegative and finite."""
    return np.exp(hybrid_log_pdf(z, params))


def hybrid_moments(params: NoiseParams):
    """Exact mean and variance of the untruncated include-zero model.

    mean = lam + mu and variance = lam + sigma^2, by independence of the
    Poisson and Gaussian components.

    Raises
    ------
    UnsupportedMode
        Without the zero term the closed form does not apply; use
        :func:`moment_by_quadrature` instead.
    """
    if not params.trunc.include_zero_term:
        raise UnsupportedMode(
            "closed-form moments need include_zero_term=True; "
            "use moment_by_quadrature for the paper-exact mixture"
        )
    return params.lam + params.mu, params.lam + params.sigma**2


def moment_by_quadrature(
    params: NoiseParams, k: int, spec: QuadratureSpec = DEFAULT_SPEC
) -> float:
    """Raw moment integral(z^k f_Z(z) dz) over the truncated support."""
    if k not in (1, 2):
        raise InvalidParams(f"k must be 1 or 2, got {k}")
    iv = noise_support(params, DEFAULT_TAIL_MASS)

    def integrand(z):
        return z**k * hybrid_pdf(z, params)

    value, _ = integrate(integrand, iv, spec)
    return value


def _entropy_integrand(log_p):
    """-p * log2(p) with the 0 * log 0 = 0 convention, from log p."""
    p = np.exp(log_p)
    return np.where(np.isfinite(log_p), -p * log_p, 0.0) / _LN2


@lru_cache(maxsize=128)
def noise_entropy(params: NoiseParams, spec: QuadratureSpec = DEFAULT_SPEC) -> float:
    """Differential entropy h(Z) = -integral(f_Z log2 f_Z), in bits."""
    iv = noise_support(params, DEFAULT_TAIL_MASS)
    value, _ = integrate(lambda z: _entropy_integrand(hybrid_log_pdf(z, params)), iv, spec)
    return value


def tabulate_noise(
    params: NoiseParams, n_points: int, spec: QuadratureSpec = DEFAULT_SPEC
) -> TabulatedDensity:
    """Sample f_Z and -f_Z log2 f_Z on a uniform grid over the support."""
    if n_points < 2:
        raise InvalidParams(f"n_points must be >= 2, got {n_points}")
    iv = noise_support(params, DEFAULT_TAIL_MASS)
    zs = np.linspace(iv.lo, iv.hi, n_points)
    log_p = hybrid_log_pdf(zs, params)
    dens = np.exp(log_p)
    ent = _entropy_integrand(log_p)
    mass = float(np.trapezoid(dens, zs))
    return TabulatedDensity(
        support=iv,
        abscissae=zs,
        densities=dens,
        total_mass=mass,
        entropy_integrand=ent,
    )
