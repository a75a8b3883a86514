"""Received-signal density under the point-estimate transmit model, plus the
Bloch-sphere angle maps that reduce a qubit to a single parameter.

The received density follows the point-estimate convolution
f_Y(y) = mu_x * integral over t in [0, 2*pi] of f_Z(y - t) dt. That scaled
window integral is not a unit-mass density (its mass is 2*pi*mu_x times the
noise mass), so each consumer chooses between the literal scaled form and a
normalized probability density.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import DegenerateInput, InvalidParams, OutOfDomain, Singularity
from .noise import NoiseParams, _entropy_integrand, hybrid_pdf
from .quadrature import (
    DEFAULT_SPEC,
    DEFAULT_TAIL_MASS,
    Interval,
    QuadratureSpec,
    integrate,
    integrate_batch,
    noise_support,
)

__all__ = [
    "TransmitEstimate",
    "RabiConfig",
    "WorkingPoint",
    "received_pdf",
    "received_entropy",
    "received_mean",
    "bloch_angles",
    "working_point",
]

_TWO_PI = 2.0 * math.pi

# Tolerance below which denominators are treated as singular and inverse-trig
# arguments grazing past +-1 are clamped instead of rejected.
_GRAZE_TOL = 1e-12


@dataclass(frozen=True)
class TransmitEstimate:
    """Point estimate mu_x of the transmit signal, in [0, 2*pi]."""

    mu_x: float

    def __post_init__(self):
        if not (math.isfinite(self.mu_x) and 0.0 <= self.mu_x <= _TWO_PI):
            raise InvalidParams(f"mu_x must lie in [0, 2*pi], got {self.mu_x}")


@dataclass(frozen=True)
class RabiConfig:
    """Rabi frequency, generalized Rabi frequency, and transition time."""

    omega: float
    omega_g: float
    t: float

    def __post_init__(self):
        if not 0.0 < self.omega <= self.omega_g:
            raise InvalidParams(
                f"require 0 < omega <= omega_g, got omega={self.omega}, omega_g={self.omega_g}"
            )
        if not (math.isfinite(self.t) and self.t >= 0.0):
            raise InvalidParams(f"t must be finite and >= 0, got {self.t}")


@dataclass(frozen=True)
class WorkingPoint:
    """Tunneling splitting and energy difference of the two-level system."""

    delta: float
    epsilon: float

    def __post_init__(self):
        if self.delta == 0.0 and self.epsilon == 0.0:
            raise InvalidParams("delta and epsilon must not both be zero")


class _WindowProfile:
    """g(y) = integral over t in [0, 2*pi] of f_Z(y - t) dt, memoised per point.

    The same y abscissae recur across every entropy/moment integral built on
    one parameter set, so results are cached keyed on the exact float value.
    """

    def __init__(self, params: NoiseParams, spec: QuadratureSpec):
        self._params = params
        self._spec = spec
        self._cache: dict[float, float] = {}
        noise_iv = noise_support(params, DEFAULT_TAIL_MASS)
        self.support = Interval(noise_iv.lo, noise_iv.hi + _TWO_PI)
        self._mass: float | None = None

    def __call__(self, y):
        y_arr = np.atleast_1d(np.asarray(y, dtype=float))
        out = np.empty(y_arr.shape)
        cache = self._cache
        missing = [i for i, yi in enumerate(y_arr) if yi not in cache]
        if missing:
            ys = y_arr[missing]
            vals, _ = integrate_batch(
                lambda t: hybrid_pdf(ys[:, None] - t[None, :], self._params),
                Interval(0.0, _TWO_PI),
                self._spec,
            )
            for yi, vi in zip(ys, vals):
                cache[yi] = float(vi)
        for i, yi in enumerate(y_arr):
            out[i] = cache[yi]
        return out if np.ndim(y) else float(out[0])

    @property
    def mass(self) -> float:
        """Total mass of g over the widened support (= 2*pi times the noise mass)."""
        if self._mass is None:
            value, _ = integrate(self, self.support, self._spec)
            self._mass = value
        return self._mass


@lru_cache(maxsize=32)
def _window_profile(params: NoiseParams, spec: QuadratureSpec) -> _WindowProfile:
    return _WindowProfile(params, spec)


def received_pdf(
    y,
    est: TransmitEstimate,
    params: NoiseParams,
    spec: QuadratureSpec = DEFAULT_SPEC,
    normalized: bool = False,
):
    """Density of the received signal at ``y`` (scalar or array).

    With ``normalized=False`` this is the literal scaled window integral
    mu_x * g(y); with ``normalized=True`` it is g(y) divided by its total
    mass, a proper unit-mass density that no longer depends on mu_x.
    """
    profile = _window_profile(params, spec)
    if normalized:
        if est.mu_x == 0.0:
            raise DegenerateInput("mu_x = 0 leaves nothing to normalize")
        g = profile(y)
        return g / profile.mass
    return est.mu_x * profile(y)


@lru_cache(maxsize=64)
def _normalized_received_entropy(params: NoiseParams, spec: QuadratureSpec) -> float:
    profile = _window_profile(params, spec)
    mass = profile.mass

    def integrand(y):
        p = profile(y) / mass
        out = np.zeros_like(p)
        pos = p > 0.0
        out[pos] = -p[pos] * np.log2(p[pos])
        return out

    value, _ = integrate(integrand, profile.support, spec)
    return value


def received_entropy(
    est: TransmitEstimate,
    params: NoiseParams,
    spec: QuadratureSpec = DEFAULT_SPEC,
    normalized: bool = False,
) -> float:
    """Differential entropy h(Y) in bits, over the widened support.

    In normalized mode the mu_x scale factor cancels, so the result is
    independent of the estimate; mu_x = 0 is rejected there. In the literal
    mode mu_x = 0 makes the integrand identically zero, hence h = 0.
    """
    if normalized:
        if est.mu_x == 0.0:
            raise DegenerateInput("normalized received entropy undefined at mu_x = 0")
        return _normalized_received_entropy(params, spec)
    if est.mu_x == 0.0:
        return 0.0
    profile = _window_profile(params, spec)
    c = est.mu_x

    def integrand(y):
        p = c * profile(y)
        out = np.zeros_like(p)
        pos = p > 0.0
        out[pos] = -p[pos] * np.log2(p[pos])
        return out

    value, _ = integrate(integrand, profile.support, spec)
    return value


def received_mean(
    est: TransmitEstimate,
    params: NoiseParams,
    spec: QuadratureSpec = DEFAULT_SPEC,
) -> float:
    """Mean of the normalized received density (the mu_x factor cancels)."""
    if est.mu_x == 0.0:
        raise DegenerateInput("received mean undefined at mu_x = 0")
    profile = _window_profile(params, spec)
    value, _ = integrate(lambda y: y * profile(y), profile.support, spec)
    return value / profile.mass


def bloch_angles(cfg: RabiConfig):
    """Bloch-sphere angles (theta, phi) of the driven two-level system.

    theta = 2*arccos((omega/omega_g) * sin(omega_g*t/2)) lies in [0, 2*pi].
    phi = -arcsin(cos(omega_g*t/2) / (sqrt(1 - (omega/omega_g)^2)
    * sin(omega_g*t/2)^2)); its arcsin argument can legitimately leave
    [-1, 1], in which case OutOfDomain is raised rather than a value
    fabricated. Arguments within 1e-12 of +-1 are clamped as numerical
    grazing.

    Raises
    ------
    Singularity
        When the phi denominator vanishes: sin(omega_g*t/2) = 0 (e.g. t=0)
        or omega = omega_g, both within 1e-12.
    OutOfDomain
        When the arcsin argument exceeds 1 in magnitude beyond grazing.
    """
    ratio = cfg.omega / cfg.omega_g
    half = 0.5 * cfg.omega_g * cfg.t
    s = math.sin(half)
    theta_arg = ratio * s
    theta_arg = min(1.0, max(-1.0, theta_arg))
    theta = 2.0 * math.acos(theta_arg)
    root = 1.0 - ratio * ratio
    if abs(s) <= _GRAZE_TOL or abs(cfg.omega_g - cfg.omega) <= _GRAZE_TOL or root <= 0.0:
        raise Singularity(
            "phi denominator sqrt(1-(omega/omega_g)^2)*sin(omega_g*t/2)^2 vanishes"
        )
    phi_arg = math.cos(half) / (math.sqrt(root) * s * s)
    if abs(phi_arg) > 1.0:
        if abs(phi_arg) - 1.0 > _GRAZE_TOL:
            raise OutOfDomain(
                f"arcsin argument {phi_arg:.6g} outside [-1, 1]"
            )
        phi_arg = math.copysign(1.0, phi_arg)
    phi = -math.asin(phi_arg)
    return theta, phi


def working_point(wp: WorkingPoint) -> float:
    """Four-quadrant arctangent of (delta, epsilon), in (-pi, pi]."""
    angle = math.atan2(wp.delta, wp.epsilon)
    if angle == -math.pi:
        angle = math.pi
    return angle
