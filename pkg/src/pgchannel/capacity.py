"""Mutual information, channel capacity over the transmit point estimate,
SNR, and the parameter sweeps behind the capacity figures.

Two conventions are supported throughout. ``paper-literal`` uses the scaled
window integral mu_x * g(y) as the received density, so mutual information
genuinely varies with mu_x (and can be negative at small mu_x). ``normalized``
uses the unit-mass density g / mass(g), making mutual information independent
of mu_x and the capacity a well-posed noise functional.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import InvalidParams, UnsupportedMode
from .noise import (
    NoiseParams,
    hybrid_moments,
    hybrid_pdf,
    moment_by_quadrature,
    noise_entropy,
)
from .quadrature import (
    DEFAULT_SPEC,
    DEFAULT_TAIL_MASS,
    QuadratureSpec,
    integrate,
    noise_support,
)
from .signal_model import TransmitEstimate, received_entropy, received_mean

__all__ = [
    "MODE_PAPER_LITERAL",
    "MODE_NORMALIZED",
    "OptimizerSpec",
    "CapacityResult",
    "SweepRow",
    "SweepTable",
    "mutual_information",
    "channel_capacity",
    "snr",
    "sweep_mi_vs_mux",
    "sweep_capacity_vs_sigma",
]

MODE_PAPER_LITERAL = "paper-literal"
MODE_NORMALIZED = "normalized"

_TWO_PI = 2.0 * math.pi
_INVPHI = (math.sqrt(5.0) - 1.0) / 2.0


def _check_mode(mode: str) -> str:
    if mode not in (MODE_PAPER_LITERAL, MODE_NORMALIZED):
        raise InvalidParams(
            f"mode must be '{MODE_PAPER_LITERAL}' or '{MODE_NORMALIZED}', got {mode!r}"
        )
    return mode


@dataclass(frozen=True)
class OptimizerSpec:
    """Grid-then-golden-section search configuration for the capacity search."""

    grid_points: int = 256
    refine_tol: float = 1e-6
    max_refine_iters: int = 200

    def __post_init__(self):
        if self.grid_points < 8:
            raise InvalidParams(f"grid_points must be >= 8, got {self.grid_points}")
        if not self.refine_tol > 0:
            raise InvalidParams("refine_tol must be positive")
        if self.max_refine_iters < 1:
            raise InvalidParams("max_refine_iters must be >= 1")


@dataclass(frozen=True)
class CapacityResult:
    """Outcome of maximizing mutual information over mu_x in [0, 2*pi]."""

    mu_x_star: float
    capacity_bits: float
    mi_curve: tuple
    evaluations: int
    mode: str
    non_unimodal: bool = False

    def __post_init__(self):
        if not 0.0 <= self.mu_x_star <= _TWO_PI:
            raise InvalidParams(f"mu_x_star outside [0, 2*pi]: {self.mu_x_star}")
        if any(mi > self.capacity_bits + 1e-9 for _, mi in self.mi_curve):
            raise InvalidParams("capacity below a recorded MI curve value")


@dataclass(frozen=True)
class SweepRow:
    x: float
    capacity_bits: float
    snr: float
    sigma: float
    lam: float


@dataclass(frozen=True)
class SweepTable:
    """Ordered sweep rows plus free-form notes (e.g. omitted degenerate rows)."""

    rows: tuple
    notes: tuple = field(default=())

    def __post_init__(self):
        xs = [r.x for r in self.rows]
        if xs != sorted(xs):
            raise InvalidParams("sweep rows must be ordered by x")
        for r in self.rows:
            if not all(map(math.isfinite, (r.x, r.capacity_bits, r.snr, r.sigma, r.lam))):
                raise InvalidParams("sweep rows must be finite")


def mutual_information(
    est: TransmitEstimate,
    params: NoiseParams,
    spec: QuadratureSpec = DEFAULT_SPEC,
    mode: str = MODE_PAPER_LITERAL,
) -> float:
    """I(X;Y) = h(Y) - h(Z) in bits; the noise term is mode-independent."""
    _check_mode(mode)
    h_y = received_entropy(est, params, spec, normalized=(mode == MODE_NORMALIZED))
    return h_y - noise_entropy(params, spec)


def _golden_section_max(f, lo: float, hi: float, tol: float, max_iters: int):
    """Golden-section maximization on [lo, hi]; ties resolve toward lo.

    Returns (x_best, f_best, evaluations).
    """
    a, b = lo, hi
    x1 = b - _INVPHI * (b - a)
    x2 = a + _INVPHI * (b - a)
    f1, f2 = f(x1), f(x2)
    evals = 2
    iters = 0
    while (b - a) > tol and iters < max_iters:
        if f1 >= f2:
            b, x2, f2 = x2, x1, f1
            x1 = b - _INVPHI * (b - a)
            f1 = f(x1)
        else:
            a, x1, f1 = x1, x2, f2
            x2 = a + _INVPHI * (b - a)
            f2 = f(x2)
        evals += 1
        iters += 1
    if f1 >= f2:
        return x1, f1, evals
    return x2, f2, evals


def channel_capacity(
    params: NoiseParams,
    qspec: QuadratureSpec = DEFAULT_SPEC,
    ospec: OptimizerSpec = OptimizerSpec(),
    mode: str = MODE_PAPER_LITERAL,
) -> CapacityResult:
    """Maximize mutual information over mu_x in [0, 2*pi].

    A coarse grid of ``grid_points`` MI evaluations locates the argmax, and a
    golden-section refinement on the bracketing grid cells sharpens it to
    ``refine_tol``. In normalized mode the MI is constant in mu_x; the grid
    then starts at the first positive abscissa (mu_x = 0 is degenerate) and
    the tie-break keeps its lowest point. Deterministic for identical inputs.
    """
    _check_mode(mode)
    grid = np.linspace(0.0, _TWO_PI, ospec.grid_points)
    if mode == MODE_NORMALIZED:
        grid = grid[grid > 0.0]

    def mi_at(x: float) -> float:
        return mutual_information(TransmitEstimate(x), params, qspec, mode)

    mi_values = [mi_at(x) for x in grid]
    evaluations = len(grid)
    best = int(np.argmax(mi_values))
    grid_x, grid_mi = float(grid[best]), mi_values[best]

    lo = float(grid[best - 1]) if best > 0 else float(grid[best])
    hi = float(grid[best + 1]) if best < len(grid) - 1 else float(grid[best])
    if hi > lo:
        ref_x, ref_mi, ref_evals = _golden_section_max(
            mi_at, lo, hi, ospec.refine_tol, ospec.max_refine_iters
        )
        evaluations += ref_evals
    else:
        ref_x, ref_mi = grid_x, grid_mi

    non_unimodal = ref_mi < grid_mi - 1e-12
    if ref_mi > grid_mi:
        star_x, star_mi = ref_x, ref_mi
    else:
        star_x, star_mi = grid_x, grid_mi

    return CapacityResult(
        mu_x_star=star_x,
        capacity_bits=star_mi,
        mi_curve=tuple(zip((float(x) for x in grid), mi_values)),
        evaluations=evaluations,
        mode=mode,
        non_unimodal=non_unimodal,
    )


def _noise_std(params: NoiseParams, spec: QuadratureSpec) -> float:
    """Standard deviation of Z: closed form when the zero term is included,
    otherwise normalized quadrature moments of the truncated density."""
    try:
        _, var = hybrid_moments(params)
    except UnsupportedMode:
        iv = noise_support(params, DEFAULT_TAIL_MASS)
        mass, _ = integrate(lambda z: hybrid_pdf(z, params), iv, spec)
        m1 = moment_by_quadrature(params, 1, spec) / mass
        m2 = moment_by_quadrature(params, 2, spec) / mass
        var = m2 - m1 * m1
    return math.sqrt(var)


def snr(
    est: TransmitEstimate,
    params: NoiseParams,
    spec: QuadratureSpec = DEFAULT_SPEC,
) -> float:
    """Signal-to-noise ratio mu_Y / sigma_Z (dimensionless)."""
    return received_mean(est, params, spec) / _noise_std(params, spec)


def sweep_mi_vs_mux(
    params: NoiseParams,
    qspec: QuadratureSpec = DEFAULT_SPEC,
    n_points: int = 65,
    mode: str = MODE_PAPER_LITERAL,
) -> SweepTable:
    """Mutual information on a uniform mu_x grid over [0, 2*pi].

    In normalized mode the mu_x = 0 point is degenerate and is omitted (noted
    on the table); in the literal mode it evaluates to -h(Z).
    """
    _check_mode(mode)
    if n_points < 2:
        raise InvalidParams(f"n_points must be >= 2, got {n_points}")
    grid = np.linspace(0.0, _TWO_PI, n_points)
    notes = []
    if mode == MODE_NORMALIZED:
        grid = grid[grid > 0.0]
        notes.append("mu_x=0 row omitted: degenerate in normalized mode")
    snr_value = snr(TransmitEstimate(math.pi), params, qspec)
    rows = tuple(
        SweepRow(
            x=float(x),
            capacity_bits=mutual_information(TransmitEstimate(float(x)), params, qspec, mode),
            snr=snr_value,
            sigma=params.sigma,
            lam=params.lam,
        )
        for x in grid
    )
    return SweepTable(rows=rows, notes=tuple(notes))


def sweep_capacity_vs_sigma(
    lam: float,
    mu: float,
    sigma_values,
    qspec: QuadratureSpec = DEFAULT_SPEC,
    ospec: OptimizerSpec = OptimizerSpec(),
    mode: str = MODE_NORMALIZED,
    trunc=None,
) -> SweepTable:
    """One capacity row per noise standard deviation, SNR taken at mu_x_star.

    Reindexing the rows by their SNR column yields the capacity-versus-SNR
    view of the same sweep.
    """
    _check_mode(mode)
    sig = [float(s) for s in sigma_values]
    if any(s <= 0 for s in sig):
        raise InvalidParams("sigma_values must be positive")
    if sig != sorted(sig):
        raise InvalidParams("sigma_values must be increasing")
    rows = []
    for s in sig:
        if trunc is None:
            params = NoiseParams(lam=lam, mu=mu, sigma=s)
        else:
            params = NoiseParams(lam=lam, mu=mu, sigma=s, trunc=trunc)
        result = channel_capacity(params, qspec, ospec, mode)
        est = TransmitEstimate(result.mu_x_star if result.mu_x_star > 0 else math.pi)
        rows.append(
            SweepRow(
                x=s,
                capacity_bits=result.capacity_bits,
                snr=snr(est, params, qspec),
                sigma=s,
                lam=lam,
            )
        )
    return SweepTable(rows=tuple(rows))
