"""Adaptive one-dimensional quadrature and support-truncation utilities.

The integrator is a globally adaptive Gauss-Kronrod (G7, K15) scheme: every
refinement round re-evaluates only the panels whose embedded error estimate
exceeds their proportional share of the tolerance, and all new panels are
evaluated through a single vectorized call to the integrand.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy import stats
from scipy.special import ndtri

from .errors import InvalidParams, NonConvergent, NonFinite

__all__ = [
    "Interval",
    "QuadratureSpec",
    "DEFAULT_SPEC",
    "DEFAULT_TAIL_MASS",
    "integrate",
    "integrate_batch",
    "noise_support",
]

# Omitted density mass tolerated outside a truncated support interval.
DEFAULT_TAIL_MASS = 1e-12

# Below this tail mass the conservative floor bounds (8 sigma, all truncation
# terms) are enforced on top of the quantile-derived interval.
_PRECISION_TAIL_MASS = 1e-6


@dataclass(frozen=True)
class Interval:
    """Finite integration interval [lo, hi] with lo < hi."""

    lo: float
    hi: float

    def __post_init__(self):
        if not (math.isfinite(self.lo) and math.isfinite(self.hi)):
            raise InvalidParams("interval bounds must be finite")
        if not self.lo < self.hi:
            raise InvalidParams(f"interval requires lo < hi, got [{self.lo}, {self.hi}]")

    @property
    def width(self) -> float:
        return self.hi - self.lo


@dataclass(frozen=True)
class QuadratureSpec:
    """Tolerance and budget configuration for adaptive integration."""

    rel_tol: float = 1e-10
    abs_tol: float = 1e-12
    max_subdivisions: int = 2**16

    def __post_init__(self):
        if not self.rel_tol > 0:
            raise InvalidParams("rel_tol must be positive")
        if not self.abs_tol > 0:
            raise InvalidParams("abs_tol must be positive")
        if self.max_subdivisions < 1:
            raise InvalidParams("max_subdivisions must be >= 1")


DEFAULT_SPEC = QuadratureSpec()

# 15-point Kronrod abscissae/weights on [-1, 1] and the embedded 7-point
# Gauss weights (zero at Kronrod-only nodes). QUADPACK dqk15 constants.
_XK_HALF = np.array(
    [
        0.991455371120812639206854697526329,
        0.949107912342758524526189684047851,
        0.864864423359769072789712788640926,
        0.741531185599394439863864773280788,
        0.586087235467691130294144838258730,
        0.405845151377397166906606412076961,
        0.207784955007898467600689403773245,
    ]
)
_WK_HALF = np.array(
    [
        0.022935322010529224963732008058970,
        0.063092092629978553290700663189204,
        0.104790010322250183839876322541518,
        0.140653259715525918745189590510238,
        0.169004726639267902826583426598550,
        0.190350578064785409913256402421014,
        0.204432940075298892414161999234649,
    ]
)
_WK_CENTER = 0.209482141084727828012999174891714
_WG_HALF = np.array(
    [
        0.129484966168869693270611432679082,
        0.279705391489276667901467771423780,
        0.381830050505118944950369775488975,
    ]
)
_WG_CENTER = 0.417959183673469387755102040816327

_NODES = np.concatenate([-_XK_HALF, [0.0], _XK_HALF[::-1]])
_WK = np.concatenate([_WK_HALF, [_WK_CENTER], _WK_HALF[::-1]])
_WG = np.zeros(15)
_WG[1:14:2] = np.concatenate([_WG_HALF, [_WG_CENTER], _WG_HALF[::-1]])


def _eval_panels(f, lows, highs):
    """Gauss-Kronrod value and error estimate for each panel [lows_i, highs_i].

    ``f`` receives one flat array of abscissae and must return values of the
    same shape. Returns (values, errors) arrays, one entry per panel.
    """
    half = 0.5 * (highs - lows)
    mid = 0.5 * (highs + lows)
    pts = mid[:, None] + half[:, None] * _NODES[None, :]
    fv = np.asarray(f(pts.ravel()), dtype=float)
    if fv.shape != (pts.size,):
        fv = np.broadcast_to(fv, (pts.size,)).astype(float)
    if not np.isfinite(fv).all():
        bad = pts.ravel()[~np.isfinite(fv)][0]
        raise NonFinite(f"integrand returned a non-finite value at x={bad!r}")
    fv = fv.reshape(pts.shape)
    resk = (fv * _WK).sum(axis=1) * half
    resg = (fv * _WG).sum(axis=1) * half
    # QUADPACK-style rescaled error from the K15-G7 difference.
    mean = resk / (highs - lows)
    resasc = (np.abs(fv - mean[:, None]) * _WK).sum(axis=1) * half
    diff = np.abs(resk - resg)
    err = np.where(
        resasc > 0.0,
        resasc * np.minimum(1.0, (200.0 * diff / np.where(resasc > 0, resasc, 1.0)) ** 1.5),
        diff,
    )
    return resk, err


def integrate(f, iv: Interval, spec: QuadratureSpec = DEFAULT_SPEC):
    """Integrate ``f`` over ``iv`` to the tolerances in ``spec``.

    Parameters
    ----------
    f : callable
        Vectorized integrand mapping an ndarray of abscissae to values.
    iv : Interval
        Integration range.
    spec : QuadratureSpec
        Tolerances and the subdivision budget.

    Returns
    -------
    (value, err_estimate) with |err_estimate| <= max(abs_tol, rel_tol*|value|).

    Raises
    ------
    NonConvergent
        If the subdivision budget is exhausted first.
    NonFinite
        If the integrand returns NaN or +-inf anywhere it is sampled.
    """
    lows = np.array([iv.lo], dtype=float)
    highs = np.array([iv.hi], dtype=float)
    vals, errs = _eval_panels(f, lows, highs)
    n_sub = 0
    while True:
        total = math.fsum(vals)
        total_err = math.fsum(errs)
        tol = max(spec.abs_tol, spec.rel_tol * abs(total))
        if total_err <= tol:
            return total, total_err
        widths = highs - lows
        split = errs > 0.5 * tol * widths / iv.width
        if not split.any():
            split[int(np.argmax(errs))] = True
        n_split = int(split.sum())
        if n_sub + n_split > spec.max_subdivisions:
            raise NonConvergent(
                f"tolerance not reached after {n_sub} subdivisions "
                f"(residual error {total_err:.3e}, tolerance {tol:.3e})"
            )
        n_sub += n_split
        mids = 0.5 * (lows[split] + highs[split])
        new_lows = np.concatenate([lows[~split], lows[split], mids])
        new_highs = np.concatenate([highs[~split], mids, highs[split]])
        nvals, nerrs = _eval_panels(f, np.concatenate([lows[split], mids]),
                                    np.concatenate([mids, highs[split]]))
        vals = np.concatenate([vals[~split], nvals])
        errs = np.concatenate([errs[~split], nerrs])
        order = np.argsort(new_lows, kind="stable")
        lows, highs = new_lows[order], new_highs[order]
        vals, errs = vals[order], errs[order]


def _eval_panels_rows(f, lows, highs):
    """Row-family version of :func:`_eval_panels`.

    ``f`` maps a flat abscissa array of length q to an (m, q) matrix, one row
    per member of the integrand family. Returns (values, errors) of shape
    (m, n_panels).
    """
    half = 0.5 * (highs - lows)
    mid = 0.5 * (highs + lows)
    pts = mid[:, None] + half[:, None] * _NODES[None, :]
    fv = np.asarray(f(pts.ravel()), dtype=float)
    if not np.isfinite(fv).all():
        raise NonFinite("integrand family returned a non-finite value")
    m = fv.shape[0]
    fv = fv.reshape(m, len(lows), 15)
    resk = (fv * _WK).sum(axis=2) * half
    resg = (fv * _WG).sum(axis=2) * half
    mean = resk / (highs - lows)
    resasc = (np.abs(fv - mean[:, :, None]) * _WK).sum(axis=2) * half
    diff = np.abs(resk - resg)
    err = np.where(
        resasc > 0.0,
        resasc * np.minimum(1.0, (200.0 * diff / np.where(resasc > 0, resasc, 1.0)) ** 1.5),
        diff,
    )
    return resk, err


def integrate_batch(f, iv: Interval, spec: QuadratureSpec = DEFAULT_SPEC):
    """Integrate a family of integrands over one shared interval.

    ``f`` maps an abscissa array of length q to an (m, q) matrix. All rows are
    integrated on a shared, adaptively refined partition of ``iv``; a panel is
    bisected whenever any not-yet-converged row needs it. Returns
    (values, errors) arrays of length m, with the same per-row tolerance
    guarantee as :func:`integrate`.
    """
    lows = np.array([iv.lo], dtype=float)
    highs = np.array([iv.hi], dtype=float)
    vals, errs = _eval_panels_rows(f, lows, highs)
    n_sub = 0
    while True:
        row_tot = vals.sum(axis=1)
        row_err = errs.sum(axis=1)
        row_tol = np.maximum(spec.abs_tol, spec.rel_tol * np.abs(row_tot))
        active = row_err > row_tol
        if not active.any():
            return row_tot, row_err
        widths = highs - lows
        local = 0.5 * row_tol[:, None] * widths[None, :] / iv.width
        split = ((errs > local) & active[:, None]).any(axis=0)
        if not split.any():
            worst = errs[active].max(axis=0)
            split[int(np.argmax(worst))] = True
        n_split = int(split.sum())
        if n_sub + n_split > spec.max_subdivisions:
            raise NonConvergent(
                f"row-family tolerance not reached after {n_sub} subdivisions"
            )
        n_sub += n_split
        mids = 0.5 * (lows[split] + highs[split])
        nvals, nerrs = _eval_panels_rows(
            f,
            np.concatenate([lows[split], mids]),
            np.concatenate([mids, highs[split]]),
        )
        lows = np.concatenate([lows[~split], lows[split], mids])
        highs = np.concatenate([highs[~split], mids, highs[split]])
        vals = np.concatenate([vals[:, ~split], nvals], axis=1)
        errs = np.concatenate([errs[:, ~split], nerrs], axis=1)


@lru_cache(maxsize=256)
def _poisson_quantile(lam: float, upper_tail: float) -> int:
    """Smallest m with P(N > m) <= upper_tail for N ~ Poisson(lam)."""
    if lam == 0.0:
        return 0
    return int(stats.poisson.ppf(1.0 - upper_tail, lam))


def noise_support(params, tail_mass: float = DEFAULT_TAIL_MASS) -> Interval:
    """Finite interval outside which the hybrid noise density mass is < tail_mass.

    The Gaussian tails and the Poisson component tail each receive half of the
    budget. For tail masses below 1e-6 the interval is additionally widened to
    the conservative floor [mu - 8*sigma, mu + N_trunc + 8*sigma], where
    N_trunc is the number of mixture terms kept by the truncation policy.
    """
    if not 0.0 < tail_mass < 1.0:
        raise InvalidParams(f"tail_mass must lie in (0, 1), got {tail_mass}")
    if params.sigma <= 0:
        raise InvalidParams("sigma must be positive")
    if params.lam < 0:
        raise InvalidParams("lam must be nonnegative")
    k = float(-ndtri(tail_mass / 4.0))
    n_top = params.trunc.max_term(params.lam)
    n_tail = min(_poisson_quantile(params.lam, tail_mass / 2.0), n_top)
    n_lo = 0 if params.trunc.include_zero_term else min(1, n_top)
    lo = params.mu + n_lo - k * params.sigma
    hi = params.mu + n_tail + k * params.sigma
    if tail_mass < _PRECISION_TAIL_MASS:
        lo = min(lo, params.mu - 8.0 * params.sigma)
        hi = max(hi, params.mu + n_top + 8.0 * params.sigma)
    return Interval(lo, hi)
