"""Numerically careful standard-normal helpers.

All tail quantities route through scipy's erfc-based ``ndtr``/``log_ndtr``
so that probabilities stay accurate far into the tails; differences of CDF
values in a common tail are evaluated in log space to avoid cancellation.
Infinite bounds are accepted everywhere and resolve to the obvious limits.
"""

from __future__ import annotations

import math

import numpy as np
from scipy import special

from .errors import DegenerateUpdateError

_LOG_SQRT_2PI = 0.5 * math.log(2.0 * math.pi)

# beyond this |z| the linear-space interval mass underflows to exactly 0.0
_UNDERFLOW_Z = 38.0


def norm_pdf(z):
    z = np.asarray(z, dtype=float)
    out = np.where(np.isinf(z), 0.0, np.exp(-0.5 * np.square(np.where(np.isinf(z), 0.0, z)) - _LOG_SQRT_2PI))
    return out if out.ndim else float(out)


def norm_logpdf(z):
    z = np.asarray(z, dtype=float)
    out = -0.5 * np.square(z) - _LOG_SQRT_2PI
    return out if out.ndim else float(out)


def norm_cdf(z):
    z = np.asarray(z, dtype=float)
    out = special.ndtr(z)
    return out if out.ndim else float(out)


def norm_sf(z):
    """P(Z > z), computed via the mirrored CDF so upper tails keep precision."""
    z = np.asarray(z, dtype=float)
    out = special.ndtr(-z)
    return out if out.ndim else float(out)


def norm_logcdf(z):
    z = np.asarray(z, dtype=float)
    out = special.log_ndtr(z)
    return out if out.ndim else float(out)


def norm_quantile(p):
    p = np.asarray(p, dtype=float)
    out = special.ndtri(p)
    return out if out.ndim else float(out)


def interval_mass(alpha: float, beta: float) -> float:
    """P(alpha < Z <= beta) for standard normal Z, stable in far tails.

    When both endpoints sit in the same tail the difference is built from
    ``log_ndtr`` with ``expm1`` so the leading digits survive cancellation.
    """
    if not alpha < beta:
        raise ValueError(f"interval requires alpha < beta, got [{alpha}, {beta}]")
    if alpha > 0.0 and beta > 0.0:
        # both in the upper tail: Phi(beta) - Phi(alpha) = Phi(-alpha) - Phi(-beta)
        la = special.log_ndtr(-alpha)
        lb = special.log_ndtr(-beta) if not math.isinf(beta) else -math.inf
        return float(math.exp(la) * -math.expm1(lb - la)) if lb > -math.inf else float(math.exp(la))
    if alpha < 0.0 and beta < 0.0:
        la = special.log_ndtr(alpha) if not math.isinf(alpha) else -math.inf
        lb = special.log_ndtr(beta)
        return float(math.exp(lb) * -math.expm1(la - lb)) if la > -math.inf else float(math.exp(lb))
    return float(special.ndtr(beta) - special.ndtr(alpha))


def trunc_norm_mean(mu: float, sigma: float, c: float, d: float) -> float:
    """Mean of a normal(mu, sigma^2) truncated to [c, d].

    Raises when the interval mass underflows in double precision (both
    standardized bounds past ~38), where the ratio form below is 0/0.
    """
    alpha = (c - mu) / sigma if not math.isinf(c) else -math.inf
    beta = (d - mu) / sigma if not math.isinf(d) else math.inf
    mass = interval_mass(alpha, beta)
    if mass <= 0.0:
        raise DegenerateUpdateError(
            f"truncation [{c}, {d}] carries no mass for N({mu}, {sigma}^2): "
            f"standardized bounds ({alpha:.3g}, {beta:.3g}) exceed {_UNDERFLOW_Z} sigma"
        )
    return mu + sigma * (norm_pdf(alpha) - norm_pdf(beta)) / mass


def trunc_norm_pdf(x, mu: float, sigma: float, c: float, d: float):
    """Density of normal(mu, sigma^2) truncated to [c, d], zero outside."""
    alpha = (c - mu) / sigma if not math.isinf(c) else -math.inf
    beta = (d - mu) / sigma if not math.isinf(d) else math.inf
    mass = interval_mass(alpha, beta)
    if mass <= 0.0:
        raise DegenerateUpdateError(f"truncation [{c}, {d}] carries no mass for N({mu}, {sigma}^2)")
    x = np.asarray(x, dtype=float)
    z = (x - mu) / sigma
    dens = np.exp(-0.5 * z * z - _LOG_SQRT_2PI) / (sigma * mass)
    dens = np.where((x >= c) & (x <= d), dens, 0.0)
    return dens if dens.ndim else float(dens)


def normal_density(x: float, mean: float, variance: float) -> float:
    """N(x; mean, variance) density; 0.0 at infinite x."""
    if math.isinf(x):
        return 0.0
    sd = math.sqrt(variance)
    z = (x - mean) / sd
    return math.exp(-0.5 * z * z - _LOG_SQRT_2PI) / sd
