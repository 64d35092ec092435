"""Summary statistics for posterior sample batches.

Equal-tailed credible intervals are used throughout: boundary atoms make
highest-density regions ambiguous, while empirical quantiles stay
well-defined on atom-plus-density mixtures.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "ParameterSummary",
    "SummaryReport",
    "credible_interval",
    "lag1_autocorrelation",
    "effective_sample_size",
    "mad_fit",
]

MIN_DRAWS = 100


@dataclass
class ParameterSummary:
    mean: float
    ci_lower: float
    ci_upper: float
    lag1_autocorr: float | None = None
    ess: float | None = None
    atom_masses: dict[str, float] | None = None

    def __post_init__(self):
        if self.ci_lower > self.ci_upper:
            raise ValueError("credible interval bounds are out of order")
        if self.lag1_autocorr is not None and not -1.0 <= self.lag1_autocorr <= 1.0:
            raise ValueError("lag-1 autocorrelation must lie in [-1, 1]")

    @property
    def ci_width(self) -> float:
        return self.ci_upper - self.ci_lower


@dataclass
class SummaryReport:
    label: str
    level: float
    parameters: dict[str, ParameterSummary] = field(default_factory=dict)
    fit_metrics: dict[str, float | None] = field(default_factory=dict)
    extras: dict[str, object] = field(default_factory=dict)


def credible_interval(draws: np.ndarray, level: float) -> tuple[float, float]:
    """Equal-tailed interval from empirical quantiles (linear interpolation)."""
    draws = np.atleast_1d(np.asarray(draws, dtype=float))
    if draws.size < MIN_DRAWS:
        raise ValueError(f"need at least {MIN_DRAWS} draws, got {draws.size}")
    if not 0.0 < level < 1.0:
        raise ValueError(f"level must be in (0, 1), got {level}")
    tail = (1.0 - level) / 2.0
    lo, hi = np.quantile(draws, [tail, 1.0 - tail])
    return float(lo), float(hi)


def lag1_autocorrelation(draws: np.ndarray) -> float:
    """Sample autocorrelation at lag one."""
    draws = np.atleast_1d(np.asarray(draws, dtype=float))
    if draws.size < MIN_DRAWS:
        raise ValueError(f"need at least {MIN_DRAWS} draws, got {draws.size}")
    centered = draws - draws.mean()
    denom = float(centered @ centered)
    if denom == 0.0:
        raise ValueError("autocorrelation is undefined for constant draws")
    return float(centered[:-1] @ centered[1:]) / denom


def effective_sample_size(draws: np.ndarray, max_lag: int | None = None) -> float:
    """ESS from the initial positive sequence of pairwise autocorrelations.

    Pairs rho(2k) + rho(2k+1) are accumulated until the first nonpositive
    pair; for independent draws this returns roughly the number of draws.
    """
    draws = np.atleast_1d(np.asarray(draws, dtype=float))
    n = draws.size
    if n < MIN_DRAWS:
        raise ValueError(f"need at least {MIN_DRAWS} draws, got {n}")
    centered = draws - draws.mean()
    denom = float(centered @ centered)
    if denom == 0.0:
        raise ValueError("effective sample size is undefined for constant draws")
    if max_lag is None:
        max_lag = min(n - 2, 1000)
    tail_sum = 0.0
    k = 1
    while k + 1 <= max_lag:
        rho_a = float(centered[:-k] @ centered[k:]) / denom
        rho_b = float(centered[: -(k + 1)] @ centered[k + 1 :]) / denom
        pair = rho_a + rho_b
        if pair <= 0.0:
            break
        tail_sum += pair
        k += 2
    return n / (1.0 + 2.0 * tail_sum)


def mad_fit(table: np.ndarray, theta_hat: np.ndarray) -> float:
    """Mean absolute deviation between observed and fitted cell counts.

    Fitted counts are the row totals times the estimated cell probabilities;
    the result averages |fitted - observed| over all I*J cells.
    """
    table = np.atleast_2d(np.asarray(table, dtype=float))
    theta_hat = np.atleast_2d(np.asarray(theta_hat, dtype=float))
    if table.shape != theta_hat.shape:
        raise ValueError(f"shape mismatch: table {table.shape} vs theta_hat {theta_hat.shape}")
    if np.any(theta_hat < -1e-12) or np.any(np.abs(theta_hat.sum(axis=1) - 1.0) > 1e-8):
        raise ValueError("theta_hat rows must lie on the probability simplex")
    fitted = table.sum(axis=1, keepdims=True) * theta_hat
    return float(np.mean(np.abs(fitted - table)))
