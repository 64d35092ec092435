"""Closed-form pieces of the interval-projected Gaussian posterior.

Clamping a normal posterior into [c, d] piles the tail masses onto the
endpoints as point masses and leaves a truncated normal in between.  Atoms
are first-class here (separate weight fields, never smeared into density
values) because the projected Lebesgue measure puts infinite mass on the
endpoints; the reference measure fixes unit atom weights at both bounds.

The module also computes the data-dependent prior whose Bayes update
reproduces the projected posterior: each prior weight is the corresponding
target weight divided by that component's marginal likelihood, renormalized.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ._normal import (
    interval_mass,
    norm_cdf,
    norm_pdf,
    norm_sf,
    normal_density,
    trunc_norm_pdf,
)
from .errors import DegenerateUpdateError
from .samplers import GaussianPosterior, gaussian_conjugate_update

__all__ = [
    "ProjectedGaussianMixture",
    "BoundaryPrior",
    "DensityGrid",
    "projected_gaussian_posterior",
    "projected_mixture_mean",
    "truncated_posterior_mean",
    "induced_prior_weights",
    "bayes_update_boundary_prior",
    "density_grid",
]


def _check_weights(*weights: float) -> None:
    if any(w < -1e-15 for w in weights):
        raise ValueError(f"mixture weights must be nonnegative, got {weights}")
    if abs(sum(weights) - 1.0) > 1e-12:
        raise ValueError(f"mixture weights must sum to 1 within 1e-12, got {sum(weights)}")


def _check_interval(c: float, d: float) -> None:
    if not c < d:
        raise ValueError(f"interval requires c < d, got [{c}, {d}]")
    if math.isinf(c) and math.isinf(d):
        raise ValueError("at least one interval endpoint must be finite")


@dataclass(frozen=True)
class ProjectedGaussianMixture:
    """Atom at c + truncated normal on (c, d) + atom at d."""

    w_lower: float
    w_interior: float
    w_upper: float
    c: float
    d: float
    theta_n: float
    sigma_n: float

    def __post_init__(self):
        _check_interval(self.c, self.d)
        _check_weights(self.w_lower, self.w_interior, self.w_upper)
        if not self.sigma_n > 0.0:
            raise ValueError("interior scale must be positive")


@dataclass(frozen=True)
class BoundaryPrior:
    """Prior of the same shape: atoms at the bounds, truncated normal inside."""

    w1: float
    w2: float
    w3: float
    theta0: float
    sigma0_2: float
    c: float
    d: float

    def __post_init__(self):
        _check_interval(self.c, self.d)
        _check_weights(self.w1, self.w2, self.w3)
        if not self.sigma0_2 > 0.0:
            raise ValueError("interior prior variance must be positive")


@dataclass(frozen=True)
class DensityGrid:
    """Interior density sampled on a grid, with atom masses kept apart."""

    points: np.ndarray
    density: np.ndarray
    atom_c_mass: float
    atom_d_mass: float
    c: float
    d: float


def projected_gaussian_posterior(
    posterior: GaussianPosterior, c: float, d: float
) -> ProjectedGaussianMixture:
    """Pushforward of N(theta_n, sigma_n^2) through the clamp onto [c, d]."""
    _check_interval(c, d)
    alpha = posterior.alpha(c)
    beta = posterior.beta(d)
    w_lower = norm_cdf(alpha) if not math.isinf(alpha) else 0.0
    w_upper = norm_sf(beta) if not math.isinf(beta) else 0.0
    w_interior = interval_mass(alpha, beta)
    total = w_lower + w_interior + w_upper
    return ProjectedGaussianMixture(
        w_lower=w_lower / total,
        w_interior=w_interior / total,
        w_upper=w_upper / total,
        c=c,
        d=d,
        theta_n=posterior.theta_n,
        sigma_n=posterior.sigma_n,
    )


def projected_mixture_mean(mix: ProjectedGaussianMixture) -> float:
    """Mean of the projected posterior.

    Written as c*w_lower + w_interior*theta_n + (phi(alpha) - phi(beta))*sigma_n
    + d*w_upper, which is the truncated-mean identity with the interval mass
    multiplied through, so vanishing interior mass needs no special case.
    Infinite endpoints contribute nothing: their atom weight is zero.
    """
    alpha = (mix.c - mix.theta_n) / mix.sigma_n if not math.isinf(mix.c) else -math.inf
    beta = (mix.d - mix.theta_n) / mix.sigma_n if not math.isinf(mix.d) else math.inf
    mean = mix.w_interior * mix.theta_n
    mean += (norm_pdf(alpha) - norm_pdf(beta)) * mix.sigma_n
    if not math.isinf(mix.c):
        mean += mix.c * mix.w_lower
    if not math.isinf(mix.d):
        mean += mix.d * mix.w_upper
    return float(mean)


def truncated_posterior_mean(posterior: GaussianPosterior, c: float, d: float) -> float:
    """Mean of N(theta_n, sigma_n^2) restricted and renormalized to [c, d].

    This is the comparison baseline: clamping pulls the mean toward theta_n,
    truncation pushes it strictly inside the interval.
    """
    _check_interval(c, d)
    alpha = posterior.alpha(c)
    beta = posterior.beta(d)
    mass = interval_mass(alpha, beta)
    if mass <= 0.0:
        raise DegenerateUpdateError(
            f"truncation to [{c}, {d}] carries no posterior mass (bounds beyond ~38 sigma)"
        )
    return posterior.theta_n + posterior.sigma_n * (norm_pdf(alpha) - norm_pdf(beta)) / mass


def _component_likelihoods(
    c: float,
    d: float,
    xbar: float,
    sigma2: float,
    n: int,
    theta0: float,
    sigma0_2: float,
) -> tuple[float, float, float, GaussianPosterior]:
    """Marginal likelihood of xbar under each prior component.

    Atoms see the plain normal likelihood at the boundary point; the
    truncated interior integrates against the likelihood in closed form
    (normal marginal times the ratio of posterior to prior interval masses).
    """
    like_var = sigma2 / n
    posterior = gaussian_conjugate_update(theta0, sigma0_2, sigma2, np.full(n, xbar))
    c_lower = normal_density(c, xbar, like_var) if not math.isinf(c) else 0.0
    c_upper = normal_density(d, xbar, like_var) if not math.isinf(d) else 0.0
    alpha0 = (c - theta0) / math.sqrt(sigma0_2) if not math.isinf(c) else -math.inf
    beta0 = (d - theta0) / math.sqrt(sigma0_2) if not math.isinf(d) else math.inf
    prior_mass = interval_mass(alpha0, beta0)
    post_mass = interval_mass(posterior.alpha(c), posterior.beta(d))
    if prior_mass <= 0.0:
        c_interior = 0.0
    else:
        c_interior = normal_density(xbar, theta0, like_var + sigma0_2) * post_mass / prior_mass
    return c_lower, c_interior, c_upper, posterior


def induced_prior_weights(
    c: float,
    d: float,
    xbar: float,
    sigma2: float,
    n: int,
    theta0: float,
    sigma0_2: float,
    target: ProjectedGaussianMixture,
) -> BoundaryPrior:
    """Prior weights whose Bayes update reproduces the target mixture weights.

    Solving W_j = w_j C_j / sum(w C) for w gives w_j proportional to
    W_j / C_j.  A component that the target needs (positive weight) but whose
    likelihood constant vanishes cannot be produced by any prior.
    """
    _check_interval(c, d)
    if (target.c, target.d) != (c, d):
        raise ValueError("target mixture is defined on a different interval")
    c_lower, c_interior, c_upper, _ = _component_likelihoods(
        c, d, xbar, sigma2, n, theta0, sigma0_2
    )
    ratios = []
    for weight, constant, name in (
        (target.w_lower, c_lower, "lower atom"),
        (target.w_interior, c_interior, "interior"),
        (target.w_upper, c_upper, "upper atom"),
    ):
        if weight == 0.0:
            ratios.append(0.0)
            continue
        if constant <= 0.0:
            raise DegenerateUpdateError(
                f"target gives weight {weight} to the {name} component, whose "
                "likelihood constant is zero; no prior can produce it"
            )
        ratios.append(weight / constant)
    total = sum(ratios)
    if total <= 0.0:
        raise DegenerateUpdateError("all target weights are zero")
    return BoundaryPrior(
        w1=ratios[0] / total,
        w2=ratios[1] / total,
        w3=ratios[2] / total,
        theta0=theta0,
        sigma0_2=sigma0_2,
        c=c,
        d=d,
    )


def bayes_update_boundary_prior(
    prior: BoundaryPrior, xbar: float, sigma2: float, n: int
) -> ProjectedGaussianMixture:
    """Posterior of a boundary prior under the Gaussian likelihood.

    Component weights update by their marginal likelihoods; the interior
    truncated normal updates to the conjugate posterior shape.
    """
    c_lower, c_interior, c_upper, posterior = _component_likelihoods(
        prior.c, prior.d, xbar, sigma2, n, prior.theta0, prior.sigma0_2
    )
    raw = (prior.w1 * c_lower, prior.w2 * c_interior, prior.w3 * c_upper)
    total = sum(raw)
    if total <= 0.0:
        raise DegenerateUpdateError("posterior mass vanished for every component")
    return ProjectedGaussianMixture(
        w_lower=raw[0] / total,
        w_interior=raw[1] / total,
        w_upper=raw[2] / total,
        c=prior.c,
        d=prior.d,
        theta_n=posterior.theta_n,
        sigma_n=posterior.sigma_n,
    )


def density_grid(
    obj: ProjectedGaussianMixture | BoundaryPrior, grid: np.ndarray
) -> DensityGrid:
    """Interior Lebesgue density on ``grid`` plus the separate atom masses."""
    grid = np.atleast_1d(np.asarray(grid, dtype=float))
    if grid.size == 0:
        raise ValueError("grid must be non-empty")
    if np.any(np.diff(grid) < 0.0):
        raise ValueError("grid must be sorted ascending")
    if isinstance(obj, ProjectedGaussianMixture):
        c, d = obj.c, obj.d
        w_int, w_c, w_d = obj.w_interior, obj.w_lower, obj.w_upper
        loc, scale2 = obj.theta_n, obj.sigma_n**2
    elif isinstance(obj, BoundaryPrior):
        c, d = obj.c, obj.d
        w_int, w_c, w_d = obj.w2, obj.w1, obj.w3
        loc, scale2 = obj.theta0, obj.sigma0_2
    else:
        raise TypeError(f"unsupported object: {type(obj).__name__}")
    if grid[0] < c or grid[-1] > d:
        raise ValueError(f"grid must lie inside [{c}, {d}]")
    if w_int > 0.0:
        density = w_int * trunc_norm_pdf(grid, loc, math.sqrt(scale2), c, d)
    else:
        density = np.zeros_like(grid)
    return DensityGrid(
        points=grid,
        density=np.asarray(density, dtype=float),
        atom_c_mass=w_c,
        atom_d_mass=w_d,
        c=c,
        d=d,
    )
