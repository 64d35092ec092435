"""Random draws and conjugate updates used by the experiments.

Every sampler is a pure function of its parameters and an RngStream, so
reruns with the same (seed, stream_id) reproduce bit-identical output and
distinct stream ids give statistically independent sequences.  Workers that
parallelize a batch should each own a stream id and merge in id order.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ._normal import norm_cdf, norm_quantile
from .errors import DegenerateUpdateError

__all__ = [
    "RngStream",
    "GaussianPosterior",
    "gaussian_conjugate_update",
    "sample_normal",
    "sample_truncated_normal",
    "sample_dirichlet",
    "vmf_posterior_update",
    "sample_vmf",
]

# beyond this many standard deviations the inverse-CDF path loses digits,
# so far-tail truncation switches to exponential rejection
TAIL_SWITCH = 5.0


@dataclass(frozen=True)
class RngStream:
    """Deterministic, splittable randomness source keyed by (seed, stream_id)."""

    seed: int
    stream_id: int = 0

    def __post_init__(self):
        if self.seed < 0 or self.stream_id < 0:
            raise ValueError("seed and stream_id must be nonnegative")

    def generator(self) -> np.random.Generator:
        return np.random.default_rng((self.seed, self.stream_id))

    def substream(self, offset: int) -> "RngStream":
        return RngStream(seed=self.seed, stream_id=self.stream_id + offset)


@dataclass(frozen=True)
class GaussianPosterior:
    """Conjugate normal posterior N(theta_n, sigma_n2) for a normal mean."""

    theta_n: float
    sigma_n2: float

    def __post_init__(self):
        if not self.sigma_n2 > 0.0:
            raise ValueError("posterior variance must be positive")

    @property
    def sigma_n(self) -> float:
        return math.sqrt(self.sigma_n2)

    def alpha(self, c: float) -> float:
        """Standardized lower bound (c - theta_n) / sigma_n."""
        return -math.inf if math.isinf(c) else (c - self.theta_n) / self.sigma_n

    def beta(self, d: float) -> float:
        """Standardized upper bound (d - theta_n) / sigma_n."""
        return math.inf if math.isinf(d) else (d - self.theta_n) / self.sigma_n


def gaussian_conjugate_update(
    theta0: float, sigma0_2: float, sigma2: float, data: np.ndarray
) -> GaussianPosterior:
    """Posterior for a normal mean with N(theta0, sigma0_2) prior and known
    observation variance sigma2.

    Precision adds: 1/sigma_n^2 = 1/sigma0^2 + n/sigma^2, and the mean is the
    precision-weighted combination of prior mean and sample mean.  An
    infinite prior variance is accepted as the flat-prior limit.
    """
    if not sigma2 > 0.0:
        raise ValueError("observation variance must be positive")
    if not sigma0_2 > 0.0:
        raise ValueError("prior variance must be positive")
    data = np.atleast_1d(np.asarray(data, dtype=float))
    if data.size == 0:
        raise ValueError("data must contain at least one observation")
    n = data.size
    xbar = float(data.mean())
    prior_prec = 0.0 if math.isinf(sigma0_2) else 1.0 / sigma0_2
    post_prec = prior_prec + n / sigma2
    sigma_n2 = 1.0 / post_prec
    theta_n = sigma_n2 * (theta0 * prior_prec + n * xbar / sigma2)
    return GaussianPosterior(theta_n=theta_n, sigma_n2=sigma_n2)


def sample_normal(mu: float, sigma: float, n: int, stream: RngStream) -> np.ndarray:
    if not sigma > 0.0:
        raise ValueError(f"scale must be positive, got {sigma}")
    if n < 1:
        raise ValueError("need at least one draw")
    return stream.generator().normal(mu, sigma, size=n)


def _tail_rejection(rng: np.random.Generator, alpha: float, beta: float, n: int) -> np.ndarray:
    """Standard-normal draws on [alpha, beta] with alpha deep in the upper tail.

    Shifted-exponential proposal at rate (alpha + sqrt(alpha^2 + 4)) / 2; the
    acceptance test is exact, so the support is exact as well.
    """
    rate = 0.5 * (alpha + math.sqrt(alpha * alpha + 4.0))
    out = np.empty(n)
    filled = 0
    while filled < n:
        chunk = max(n - filled, 128)
        x = alpha + rng.exponential(1.0 / rate, size=chunk)
        accept = rng.uniform(size=chunk) <= np.exp(-0.5 * (x - rate) ** 2)
        if not math.isinf(beta):
            accept &= x <= beta
        good = x[accept]
        take = min(good.size, n - filled)
        out[filled : filled + take] = good[:take]
        filled += take
    return out


def sample_truncated_normal(
    mu: float, sigma: float, c: float, d: float, n: int, stream: RngStream
) -> np.ndarray:
    """Draws from N(mu, sigma^2) conditioned on [c, d].

    Moderate truncations invert the CDF on the restricted range; once the
    nearer bound is more than TAIL_SWITCH standard deviations from mu the
    inverse CDF is replaced by one-sided exponential rejection, which stays
    exact arbitrarily far out.
    """
    if not sigma > 0.0:
        raise ValueError(f"scale must be positive, got {sigma}")
    if not c < d:
        raise ValueError(f"truncation requires c < d, got [{c}, {d}]")
    if n < 1:
        raise ValueError("need at least one draw")
    rng = stream.generator()
    alpha = -math.inf if math.isinf(c) else (c - mu) / sigma
    beta = math.inf if math.isinf(d) else (d - mu) / sigma

    if alpha > TAIL_SWITCH:
        z = _tail_rejection(rng, alpha, beta, n)
    elif beta < -TAIL_SWITCH:
        z = -_tail_rejection(rng, -beta, -alpha, n)
    else:
        p_lo = norm_cdf(alpha) if not math.isinf(alpha) else 0.0
        p_hi = norm_cdf(beta) if not math.isinf(beta) else 1.0
        u = rng.uniform(size=n)
        z = norm_quantile(p_lo + u * (p_hi - p_lo))
    x = mu + sigma * np.asarray(z)
    return np.clip(x, c if not math.isinf(c) else -np.inf, d if not math.isinf(d) else np.inf)


def sample_dirichlet(alpha: np.ndarray, n: int, stream: RngStream) -> np.ndarray:
    """n rows from Dirichlet(alpha) via normalized gamma variates."""
    alpha = np.atleast_1d(np.asarray(alpha, dtype=float))
    if np.any(alpha <= 0.0):
        raise ValueError("all concentration parameters must be positive")
    if n < 1:
        raise ValueError("need at least one draw")
    rng = stream.generator()
    gammas = rng.standard_gamma(alpha, size=(n, alpha.size))
    return gammas / gammas.sum(axis=1, keepdims=True)


def vmf_posterior_update(
    mu: np.ndarray, psi: float, data: np.ndarray
) -> tuple[np.ndarray, float]:
    """Conjugate direction update: the posterior parameter vector is
    n*xbar + psi*mu, with concentration its norm and mean its direction."""
    mu = np.atleast_1d(np.asarray(mu, dtype=float))
    if abs(float(np.linalg.norm(mu)) - 1.0) > 1e-10:
        raise ValueError("prior mean direction must be a unit vector")
    if psi < 0.0:
        raise ValueError("prior concentration must be nonnegative")
    data = np.atleast_2d(np.asarray(data, dtype=float))
    if data.shape[1] != mu.size:
        raise ValueError(f"data columns ({data.shape[1]}) must match direction length ({mu.size})")
    resultant = data.shape[0] * data.mean(axis=0) + psi * mu
    psi_n = float(np.linalg.norm(resultant))
    if psi_n == 0.0:
        raise DegenerateUpdateError("resultant vector is zero; posterior direction undefined")
    return resultant / psi_n, psi_n


def _uniform_sphere(rng: np.random.Generator, n: int, m: int) -> np.ndarray:
    v = rng.normal(size=(n, m))
    return v / np.linalg.norm(v, axis=1, keepdims=True)


def sample_vmf(mu: np.ndarray, psi: float, n: int, stream: RngStream) -> np.ndarray:
    """n unit vectors from the von Mises-Fisher distribution on S^{m-1}.

    The cosine against mu follows the usual beta-envelope rejection scheme;
    the orthogonal part is uniform on the tangent sphere.  psi = 0 reduces
    to the uniform distribution.
    """
    mu = np.atleast_1d(np.asarray(mu, dtype=float))
    m = mu.size
    if m < 2:
        raise ValueError("direction must live in dimension >= 2")
    if abs(float(np.linalg.norm(mu)) - 1.0) > 1e-10:
        raise ValueError("mean direction must be a unit vector")
    if psi < 0.0:
        raise ValueError("concentration must be nonnegative")
    if n < 1:
        raise ValueError("need at least one draw")
    rng = stream.generator()
    if psi == 0.0:
        return _uniform_sphere(rng, n, m)

    dim = m - 1
    b = dim / (math.sqrt(4.0 * psi * psi + dim * dim) + 2.0 * psi)
    x0 = (1.0 - b) / (1.0 + b)
    c = psi * x0 + dim * math.log(1.0 - x0 * x0)

    cosines = np.empty(n)
    filled = 0
    while filled < n:
        chunk = max(n - filled, 128)
        z = rng.beta(dim / 2.0, dim / 2.0, size=chunk)
        w = (1.0 - (1.0 + b) * z) / (1.0 - (1.0 - b) * z)
        u = rng.uniform(size=chunk)
        ok = psi * w + dim * np.log1p(-x0 * w) - c >= np.log(u)
        good = w[ok]
        take = min(good.size, n - filled)
        cosines[filled : filled + take] = good[:take]
        filled += take

    tangent = rng.normal(size=(n, m))
    tangent -= np.outer(tangent @ mu, mu)
    tangent /= np.linalg.norm(tangent, axis=1, keepdims=True)
    draws = cosines[:, None] * mu + np.sqrt(1.0 - cosines**2)[:, None] * tangent
    return draws / np.linalg.norm(draws, axis=1, keepdims=True)
