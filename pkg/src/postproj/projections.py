"""Metric projections onto the constraint sets, plus batch pushforward and
the rejection-truncation baseline.

All operators return the Euclidean-nearest feasible point.  Clamp-style
projections (interval, box) are exact arithmetic; polytope projections go
through the quadratic-programming solver and are feasible within 1e-8;
the simplex uses the sort-and-threshold shortcut with the QP route kept as
its test oracle.  Everything here is a pure function, so concurrent calls
and row-partitioned batches are safe as long as output order follows input
order.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, replace

import numpy as np

from . import stiefel as _stiefel
from .constraints import (
    Box,
    ConstraintSet,
    Interval,
    OrderedTable,
    Polytope,
    Simplex,
    Sphere,
    Stiefel,
    ordered_table_polytope,
)
from .errors import InfeasibleError
from .qp import QPProblem, solve_qp

__all__ = [
    "SampleBatch",
    "TruncationResult",
    "project_interval",
    "project_box",
    "project_simplex",
    "project_polytope",
    "project_ordered_table",
    "project_sphere",
    "project_point",
    "pushforward",
    "rejection_truncate",
]

FEASIBILITY_TOL = 1e-8


@dataclass(frozen=True)
class SampleBatch:
    """L x D matrix of draws plus the stream metadata that produced them."""

    draws: np.ndarray
    seed: int
    stream_id: int = 0
    label: str = ""

    def __post_init__(self):
        draws = np.atleast_2d(np.asarray(self.draws, dtype=float))
        if draws.shape[0] < 1:
            raise ValueError("a sample batch needs at least one row")
        if not np.all(np.isfinite(draws)):
            raise ValueError("draws must be finite")
        object.__setattr__(self, "draws", draws)

    @property
    def n_draws(self) -> int:
        return self.draws.shape[0]

    @property
    def dim(self) -> int:
        return self.draws.shape[1]


@dataclass(frozen=True)
class TruncationResult:
    """Rejection-filter output; ``draws`` may be empty when nothing survives."""

    draws: np.ndarray
    acceptance_rate: float
    n_in: int

    @property
    def n_kept(self) -> int:
        return self.draws.shape[0]

    def batch(self, template: SampleBatch) -> SampleBatch:
        if self.n_kept == 0:
            raise InfeasibleError("no draws satisfied the constraint; truncated batch is empty")
        return replace(template, draws=self.draws, label=f"truncated({template.label})")


def project_interval(x: float, c: float, d: float) -> float:
    """Clamp x into [c, d]."""
    Interval(c, d)  # validate bounds
    x = float(x)
    if not math.isfinite(x):
        raise ValueError(f"point must be finite, got {x}")
    return min(max(x, c), d)


def project_box(v: np.ndarray, lower: np.ndarray, upper: np.ndarray) -> np.ndarray:
    """Componentwise clamp; the Euclidean-nearest point of the box."""
    box = Box(lower, upper)
    v = np.atleast_1d(np.asarray(v, dtype=float))
    if v.shape != box.lower.shape:
        raise ValueError(f"point has shape {v.shape}, bounds have shape {box.lower.shape}")
    return np.minimum(np.maximum(v, box.lower), box.upper)


def project_simplex(v: np.ndarray) -> np.ndarray:
    """Euclidean projection onto {x >= 0, sum x = 1} by sort and threshold."""
    v = np.atleast_1d(np.asarray(v, dtype=float))
    if v.size == 0:
        raise ValueError("cannot project an empty vector")
    if not np.all(np.isfinite(v)):
        raise ValueError("point must be finite")
    u = np.sort(v)[::-1]
    cumsum = np.cumsum(u)
    ks = np.arange(1, v.size + 1)
    shifted = u + (1.0 - cumsum) / ks
    rho = int(np.nonzero(shifted > 0.0)[0][-1])
    tau = (cumsum[rho] - 1.0) / (rho + 1)
    return np.maximum(v - tau, 0.0)


def project_polytope(v: np.ndarray, polytope: Polytope, tol: float = 1e-10) -> np.ndarray:
    """Unique nearest point of the polytope, via the dual active-set QP."""
    v = np.atleast_1d(np.asarray(v, dtype=float))
    if v.size != polytope.dimension():
        raise ValueError(f"point has dimension {v.size}, polytope has {polytope.dimension()}")
    problem = QPProblem(
        G=np.eye(v.size),
        a=v,
        C_eq=polytope.C_eq,
        e_eq=polytope.e_eq,
        A_ineq=polytope.A_ineq,
        b_ineq=polytope.b_ineq,
    )
    solution = solve_qp(problem, tol=tol)
    if solution.status != "optimal":
        raise InfeasibleError("polytope has no feasible point")
    return solution.x


def project_ordered_table(theta: np.ndarray) -> np.ndarray:
    """Project an I x J table onto the ordered-table cone, rowwise-flattened.

    The uniform table is always feasible, so an infeasible status here would
    mean the constraint assembly itself is broken.
    """
    theta = np.atleast_2d(np.asarray(theta, dtype=float))
    if not np.all(np.isfinite(theta)):
        raise ValueError("table entries must be finite")
    table = OrderedTable(I=theta.shape[0], J=theta.shape[1])
    flat = project_polytope(theta.reshape(-1), ordered_table_polytope(table))
    return flat.reshape(theta.shape)


def project_sphere(v: np.ndarray) -> np.ndarray:
    """Radial projection v / ||v|| onto the unit sphere."""
    v = np.atleast_1d(np.asarray(v, dtype=float))
    norm = float(np.linalg.norm(v))
    if norm == 0.0:
        raise ValueError("the origin has no unique nearest point on the sphere")
    return v / norm


def _project_simplex_rows(rows: np.ndarray) -> np.ndarray:
    """Vectorized sort-and-threshold over the rows of an L x J matrix."""
    u = np.sort(rows, axis=1)[:, ::-1]
    cumsum = np.cumsum(u, axis=1)
    ks = np.arange(1, rows.shape[1] + 1)
    positive = u + (1.0 - cumsum) / ks > 0.0
    rho = positive.shape[1] - 1 - np.argmax(positive[:, ::-1], axis=1)
    tau = (cumsum[np.arange(rows.shape[0]), rho] - 1.0) / (rho + 1)
    return np.maximum(rows - tau[:, None], 0.0)


def project_point(x: np.ndarray, constraint: ConstraintSet) -> np.ndarray:
    """Dispatch a single flattened point to the projection for ``constraint``."""
    x = np.atleast_1d(np.asarray(x, dtype=float))
    if x.size != constraint.dimension():
        raise ValueError(
            f"point has dimension {x.size}, constraint expects {constraint.dimension()}"
        )
    if isinstance(constraint, Interval):
        return np.array([project_interval(float(x[0]), constraint.c, constraint.d)])
    if isinstance(constraint, Box):
        return project_box(x, constraint.lower, constraint.upper)
    if isinstance(constraint, Simplex):
        return project_simplex(x)
    if isinstance(constraint, Polytope):
        return project_polytope(x, constraint)
    if isinstance(constraint, OrderedTable):
        return project_ordered_table(x.reshape(constraint.I, constraint.J)).reshape(-1)
    if isinstance(constraint, Sphere):
        return project_sphere(x)
    if isinstance(constraint, Stiefel):
        point = _stiefel.project_stiefel(x.reshape(constraint.m, constraint.p))
        return point.matrix.reshape(-1)
    raise TypeError(f"unsupported constraint set: {type(constraint).__name__}")


def pushforward(batch: SampleBatch, constraint: ConstraintSet) -> SampleBatch:
    """Project every row of the batch; order and row count are preserved."""
    if batch.dim != constraint.dimension():
        raise ValueError(
            f"batch dimension {batch.dim} does not match constraint dimension "
            f"{constraint.dimension()}"
        )
    draws = batch.draws
    if isinstance(constraint, Interval):
        projected = np.clip(draws, constraint.c, constraint.d)
    elif isinstance(constraint, Box):
        projected = np.clip(draws, constraint.lower, constraint.upper)
    elif isinstance(constraint, Sphere):
        norms = np.linalg.norm(draws, axis=1, keepdims=True)
        if np.any(norms == 0.0):
            raise ValueError("a zero row has no unique nearest point on the sphere")
        projected = draws / norms
    elif isinstance(constraint, Simplex):
        projected = _project_simplex_rows(draws)
    elif isinstance(constraint, OrderedTable):
        projected = project_ordered_table_rows(draws, constraint)
    else:
        projected = np.vstack([project_point(row, constraint) for row in draws])
    return replace(batch, draws=projected, label=f"projected({batch.label})")


def project_ordered_table_rows(draws: np.ndarray, constraint: OrderedTable) -> np.ndarray:
    """Project many flattened tables; rows already in the cone are fixed points."""
    polytope = ordered_table_polytope(constraint)  # assemble once, not per row
    projected = np.array(draws, dtype=float, copy=True)
    for idx, row in enumerate(draws):
        if not constraint.contains(row, tol=0.0):
            projected[idx] = project_polytope(row, polytope)
    return projected


def rejection_truncate(
    batch: SampleBatch, constraint: ConstraintSet, tol: float = 0.0
) -> TruncationResult:
    """Keep the rows already feasible within ``tol``.

    Applied to independent draws from an unconstrained posterior this is
    exact rejection sampling from the corresponding truncated posterior.  An
    empty result is a warning, not an error: the acceptance rate is still
    reported.
    """
    if batch.dim != constraint.dimension():
        raise ValueError(
            f"batch dimension {batch.dim} does not match constraint dimension "
            f"{constraint.dimension()}"
        )
    keep = np.fromiter(
        (constraint.contains(row, tol=tol) for row in batch.draws),
        dtype=bool,
        count=batch.n_draws,
    )
    kept = batch.draws[keep]
    rate = kept.shape[0] / batch.n_draws
    if kept.shape[0] == 0:
        warnings.warn(
            "rejection kept no draws (acceptance rate 0); the truncated "
            "baseline is unavailable for this batch",
            RuntimeWarning,
            stacklevel=2,
        )
    return TruncationResult(draws=kept, acceptance_rate=rate, n_in=batch.n_draws)
