"""Shared test oracles.

The projection oracles here deliberately avoid the library's own QP path:
Dykstra's alternating scheme only ever projects onto single halfspaces and
hyperplanes (both closed-form), so its fixed point is an independent route
to the same nearest point.
"""

from __future__ import annotations

import math

import numpy as np
import pytest

from postproj.constraints import Polytope


def dykstra_project(
    v: np.ndarray,
    polytope: Polytope,
    iters: int = 20000,
    tol: float = 1e-14,
) -> tuple[np.ndarray, bool]:
    """Projection onto an intersection of halfspaces/hyperplanes by Dykstra.

    Returns (point, converged).  Convergence can be arbitrarily slow when
    constraint normals are nearly parallel, so callers should only trust the
    point when the flag is set.
    """
    pieces: list[tuple[str, np.ndarray, float]] = []
    if polytope.C_eq is not None:
        for row, rhs in zip(polytope.C_eq, polytope.e_eq):
            pieces.append(("hyperplane", np.asarray(row, float), float(rhs)))
    if polytope.A_ineq is not None:
        for row, rhs in zip(polytope.A_ineq, polytope.b_ineq):
            pieces.append(("halfspace", np.asarray(row, float), float(rhs)))
    x = np.asarray(v, dtype=float).copy()
    increments = [np.zeros_like(x) for _ in pieces]
    converged = False
    for _ in range(iters):
        x_prev = x.copy()
        for i, (kind, w, b) in enumerate(pieces):
            y = x + increments[i]
            resid = float(w @ y) - b
            if kind == "hyperplane" or resid < 0.0:
                x_new = y - resid / float(w @ w) * w
            else:
                x_new = y
            increments[i] = y - x_new
            x = x_new
        if float(np.linalg.norm(x - x_prev)) < tol:
            converged = True
            break
    # a stalled cycle is not a certificate: require primal feasibility too
    if converged and not polytope.contains(x, tol=1e-7):
        converged = False
    return x, converged


def enumerate_qp_oracle(G: np.ndarray, a: np.ndarray, polytope: Polytope) -> np.ndarray:
    """Exact QP oracle: grid over candidate active sets.

    Every subset of inequalities is tried as equalities alongside the real
    equality block; a candidate counts when its multipliers have the right
    sign and the point is feasible.  For a strictly convex QP the best
    candidate is the global minimizer.
    """
    from itertools import combinations

    G = np.asarray(G, float)
    a = np.asarray(a, float)
    dim = a.size
    C = polytope.C_eq if polytope.C_eq is not None else np.zeros((0, dim))
    e = polytope.e_eq if polytope.e_eq is not None else np.zeros(0)
    A = polytope.A_ineq if polytope.A_ineq is not None else np.zeros((0, dim))
    b = polytope.b_ineq if polytope.b_ineq is not None else np.zeros(0)
    m = A.shape[0]
    best, best_val = None, math.inf
    for k in range(0, m + 1):
        for subset in combinations(range(m), k):
            rows = np.vstack([C, A[list(subset)]]) if (C.size or subset) else np.zeros((0, dim))
            rhs = np.concatenate([e, b[list(subset)]])
            q = rows.shape[0]
            kkt = np.block([[G, -rows.T], [rows, np.zeros((q, q))]])
            full_rhs = np.concatenate([a, rhs])
            try:
                sol = np.linalg.solve(kkt, full_rhs)
            except np.linalg.LinAlgError:
                continue
            x = sol[:dim]
            lam_ineq = sol[dim + C.shape[0] :]
            if np.any(lam_ineq < -1e-9):
                continue
            if A.size and np.any(A @ x < b - 1e-9):
                continue
            if C.size and np.any(np.abs(C @ x - e) > 1e-9):
                continue
            val = 0.5 * x @ G @ x - a @ x
            if val < best_val:
                best, best_val = x, val
    if best is None:
        raise AssertionError("enumeration found no feasible KKT point")
    return best


def random_projection_problem(
    rng: np.random.Generator,
    dim: int,
    n_ineq: int,
    with_equality: bool = False,
) -> tuple[np.ndarray, Polytope]:
    """Random point + nonempty polytope (a hidden anchor point is feasible)."""
    anchor = rng.normal(size=dim)
    A = rng.normal(size=(n_ineq, dim))
    b = A @ anchor - np.abs(rng.normal(size=n_ineq)) - 0.05
    if with_equality:
        c_row = rng.normal(size=(1, dim))
        polytope = Polytope(A_ineq=A, b_ineq=b, C_eq=c_row, e_eq=c_row @ anchor)
    else:
        polytope = Polytope(A_ineq=A, b_ineq=b)
    v = rng.normal(size=dim) * 2.0
    return v, polytope


def ks_critical_two_sample(n1: int, n2: int, alpha: float = 0.01) -> float:
    """Asymptotic two-sample Kolmogorov-Smirnov critical value."""
    c_alpha = math.sqrt(-0.5 * math.log(alpha / 2.0))
    return c_alpha * math.sqrt((n1 + n2) / (n1 * n2))


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(20240817)
