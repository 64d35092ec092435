"""Strictly convex quadratic programming by the dual active-set method.

Solves ``min 0.5 x'Gx - a'x`` subject to ``C_eq x = e_eq`` and
``A_ineq x >= b_ineq`` for symmetric positive-definite G.  The solver starts
from the unconstrained minimizer (dual feasible, primal infeasible), then
repeatedly picks the most violated constraint and takes the textbook mix of
full steps (constraint enters the active set) and partial dual steps
(an active inequality whose multiplier would turn negative leaves).  The
objective value is nondecreasing along the iterates, which doubles as a
cheap sanity trace.

Constraints are indexed with equalities first, then inequalities, in the
order given.  Equalities participate in selection with either violation
sign and are never dropped.  Ties in violation go to the lowest index so
runs are reproducible.  Factorizations are recomputed per step; at the
dimensions this package targets (a few hundred at most) that is cheaper to
maintain and verify than rank-one updates, and the interface does not
expose the choice.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy import linalg as sla

from .errors import ConvergenceError

__all__ = ["QPProblem", "QPSolution", "KKTResiduals", "solve_qp", "kkt_residuals"]


@dataclass(frozen=True)
class QPProblem:
    """Data of ``min 0.5 x'Gx - a'x`` with optional equality/inequality blocks."""

    G: np.ndarray
    a: np.ndarray
    C_eq: np.ndarray | None = None
    e_eq: np.ndarray | None = None
    A_ineq: np.ndarray | None = None
    b_ineq: np.ndarray | None = None

    def __post_init__(self):
        G = np.atleast_2d(np.asarray(self.G, dtype=float))
        a = np.atleast_1d(np.asarray(self.a, dtype=float))
        if G.shape[0] != G.shape[1]:
            raise ValueError(f"G must be square, got {G.shape}")
        if a.size != G.shape[0]:
            raise ValueError(f"a has length {a.size}, G is {G.shape[0]}x{G.shape[0]}")
        if not np.allclose(G, G.T, rtol=1e-12, atol=1e-12):
            raise ValueError("G must be symmetric within 1e-12")
        object.__setattr__(self, "G", G)
        object.__setattr__(self, "a", a)
        for mat_name, vec_name in (("C_eq", "e_eq"), ("A_ineq", "b_ineq")):
            mat, vec = getattr(self, mat_name), getattr(self, vec_name)
            if (mat is None) != (vec is None):
                raise ValueError(f"{mat_name} and {vec_name} must be supplied together")
            if mat is None:
                continue
            mat = np.atleast_2d(np.asarray(mat, dtype=float))
            vec = np.atleast_1d(np.asarray(vec, dtype=float))
            if mat.shape != (vec.size, a.size):
                raise ValueError(f"{mat_name} must be {vec.size}x{a.size}, got {mat.shape}")
            object.__setattr__(self, mat_name, mat)
            object.__setattr__(self, vec_name, vec)

    @property
    def n_eq(self) -> int:
        return 0 if self.e_eq is None else self.e_eq.size

    @property
    def n_ineq(self) -> int:
        return 0 if self.b_ineq is None else self.b_ineq.size

    def objective(self, x: np.ndarray) -> float:
        x = np.asarray(x, dtype=float)
        return float(0.5 * x @ self.G @ x - self.a @ x)


@dataclass
class QPSolution:
    """Solver output; ``multipliers`` is aligned with the stacked constraint order."""

    x: np.ndarray
    status: str  # "optimal" | "infeasible"
    active_set: list[int] = field(default_factory=list)
    multipliers: np.ndarray | None = None
    iterations: int = 0
    degeneracy_count: int = 0
    objective_trace: list[float] | None = None


@dataclass(frozen=True)
class KKTResiduals:
    stationarity: float
    primal: float
    complementarity: float

    def max(self) -> float:
        return max(self.stationarity, self.primal, self.complementarity)


def _stacked(problem: QPProblem) -> tuple[np.ndarray, np.ndarray, int]:
    n = problem.a.size
    blocks, rhs = [], []
    if problem.C_eq is not None:
        blocks.append(problem.C_eq)
        rhs.append(problem.e_eq)
    if problem.A_ineq is not None:
        blocks.append(problem.A_ineq)
        rhs.append(problem.b_ineq)
    if blocks:
        return np.vstack(blocks), np.concatenate(rhs), problem.n_eq
    return np.zeros((0, n)), np.zeros(0), 0


def solve_qp(
    problem: QPProblem,
    tol: float = 1e-10,
    max_iter: int | None = None,
    trace: bool = False,
) -> QPSolution:
    """Run the dual active-set schedule on ``problem``.

    Returns status "optimal" with a KKT-clean x, or "infeasible" when a
    violated constraint admits no primal direction and no droppable blocker
    (the dual step is unbounded).  Exceeding the iteration budget or failing
    the final residual check raises ConvergenceError.
    """
    G, a = problem.G, problem.a
    n = a.size
    N, rhs, n_eq = _stacked(problem)
    m = N.shape[0]
    if max_iter is None:
        max_iter = 100 * (m + n)

    identity_g = bool(np.array_equal(G, np.eye(n)))
    if identity_g:
        solve_g = lambda v: v  # noqa: E731 - trivial identity solve
    else:
        try:
            cho = sla.cho_factor(G, check_finite=False)
        except np.linalg.LinAlgError as exc:
            raise ValueError("G is not positive definite (Cholesky failed)") from exc
        solve_g = lambda v: sla.cho_solve(cho, v, check_finite=False)  # noqa: E731

    x = solve_g(a.copy())
    obj_trace: list[float] | None = [problem.objective(x)] if trace else None

    active: list[int] = []
    signs: list[float] = []
    lam: list[float] = []
    iterations = 0
    degeneracy = 0

    feas_scale = max(1.0, float(np.max(np.abs(rhs))) if m else 1.0)
    feas_tol = tol * feas_scale

    is_eq = np.arange(m) < n_eq

    while True:
        slack = N @ x - rhs if m else np.zeros(0)
        viol = np.where(is_eq, np.abs(slack), np.maximum(0.0, -slack))
        if active:
            viol[active] = 0.0
        if m == 0 or float(viol.max()) <= feas_tol:
            break
        p = int(np.argmax(viol))  # first max -> lowest index on ties
        sgn = 1.0 if (p >= n_eq or slack[p] < 0.0) else -1.0
        eta = sgn * N[p]
        bp = sgn * rhs[p]
        g_eta = solve_g(eta)
        lam_p = 0.0

        while True:
            iterations += 1
            if iterations > max_iter:
                res = kkt_residuals(problem, QPSolution(x=x, status="optimal", active_set=list(active), multipliers=_full_multipliers(m, active, signs, lam)))
                raise ConvergenceError(
                    f"iteration budget {max_iter} exhausted; residuals "
                    f"stationarity={res.stationarity:.3e} primal={res.primal:.3e} "
                    f"complementarity={res.complementarity:.3e}"
                )
            if active:
                Na = np.asarray(signs)[:, None] * N[active]
                GiNa = solve_g(Na.T)  # n x q
                B = Na @ GiNa
                try:
                    r_vec = np.linalg.solve(B, Na @ g_eta)
                except np.linalg.LinAlgError:
                    # active normals degenerated; treat as dependent direction
                    r_vec = np.linalg.lstsq(B, Na @ g_eta, rcond=None)[0]
                z = g_eta - GiNa @ r_vec
            else:
                r_vec = np.zeros(0)
                z = g_eta

            denom = float(eta @ z)
            if denom > 1e-12 * max(1.0, float(eta @ eta)):
                t_full = -(float(eta @ x) - bp) / denom
            else:
                t_full = math.inf
                degeneracy += 1  # dependent on active set: refuse to add yet

            t_dual = math.inf
            j_drop = -1
            for j, k in enumerate(active):
                if k >= n_eq and r_vec[j] > 1e-14:
                    step = lam[j] / r_vec[j]
                    if step < t_dual:
                        t_dual = step
                        j_drop = j
            if math.isinf(t_full) and math.isinf(t_dual):
                return QPSolution(
                    x=x,
                    status="infeasible",
                    active_set=list(active),
                    multipliers=None,
                    iterations=iterations,
                    degeneracy_count=degeneracy,
                    objective_trace=obj_trace,
                )
            t = min(t_full, t_dual)
            if not math.isinf(t_full):
                x = x + t * z
            for j in range(len(lam)):
                lam[j] -= t * r_vec[j]
            lam_p += t
            if obj_trace is not None:
                obj_trace.append(problem.objective(x))
            if t_full <= t_dual:
                active.append(p)
                signs.append(sgn)
                lam.append(lam_p)
                break
            del active[j_drop], signs[j_drop], lam[j_drop]

    multipliers = _full_multipliers(m, active, signs, lam)
    solution = QPSolution(
        x=x,
        status="optimal",
        active_set=sorted(active),
        multipliers=multipliers,
        iterations=iterations,
        degeneracy_count=degeneracy,
        objective_trace=obj_trace,
    )
    res = kkt_residuals(problem, solution)
    scale = max(1.0, float(np.max(np.abs(a))), float(np.max(np.abs(G @ x))))
    if res.max() > max(tol * scale, 1e3 * np.finfo(float).eps * scale):
        raise ConvergenceError(
            f"KKT residuals above tolerance on exit: stationarity={res.stationarity:.3e} "
            f"primal={res.primal:.3e} complementarity={res.complementarity:.3e}"
        )
    return solution


def _full_multipliers(m: int, active: list[int], signs: list[float], lam: list[float]) -> np.ndarray:
    mult = np.zeros(m)
    for k, s, l in zip(active, signs, lam):
        mult[k] = s * l
    return mult


def kkt_residuals(problem: QPProblem, solution: QPSolution) -> KKTResiduals:
    """Max-norm residuals of the stationarity / primal / complementarity blocks."""
    if solution.status != "optimal":
        raise ValueError(f"KKT residuals require an optimal solution, got status {solution.status!r}")
    x = np.asarray(solution.x, dtype=float)
    N, rhs, n_eq = _stacked(problem)
    mult = solution.multipliers if solution.multipliers is not None else np.zeros(N.shape[0])

    grad = problem.G @ x - problem.a
    if N.shape[0]:
        grad = grad - N.T @ mult
    stationarity = float(np.max(np.abs(grad))) if grad.size else 0.0

    primal = 0.0
    comp = 0.0
    if N.shape[0]:
        slack = N @ x - rhs
        if n_eq:
            primal = max(primal, float(np.max(np.abs(slack[:n_eq]))))
        if N.shape[0] > n_eq:
            ineq_slack = slack[n_eq:]
            primal = max(primal, float(np.max(np.maximum(0.0, -ineq_slack))))
            comp = float(np.max(np.abs(mult[n_eq:] * ineq_slack)))
    return KKTResiduals(stationarity=stationarity, primal=primal, complementarity=comp)
