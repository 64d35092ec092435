import numpy as np
import pytest

from postproj import ConvergenceError, KKTResiduals, QPProblem, QPSolution, kkt_residuals, solve_qp

from conftest import dykstra_project, enumerate_qp_oracle, random_projection_problem


def _projection_problem(v, polytope):
    return QPProblem(
        G=np.eye(len(v)),
        a=np.asarray(v, float),
        C_eq=polytope.C_eq,
        e_eq=polytope.e_eq,
        A_ineq=polytope.A_ineq,
        b_ineq=polytope.b_ineq,
    )


class TestSolveQpExamples:
    def test_orthant_projection(self):
        problem = QPProblem(G=np.eye(2), a=[1.0, -1.0], A_ineq=np.eye(2), b_ineq=np.zeros(2))
        sol = solve_qp(problem)
        assert sol.status == "optimal"
        np.testing.assert_allclose(sol.x, [1.0, 0.0], atol=1e-12)
        assert sol.active_set == [1]  # only x2 >= 0 binds

    def test_simplex_projection(self):
        problem = QPProblem(
            G=np.eye(2), a=[0.6, 0.6],
            C_eq=[[1.0, 1.0]], e_eq=[1.0],
            A_ineq=np.eye(2), b_ineq=np.zeros(2),
        )
        sol = solve_qp(problem)
        np.testing.assert_allclose(sol.x, [0.5, 0.5], atol=1e-12)

    def test_contradictory_constraints(self):
        problem = QPProblem(
            G=np.eye(2), a=[0.0, 0.0],
            A_ineq=[[1.0, 0.0], [-1.0, 0.0]], b_ineq=[1.0, 0.0],
        )
        sol = solve_qp(problem)
        assert sol.status == "infeasible"
        assert sol.multipliers is None
        # the second constraint is parallel to the first: a degenerate add
        assert sol.degeneracy_count >= 1

    def test_unconstrained(self):
        problem = QPProblem(G=2.0 * np.eye(2), a=[2.0, 4.0])
        sol = solve_qp(problem)
        np.testing.assert_allclose(sol.x, [1.0, 2.0], atol=1e-12)
        assert sol.iterations == 0

    def test_non_pd_raises(self):
        with pytest.raises(ValueError):
            solve_qp(QPProblem(G=np.diag([1.0, -1.0]), a=[0.0, 0.0]))

    def test_asymmetric_raises(self):
        with pytest.raises(ValueError):
            QPProblem(G=np.array([[1.0, 0.5], [0.0, 1.0]]), a=[0.0, 0.0])

    def test_budget_exhaustion(self):
        problem = QPProblem(
            G=np.eye(3), a=[5.0, -3.0, 2.0],
            A_ineq=-np.eye(3), b_ineq=-np.ones(3) * 0.1,
        )
        with pytest.raises(ConvergenceError):
            solve_qp(problem, max_iter=1)


class TestKKTResiduals:
    def test_exact_solution_zero_residuals(self):
        problem = QPProblem(G=np.eye(2), a=[1.0, -1.0], A_ineq=np.eye(2), b_ineq=np.zeros(2))
        sol = solve_qp(problem)
        res = kkt_residuals(problem, sol)
        assert res.stationarity <= 1e-12
        assert res.primal <= 1e-12
        assert res.complementarity <= 1e-12

    def test_perturbed_coordinate(self):
        problem = QPProblem(G=np.eye(2), a=[1.0, -1.0], A_ineq=np.eye(2), b_ineq=np.zeros(2))
        sol = solve_qp(problem)
        bumped = QPSolution(
            x=sol.x + np.array([1e-3, 0.0]),
            status="optimal",
            active_set=sol.active_set,
            multipliers=sol.multipliers,
        )
        res = kkt_residuals(problem, bumped)
        assert res.stationarity == pytest.approx(1e-3, rel=1e-9)

    def test_violation_shows_in_primal_block(self):
        problem = QPProblem(G=np.eye(2), a=[0.0, 0.0], A_ineq=np.eye(2), b_ineq=np.zeros(2))
        bad = QPSolution(
            x=np.array([-0.25, 0.0]),
            status="optimal",
            active_set=[],
            multipliers=np.zeros(2),
        )
        res = kkt_residuals(problem, bad)
        assert res.primal == pytest.approx(0.25)

    def test_requires_optimal_status(self):
        problem = QPProblem(G=np.eye(1), a=[0.0])
        with pytest.raises(ValueError):
            kkt_residuals(problem, QPSolution(x=np.zeros(1), status="infeasible"))


class TestSolveQpProperties:
    def test_oracle_equivalence_small_problems(self, rng):
        for k in range(60):
            dim = int(rng.integers(2, 5))
            n_ineq = int(rng.integers(1, 7))
            v, poly = random_projection_problem(rng, dim, n_ineq, with_equality=bool(k % 3 == 0))
            sol = solve_qp(_projection_problem(v, poly))
            assert sol.status == "optimal"
            oracle = enumerate_qp_oracle(np.eye(dim), v, poly)
            assert np.linalg.norm(sol.x - oracle) <= 1e-4
            res = kkt_residuals(_projection_problem(v, poly), sol)
            assert res.max() <= 1e-8
            # the alternating-projection route agrees whenever it converges
            dyk, ok = dykstra_project(v, poly)
            if ok:
                assert np.linalg.norm(sol.x - dyk) <= 1e-4

    def test_objective_monotone_along_iterates(self, rng):
        for _ in range(40):
            v, poly = random_projection_problem(rng, 3, 6)
            sol = solve_qp(_projection_problem(v, poly), trace=True)
            trace = np.asarray(sol.objective_trace)
            assert np.all(np.diff(trace) >= -1e-12)

    def test_determinism(self, rng):
        v, poly = random_projection_problem(rng, 4, 6)
        problem = _projection_problem(v, poly)
        first = solve_qp(problem)
        second = solve_qp(problem)
        assert first.active_set == second.active_set
        np.testing.assert_array_equal(first.x, second.x)
        np.testing.assert_array_equal(first.multipliers, second.multipliers)
        assert first.iterations == second.iterations

    def test_scale_consistency(self, rng):
        v, poly = random_projection_problem(rng, 3, 5)
        base = solve_qp(_projection_problem(v, poly)).x
        for s in (1e-3, 7.0, 1e4):
            scaled = QPProblem(
                G=s * np.eye(3),
                a=s * np.asarray(v, float),
                A_ineq=poly.A_ineq,
                b_ineq=poly.b_ineq,
            )
            np.testing.assert_allclose(solve_qp(scaled).x, base, atol=1e-9)

    def test_general_pd_quadratic_term(self, rng):
        # non-identity G against the brute KKT enumeration oracle
        from postproj.constraints import Polytope

        for _ in range(20):
            dim = 3
            L = rng.normal(size=(dim, dim))
            G = L @ L.T + dim * np.eye(dim)
            a = rng.normal(size=dim)
            anchor = rng.normal(size=dim)
            A = rng.normal(size=(3, dim))
            b = A @ anchor - np.abs(rng.normal(size=3))
            problem = QPProblem(G=G, a=a, A_ineq=A, b_ineq=b)
            sol = solve_qp(problem)
            assert sol.status == "optimal"
            best = enumerate_qp_oracle(G, a, Polytope(A_ineq=A, b_ineq=b))
            np.testing.assert_allclose(sol.x, best, atol=1e-8)

    def test_inactive_multipliers_zero_and_nonnegative(self, rng):
        for _ in range(30):
            v, poly = random_projection_problem(rng, 3, 6)
            problem = _projection_problem(v, poly)
            sol = solve_qp(problem)
            slack = poly.A_ineq @ sol.x - poly.b_ineq
            assert np.all(sol.multipliers >= -1e-12)
            inactive = slack > 1e-8
            assert np.all(np.abs(sol.multipliers[inactive]) <= 1e-12)
