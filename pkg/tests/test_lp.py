import numpy as np
import pytest

from sectrade.errors import InfeasibleProblem, SizeCapError, UnboundedProblem
from sectrade.lp import (build_strong_primal, build_weak_primal,
                         simplex_solve, strong_dual_certificate,
                         verify_dual_feasibility, weak_dual_certificate)
from sectrade.simplex import simplex_solve_arrays

W1, W2 = 0.970659, 0.029341


class TestSimplexCore:
    def test_tiny_max(self):
        # max x + y st x + y <= 1, x <= 0.6
        res = simplex_solve_arrays([1, 1], [[1, 1], [1, 0]], [1, 0.6],
                                   ["<=", "<="])
        assert abs(res.objective - 1.0) < 1e-12

    def test_equality_and_geq(self):
        # min 2x + 3y st x + y = 4, x >= 1: x is cheaper, so x = 4, y = 0
        res = simplex_solve_arrays([2, 3], [[1, 1], [1, 0]], [4, 1],
                                   ["==", ">="], sense="min")
        assert abs(res.objective - 8.0) < 1e-9
        assert np.allclose(res.values, [4, 0])

    def test_infeasible(self):
        with pytest.raises(InfeasibleProblem):
            simplex_solve_arrays([1], [[1], [-1]], [1, -2], ["<=", "<="])

    def test_unbounded(self):
        with pytest.raises(UnboundedProblem):
            simplex_solve_arrays([1], [[-1]], [1], ["<="])

    def test_bland_pricing_agrees(self):
        lp = build_strong_primal(6)
        a = simplex_solve(lp, pricing="dantzig").objective_value
        b = simplex_solve(lp, pricing="bland").objective_value
        assert abs(a - b) < 1e-9

    @pytest.mark.parametrize("n", [3, 5, 8])
    def test_matches_scipy_on_both_primals(self, n):
        linprog = pytest.importorskip("scipy.optimize").linprog
        for builder in (build_strong_primal, build_weak_primal):
            lp = builder(n)
            c, A, b, rels = lp.to_arrays()
            ref = linprog(-c, A_ub=A, b_ub=b, bounds=(0, None), method="highs")
            mine = simplex_solve(lp)
            assert abs(mine.objective_value + ref.fun) < 1e-8
            assert mine.max_violation(lp) < 1e-9


class TestStrongPrimal:
    def test_n1_structure(self):
        lp = build_strong_primal(1)
        assert lp.variables == ("x_1_1",)
        assert lp.objective["x_1_1"] == 0.5
        assert lp.constraints[0] == ({"x_1_1": 1.0}, "<=", 1.0)
        sol = simplex_solve(lp)
        assert abs(sol.objective_value - 0.5) < 1e-12
        assert abs(sol.x[(1, 1)] - 1.0) < 1e-12

    @pytest.mark.parametrize("n", [1, 2, 5, 9])
    def test_counts(self, n):
        lp = build_strong_primal(n)
        assert lp.n_variables() == n * (n + 1) // 2
        assert lp.n_constraints() == n * (n + 1) // 2

    def test_size_cap(self):
        with pytest.raises(SizeCapError):
            build_strong_primal(61)

    def test_decomposes_by_seller_position(self):
        # constraints couple only within fixed i, so per-i solves add up
        n = 7
        joint = simplex_solve(build_strong_primal(n)).objective_value
        total = 0.0
        for i in range(1, n + 1):
            js = list(range(i, n + 1))
            c = np.array([j / (n * (n + 1)) for j in js])
            A = np.zeros((len(js), len(js)))
            for row, j in enumerate(js):
                A[row, :row] = 1.0
                A[row, row] = j
            res = simplex_solve_arrays(c, A, np.ones(len(js)),
                                       ["<="] * len(js))
            total += res.objective
        assert abs(joint - total) < 1e-9


class TestWeakPrimal:
    def test_n1_optimum(self):
        sol = simplex_solve(build_weak_primal(1))
        assert abs(sol.objective_value - 0.75) < 1e-9
        assert abs(sol.A - 0.75) < 1e-9

    @pytest.mark.parametrize("n", [1, 3, 6])
    def test_counts(self, n):
        lp = build_weak_primal(n)
        assert lp.n_variables() == n * (n + 1) + 1
        assert lp.n_constraints() == n * (n + 1) + 2

    def test_discrete_threshold_policy_is_feasible(self):
        # stopping rule "pass the first r-1 buyers, then take the first
        # best-so-far": x_{i,j} = (m-1)/((j-1) j) with m = max(i, r), which
        # saturates the stopping constraint with equality; with y = 0 and
        # A = min(2 p1, 1.5 (p1 + p2)) the whole vector is feasible
        n, r = 8, 3
        lp = build_weak_primal(n)
        x = {}
        for i in range(1, n + 1):
            m = max(i, r)
            for j in range(i, n + 1):
                if j == m == i:
                    x[(i, j)] = 1.0 / j
                elif j >= m:
                    x[(i, j)] = (m - 1) / ((j - 1) * j)
        p1 = sum(j / (n * (n + 1)) * v for (i, j), v in x.items())
        p2 = sum(j * (n - j) / (n * n) / (n + 1) * v for (i, j), v in x.items())
        A = min(2 * p1, 1.5 * (p1 + p2))
        from sectrade.lp import PrimalSolution
        sol = PrimalSolution(x=x, y={}, A=A, objective_value=A)
        assert sol.max_violation(lp) < 1e-12


class TestStrongCertificate:
    def test_last_coefficient_is_empty_sum(self):
        for n in (2, 5, 17):
            cert = strong_dual_certificate(n)
            assert abs(cert.a[-1] - 1.0 / (n * (n + 1))) < 1e-15

    def test_nonnegative_from_j_star(self):
        for n in (10, 100, 1000):
            cert = strong_dual_certificate(n)
            assert np.all(cert.a[cert.j_star - 1:] >= 0)

    def test_feasible_at_scale(self):
        for n in (100, 10 ** 4, 10 ** 6):
            cert = strong_dual_certificate(n)
            assert cert.min_residual >= -1e-12

    def test_objective_descends_toward_limit(self):
        target = 0.283834
        objs = [strong_dual_certificate(10 ** k).objective for k in (3, 4, 5, 6)]
        gaps = [abs(o - target) for o in objs]
        assert all(a > b for a, b in zip(gaps, gaps[1:]))
        assert gaps[-1] < 1.1e-3

    def test_corrupted_certificate_flagged(self):
        cert = strong_dual_certificate(100)
        cert.y_pos[40] += 1.0  # break a suffix: earlier rows now over-count
        cert.y_pos[41:] -= 0.02
        report = verify_dual_feasibility(cert)
        assert report.min_residual < -1e-6


class TestWeakCertificate:
    def test_headline_objective(self):
        cert = weak_dual_certificate(2_000_000, W1, W2)
        assert abs(cert.objective - 0.567411) < 5e-4
        assert cert.min_residual_u >= -1e-12
        assert cert.min_residual_v >= -1e-12
        assert abs(1.0 / cert.objective - 1.76239) < 2e-3

    def test_feasible_across_sizes(self):
        for n in (10 ** 3, 10 ** 5):
            cert = weak_dual_certificate(n, W1, W2)
            assert cert.min_residual_u >= -1e-12
            assert cert.min_residual_v >= -1e-12

    def test_u_constraint_tight_where_alpha_positive(self):
        cert = weak_dual_certificate(5000, W1, W2)
        n = cert.n
        combined = cert.alpha + cert.beta
        suffix = np.zeros(n)
        suffix[:-1] = np.cumsum(combined[:0:-1])[::-1]
        j = np.arange(1.0, n + 1.0)
        denom = n * n + n
        ru = 2 * j / denom * W1 + 3 * j * (2 * n - j) / (2 * n * denom) * W2
        res_u = j * cert.alpha + suffix - ru
        tight = res_u[cert.alpha > 0]
        assert np.max(np.abs(tight)) < 1e-15

    def test_zero_w2_kills_beta(self):
        cert = weak_dual_certificate(1000, 1.0, 0.0)
        assert np.all(cert.beta == 0.0)

    def test_break_points_ordered(self):
        cert = weak_dual_certificate(10 ** 4, W1, W2)
        assert 1 <= cert.j_double_star <= cert.j_star <= cert.n

    def test_invalid_weights(self):
        with pytest.raises(ValueError):
            weak_dual_certificate(100, 0.7, 0.2)
        with pytest.raises(ValueError):
            weak_dual_certificate(100, -0.5, 1.5)

    def test_csv_dump_capped(self, tmp_path):
        cert = weak_dual_certificate(50, W1, W2)
        path = tmp_path / "cert.csv"
        cert.to_csv(path)
        assert len(path.read_text().strip().splitlines()) == 51
        big = weak_dual_certificate(20_000, W1, W2)
        with pytest.raises(SizeCapError):
            big.to_csv(tmp_path / "big.csv")


class TestWeakDuality:
    @pytest.mark.parametrize("n", [2, 5, 11, 17])
    def test_strong_sandwich(self, n):
        primal = simplex_solve(build_strong_primal(n)).objective_value
        dual = strong_dual_certificate(n).objective
        assert primal <= dual + 1e-9

    @pytest.mark.parametrize("n", [2, 5, 11])
    def test_weak_sandwich(self, n):
        primal = simplex_solve(build_weak_primal(n)).objective_value
        dual = weak_dual_certificate(n, W1, W2).objective
        assert primal <= dual + 1e-9
