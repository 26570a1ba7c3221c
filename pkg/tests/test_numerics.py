# tests/test_numerics.py

import numpy as np
import pytest
from numpy.testing import assert_allclose, assert_array_equal

from core.errors import ConvergenceError, InfeasibleError, InvalidInputError
from numerics.halton import halton, halton_point, halton_points, star_discrepancy_1d
from numerics.linalg import _off_norm, _rotation, eig_residual, symmetric_eig
from numerics.qp import QpProblem, kkt_residual, polish, project_feasible, residual_scale, solve_qp


def _random_symmetric(rng, n):
    a = rng.normal(size=(n, n))
    return 0.5 * (a + a.T)


class TestSymmetricEig:

    @pytest.mark.parametrize("seed", range(5))
    def test_reconstruction_and_trace(self, seed):
        a = _random_symmetric(np.random.default_rng(seed), 10)
        values, vectors = symmetric_eig(a)
        recon = vectors @ np.diag(values) @ vectors.T
        assert np.linalg.norm(recon - a) <= 1e-7
        assert abs(values.sum() - np.trace(a)) <= 1e-8
        assert_allclose(vectors.T @ vectors, np.eye(10), atol=1e-10)
        assert eig_residual(a, values, vectors) <= 1e-8

    @pytest.mark.parametrize("seed", range(40))
    def test_converges_on_random_ten_by_ten(self, seed):
        a = _random_symmetric(np.random.default_rng(seed), 10)
        values, vectors = symmetric_eig(a)
        assert np.linalg.norm(vectors @ np.diag(values) @ vectors.T - a) <= 1e-7
        assert abs(values.sum() - np.trace(a)) <= 1e-8

    def test_off_diagonal_norm_survives_large_diagonal(self):
        a = np.diag([1e8, 2e8, 3e8])
        a[0, 1] = a[1, 0] = 1e-6
        assert_allclose(_off_norm(a), np.sqrt(2.0) * 1e-6, rtol=1e-12)
        values, _ = symmetric_eig(a)
        assert_allclose(values, [3e8, 2e8, 1e8], rtol=1e-15)

    def test_rotation_of_tiny_coupling(self):
        c, s = _rotation(1.0, 2.0, 1e-200)
        assert c == 1.0
        assert_allclose(s, 1e-200, rtol=1e-12)
        c, s = _rotation(1.0, 1.0, 0.5)
        assert_allclose([c, s], [2 ** -0.5, 2 ** -0.5], rtol=1e-15)

    def test_descending_and_sign_convention(self, rng):
        values, vectors = symmetric_eig(_random_symmetric(rng, 7))
        assert np.all(np.diff(values) <= 0)
        idx = np.argmax(np.abs(vectors), axis=0)
        assert np.all(vectors[idx, np.arange(7)] > 0)

    def test_two_by_two(self):
        values, vectors = symmetric_eig([[2.0, 1.0], [1.0, 2.0]])
        assert_allclose(values, [3.0, 1.0], atol=1e-12)
        assert_allclose(np.abs(vectors[:, 0]), [2 ** -0.5, 2 ** -0.5], atol=1e-12)

    def test_diagonal_is_untouched(self):
        values, vectors = symmetric_eig(np.diag([1.0, 5.0, 3.0]))
        assert_array_equal(values, [5.0, 3.0, 1.0])
        assert_array_equal(np.abs(vectors), np.eye(3)[:, [1, 2, 0]])

    def test_matches_numpy(self, rng):
        a = _random_symmetric(rng, 12)
        values, _ = symmetric_eig(a)
        assert_allclose(values, np.sort(np.linalg.eigvalsh(a))[::-1], atol=1e-10)

    def test_rejects_asymmetric(self):
        with pytest.raises(InvalidInputError):
            symmetric_eig([[1.0, 2.0], [0.0, 1.0]])

    def test_rejects_non_square(self):
        with pytest.raises(InvalidInputError):
            symmetric_eig(np.ones((2, 3)))

    def test_sweep_budget(self, rng):
        with pytest.raises(ConvergenceError) as info:
            symmetric_eig(_random_symmetric(rng, 6), max_sweeps=0)
        assert info.value.best is not None
        assert info.value.iterations == 0


class TestQp:

    def _problem(self, rng, n, box=5.0, slack=0.2):
        a = rng.normal(size=(n, n))
        k = a @ a.T + 0.1 * np.eye(n)
        return QpProblem(k, rng.normal(size=n) * 3.0, box, slack, 1.0)

    @pytest.mark.parametrize("seed", range(6))
    def test_kkt_and_optimality_against_random_points(self, seed):
        rng = np.random.default_rng(seed)
        n = int(rng.integers(1, 6))
        problem = self._problem(rng, n)
        sol = solve_qp(problem, tol=1e-8)
        assert kkt_residual(problem, sol.weights) <= 1e-8 * residual_scale(problem)
        assert np.all(sol.weights >= 0) and np.all(sol.weights <= problem.box_upper)
        lo, hi = problem.sum_bounds()
        assert lo - 1e-9 <= sol.weights.sum() <= hi + 1e-9
        for _ in range(1000):
            point = project_feasible(problem, rng.uniform(0.0, problem.box_upper, n))
            assert sol.objective <= problem.objective(point) + 1e-6

    def test_polish_solves_an_interior_optimum_exactly(self):
        k = np.array([[2.0, 0.5], [0.5, 1.0]])
        c = k @ np.array([1.2, 0.9])
        problem = QpProblem(k, c, 10.0, 0.5, 1.0)
        z = polish(problem, np.array([1.0, 1.0]))
        assert_allclose(z, [1.2, 0.9], atol=1e-12)
        assert kkt_residual(problem, z) <= 1e-12

    def test_polish_keeps_the_sum_on_its_bound(self):
        problem = QpProblem(np.eye(3), np.array([4.0, 4.0, 1.0]), 10.0, 0.0, 1.0)
        z = polish(problem, np.array([1.5, 1.0, 0.5]))
        assert_allclose(z, [1.5, 1.5, 0.0], atol=1e-12)
        assert kkt_residual(problem, z) <= 1e-12

    def test_singular_quadratic_converges(self):
        k = np.ones((4, 4))
        problem = QpProblem(k, np.full(4, 2.0), 5.0, 0.5, 1.0)
        sol = solve_qp(problem, tol=1e-10)
        assert_allclose(sol.weights.sum(), 2.0, atol=1e-9)

    def test_projection_lands_in_feasible_set(self, rng):
        problem = self._problem(rng, 5, box=2.0, slack=0.0)
        x = project_feasible(problem, rng.normal(size=5) * 10)
        assert np.all(x >= 0) and np.all(x <= 2.0)
        assert_allclose(x.sum(), 5.0, atol=1e-9)

    def test_projection_keeps_feasible_points(self):
        problem = QpProblem(np.eye(3), np.zeros(3), 10.0, 0.5, 1.0)
        v = np.array([1.0, 0.8, 1.2])
        assert_array_equal(project_feasible(problem, v), v)

    def test_infeasible_sum(self):
        problem = QpProblem(np.eye(2), np.zeros(2), 1.0, 0.0, 5.0)
        with pytest.raises(InfeasibleError):
            solve_qp(problem)

    def test_budget_exhausted_keeps_best(self, rng):
        problem = self._problem(rng, 5)
        with pytest.raises(ConvergenceError) as info:
            solve_qp(problem, tol=1e-14, max_iter=0)
        assert info.value.best.shape == (5,)

    def test_invalid_problem(self):
        with pytest.raises(InvalidInputError):
            QpProblem(np.eye(2), np.zeros(3), 1.0, 0.0)
        with pytest.raises(InvalidInputError):
            QpProblem(np.eye(2), np.zeros(2), 0.0, 0.0)
        with pytest.raises(InvalidInputError):
            QpProblem(np.eye(2), np.zeros(2), 1.0, -0.1)


class TestHalton:

    def test_exact_values(self):
        assert halton(1, 2) == 0.5
        assert halton(2, 2) == 0.25
        assert halton(3, 2) == 0.75
        assert halton(4, 2) == 0.125
        assert halton(1, 3) == 1 / 3
        assert halton(5, 3) == 7 / 9

    def test_point_uses_consecutive_primes(self):
        assert_array_equal(halton_point(1, 3), [0.5, 1 / 3, 0.2])

    def test_points_rows(self):
        pts = halton_points(4, 2, start=1)
        assert pts.shape == (4, 2)
        assert_array_equal(pts[:, 0], [0.5, 0.25, 0.75, 0.125])

    def test_invalid(self):
        with pytest.raises(InvalidInputError):
            halton(0, 2)
        with pytest.raises(InvalidInputError):
            halton(1, 4)
        with pytest.raises(InvalidInputError):
            halton_point(1, 26)

    def test_low_discrepancy(self):
        seq = [halton(i, 2) for i in range(1, 257)]
        assert star_discrepancy_1d(seq) < 0.05
