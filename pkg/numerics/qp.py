# numerics/qp.py

"""
Box- and sum-constrained convex quadratic programming by spectral projected
gradient:

    minimize    1/2 b^T K b - c^T b
    subject to  0 <= b_i <= B,   |mean(b) - sum_target| <= eps

The projection onto the feasible set clips to the box after a shift found by
bisection on the Lagrange multiplier of the sum constraint.
"""

import logging
from collections import deque
from dataclasses import dataclass

import numpy as np

from core.config import config
from core.errors import ConvergenceError, InfeasibleError, InvalidInputError
from numerics.linalg import as_matrix, as_vector, check_symmetric

logger = logging.getLogger(__name__)

_STEP_MIN = 1e-12
_STEP_MAX = 1e12
_MEMORY = 10
_ARMIJO = 1e-4
_POLISH_EVERY = 25


@dataclass(frozen=True)
class QpProblem:
    quadratic: np.ndarray
    linear: np.ndarray
    box_upper: float
    sum_slack: float
    sum_target: float = 1.0

    def __post_init__(self):
        k = as_matrix(self.quadratic, "quadratic")
        c = as_vector(self.linear, "linear")
        check_symmetric(k, name="quadratic")
        if k.shape[0] != c.shape[0]:
            raise InvalidInputError(
                f"quadratic is {k.shape[0]}x{k.shape[0]} but linear has length {c.shape[0]}"
            )
        if not self.box_upper > 0:
            raise InvalidInputError(f"box_upper must be > 0, got {self.box_upper}")
        if not self.sum_slack >= 0:
            raise InvalidInputError(f"sum_slack must be >= 0, got {self.sum_slack}")
        object.__setattr__(self, "quadratic", k)
        object.__setattr__(self, "linear", c)

    @property
    def size(self) -> int:
        return self.linear.shape[0]

    def sum_bounds(self):
        """Bounds on sum(b) implied by the mean constraint."""
        n = self.size
        return n * (self.sum_target - self.sum_slack), n * (self.sum_target + self.sum_slack)

    def objective(self, b: np.ndarray) -> float:
        return float(0.5 * b @ (self.quadratic @ b) - self.linear @ b)


@dataclass(frozen=True)
class QpSolution:
    weights: np.ndarray
    objective: float
    residual: float
    iterations: int


def project_feasible(problem: QpProblem, v: np.ndarray) -> np.ndarray:
    """Euclidean projection of v onto the box/sum feasible set."""
    ub = problem.box_upper
    lo, hi = problem.sum_bounds()
    x = np.clip(v, 0.0, ub)
    s = float(x.sum())
    if lo <= s <= hi:
        return x
    target = hi if s > hi else lo

    # sum(clip(v - lam)) is non-increasing in lam
    lam_lo = float(np.min(v)) - ub
    lam_hi = float(np.max(v))
    for _ in range(200):
        lam = 0.5 * (lam_lo + lam_hi)
        if float(np.clip(v - lam, 0.0, ub).sum()) > target:
            lam_lo = lam
        else:
            lam_hi = lam
        if lam_hi - lam_lo <= 1e-15 * max(1.0, abs(lam)):
            break
    return np.clip(v - 0.5 * (lam_lo + lam_hi), 0.0, ub)


def kkt_residual(problem: QpProblem, b: np.ndarray) -> float:
    """Projected-gradient stationarity measure ||P(b - grad) - b||_inf."""
    g = problem.quadratic @ b - problem.linear
    return _residual(problem, b, g)


def _residual(problem: QpProblem, x: np.ndarray, g: np.ndarray) -> float:
    return float(np.max(np.abs(project_feasible(problem, x - g) - x))) if x.size else 0.0


def residual_scale(problem: QpProblem) -> float:
    """Convergence is declared at residual <= tol * residual_scale."""
    return max(1.0, float(np.max(np.abs(problem.linear)))) if problem.size else 1.0


def _check_feasible(problem: QpProblem) -> None:
    lo, hi = problem.sum_bounds()
    if max(lo, 0.0) > min(hi, problem.size * problem.box_upper):
        raise InfeasibleError(
            f"no b in [0, {problem.box_upper}]^{problem.size} has mean within "
            f"{problem.sum_slack} of {problem.sum_target}"
        )


def polish(problem: QpProblem, x: np.ndarray) -> np.ndarray:
    """
    Exact minimiser on the face suggested by x: bounds hit by x stay fixed,
    the sum constraint is kept as an equality when x sits on it, and the
    remaining coordinates solve the reduced KKT system (least squares when
    the reduced matrix is singular). The result is projected back onto the
    feasible set.
    """
    k, c, ub = problem.quadratic, problem.linear, problem.box_upper
    lo, hi = problem.sum_bounds()
    edge = 1e-9 * max(1.0, ub)
    at_upper = x >= ub - edge
    free = (x > edge) & ~at_upper
    fixed = np.where(at_upper, ub, 0.0)
    m = int(free.sum())
    if m == 0:
        return project_feasible(problem, fixed)

    rhs = c[free] - k[np.ix_(free, ~free)] @ fixed[~free]
    k_ff = k[np.ix_(free, free)]
    s = float(x.sum())
    sum_edge = 1e-9 * max(1.0, abs(hi))
    if lo + sum_edge < s < hi - sum_edge:
        z_free = np.linalg.lstsq(k_ff, rhs, rcond=None)[0]
    else:
        total = lo if abs(s - lo) <= abs(s - hi) else hi
        system = np.zeros((m + 1, m + 1))
        system[:m, :m] = k_ff
        system[:m, m] = 1.0
        system[m, :m] = 1.0
        z_free = np.linalg.lstsq(
            system, np.append(rhs, total - fixed.sum()), rcond=None
        )[0][:m]
    z = fixed
    z[free] = z_free
    return project_feasible(problem, z)


def solve_qp(problem: QpProblem, tol: float = None, max_iter: int = None) -> QpSolution:
    """
    Spectral projected gradient with a non-monotone (max of the last
    _MEMORY objectives) Armijo test and Barzilai-Borwein steps. Every
    _POLISH_EVERY iterations the iterate's face is solved exactly by
    polish(); the polished point is kept when its residual is lower.

    Stops at kkt residual <= tol * residual_scale(problem).
    """
    tol = config.numerics.qp_tol if tol is None else tol
    max_iter = config.numerics.qp_max_iter if max_iter is None else max_iter
    if not tol > 0:
        raise InvalidInputError(f"tol must be > 0, got {tol}")
    _check_feasible(problem)

    k, c = problem.quadratic, problem.linear
    stop = tol * residual_scale(problem)
    x = project_feasible(problem, np.full(problem.size, problem.sum_target))
    g = k @ x - c
    step = 1.0
    history = deque([problem.objective(x)], maxlen=_MEMORY)
    best_x, best_res = x, np.inf

    for it in range(max_iter + 1):
        res = _residual(problem, x, g)
        if it > 0 and (it % _POLISH_EVERY == 0 or it == max_iter or res <= stop):
            z = polish(problem, x)
            g_z = k @ z - c
            res_z = _residual(problem, z, g_z)
            if res_z < res:
                x, g, res = z, g_z, res_z
                history.clear()
                history.append(problem.objective(x))
        if res < best_res:
            best_x, best_res = x, res
        if res <= stop:
            logger.debug("[QP] n=%d converged in %d iterations (res=%.2e)", x.size, it, res)
            return QpSolution(x, problem.objective(x), res, it)
        if it == max_iter:
            break

        d = project_feasible(problem, x - step * g) - x
        slope = float(g @ d)
        kd = k @ d
        curv = float(d @ kd)
        f = problem.objective(x)
        lam = 1.0
        if f + slope + 0.5 * curv > max(history) + _ARMIJO * slope and curv > 0:
            lam = min(1.0, -slope / curv)
        x = np.clip(x + lam * d, 0.0, problem.box_upper)
        g = k @ x - c
        history.append(problem.objective(x))
        step = float(d @ d) / curv if curv > 0 else _STEP_MAX
        step = min(max(step, _STEP_MIN), _STEP_MAX)

    raise ConvergenceError("QP iteration budget exhausted", best_res, max_iter, best=best_x)
