"""Limited-memory BFGS with Armijo backtracking over free FE coefficients."""

from __future__ import annotations

import logging
from collections import deque
from dataclasses import dataclass, field

import numpy as np

from .energy import DiscreteEnergy, NonFiniteEnergyError
from .fem import FeFunction, interpolate
from .mesh import Mesh
from .quadrature import QuadratureRule

log = logging.getLogger(__name__)

CONVERGED = "converged"
MAX_ITERS = "max-iters"
LINE_SEARCH_FAILURE = "line-search-failure"


class InvalidStartError(ValueError):
    pass


@dataclass(frozen=True)
class MinimizeOptions:
    grad_tol: float = 1e-8
    step_tol: float = 1e-12
    max_iters: int = 20000
    memory: int = 10
    armijo_c: float = 1e-4
    backtrack_factor: float = 0.5
    max_line_search: int = 60

    def __post_init__(self):
        if self.grad_tol <= 0 or self.step_tol <= 0:
            raise ValueError("tolerances must be positive")
        if self.max_iters < 1 or self.memory < 1 or self.max_line_search < 1:
            raise ValueError("max_iters, memory and max_line_search must be positive")
        if not (0 < self.armijo_c < 1 and 0 < self.backtrack_factor < 1):
            raise ValueError("armijo_c and backtrack_factor must lie in (0, 1)")


@dataclass(eq=False)
class MinimizeResult:
    minimizer: FeFunction
    final_energy: float
    final_grad_norm: float
    iterations: int
    status: str
    energy_trace: list[float] = field(default_factory=list)


def _evaluate(objective, x):
    try:
        value, grad = objective(x)
    except (NonFiniteEnergyError, FloatingPointError, OverflowError):
        return np.inf, None
    if not np.isfinite(value) or not np.all(np.isfinite(grad)):
        return np.inf, None
    return value, grad


def _two_loop(g, pairs):
    q = g.copy()
    alphas = []
    for s, y, rho in reversed(pairs):
        a = rho * np.dot(s, q)
        alphas.append(a)
        q -= a * y
    if pairs:
        s, y, _ = pairs[-1]
        q *= np.dot(s, y) / np.dot(y, y)
    for (s, y, rho), a in zip(pairs, reversed(alphas)):
        b = rho * np.dot(y, q)
        q += (a - b) * s
    return -q


def minimize(objective, init: FeFunction, opts: MinimizeOptions | None = None) -> MinimizeResult:
    """Minimise ``objective`` over the free coefficients of ``init``.

    ``objective(free) -> (value, gradient)``; constrained coefficients of
    ``init`` are carried over unchanged. Every accepted step satisfies the
    Armijo condition, so ``energy_trace`` is nonincreasing.
    """
    opts = opts or MinimizeOptions()
    free_idx = init.space.free_dofs
    x = init.coeffs[free_idx].copy()
    f, g = _evaluate(objective, x)
    if g is None:
        raise InvalidStartError("objective is not finite at the initial guess")

    def result(status, iters):
        out = init.copy()
        out.coeffs[free_idx] = x
        gnorm = float(np.max(np.abs(g))) if g.size else 0.0
        return MinimizeResult(out, f, gnorm, iters, status, trace)

    trace = [f]
    pairs: deque = deque(maxlen=opts.memory)
    if x.size == 0:
        return result(CONVERGED, 0)

    for it in range(1, opts.max_iters + 1):
        if np.max(np.abs(g)) <= opts.grad_tol:
            return result(CONVERGED, it - 1)

        d = _two_loop(g, pairs)
        slope = float(np.dot(g, d))
        if not slope < 0:
            pairs.clear()
            d = -g
            slope = -float(np.dot(g, g))

        accepted = False
        for attempt in range(2):
            # first quasi-Newton step is unscaled: keep its max-norm at most 1
            step = 1.0 if pairs else min(1.0, 1.0 / np.max(np.abs(d)))
            for _ in range(opts.max_line_search):
                x_new = x + step * d
                f_new, g_new = _evaluate(objective, x_new)
                if g_new is not None and f_new <= f + opts.armijo_c * step * slope and f_new < f:
                    accepted = True
                    break
                step *= opts.backtrack_factor
            if accepted or not pairs:
                break
            # retry once along steepest descent with a fresh memory
            pairs.clear()
            d = -g
            slope = -float(np.dot(g, g))

        if not accepted:
            log.debug("line search failed at iteration %d (f=%g)", it, f)
            return result(LINE_SEARCH_FAILURE, it - 1)

        s = x_new - x
        y = g_new - g
        sy = float(np.dot(s, y))
        if sy > 1e-12 * float(np.dot(y, y)) and sy > 0:
            pairs.append((s, y, 1.0 / sy))
        x, f, g = x_new, f_new, g_new
        trace.append(f)
        if np.max(np.abs(s)) <= opts.step_tol:
            return result(CONVERGED, it)

    return result(MAX_ITERS, opts.max_iters)


def solve_standard_fem(problem, mesh: Mesh, degree: int = 1, opts: MinimizeOptions | None = None,
                       rule: QuadratureRule | None = None, init: FeFunction | None = None) -> MinimizeResult:
    """Minimise the raw functional J over the Lagrange space."""
    space = problem.space(mesh, degree)
    if init is None:
        init = _initial(problem, space)
    return minimize(DiscreteEnergy(problem.density, init, None, rule), init, opts)


def solve_enhanced_fem(problem, mesh: Mesh, degree: int = 1, alpha: float | None = None,
                       opts: MinimizeOptions | None = None, warm_start: bool = False,
                       rule: QuadratureRule | None = None, init: FeFunction | None = None) -> MinimizeResult:
    """Minimise J_h^alpha over the Lagrange space.

    With ``warm_start`` the standard problem is solved first from the
    problem's initial guess and its minimiser seeds the capped problem. An
    explicit ``init`` overrides both.
    """
    if alpha is None:
        alpha = problem.alpha_default
    if not alpha > 0:
        raise ValueError(f"alpha must be positive, got {alpha}")
    space = problem.space(mesh, degree)
    if init is None:
        if warm_start:
            init = solve_standard_fem(problem, mesh, degree, opts, rule).minimizer
        else:
            init = _initial(problem, space)
    return minimize(DiscreteEnergy(problem.density, init, alpha, rule), init, opts)


def _initial(problem, space) -> FeFunction:
    u0 = interpolate(space, problem.initial_guess)
    u0.coeffs[space.constrained_dofs] = space.constrained_values
    return u0
