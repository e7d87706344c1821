"""Benchmark variational problems with a Lavrentiev gap."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .energy import EnergyDensity
from .fem import FeSpace, build_space
from .mesh import Mesh, build_interval_mesh, build_rect_tri_mesh


@dataclass(frozen=True, eq=False)
class Problem:
    """A minimisation problem J(v) = integral of f(grad v, v, x) with Dirichlet data.

    Scalar functions (``exact_minimizer``, ``initial_guess`` and the values of
    ``bc``) take an (m, dim) coordinate array and return m values.

    ``inf_Ainf`` is ``None`` when the infimum over Lipschitz functions is only
    known to be positive (``inf_Ainf_positive`` is then True).
    """

    name: str
    density: EnergyDensity
    domain: tuple
    bc: dict[str, Callable]
    exact_minimizer: Callable | None
    inf_A: float
    inf_Ainf: float | None
    alpha_sufficient: float
    alpha_default: float
    initial_guess: Callable
    inf_Ainf_positive: bool = True
    warm_start_default: bool = False
    default_levels: tuple = ()
    # alternative analytic bound quoted for the 1-D benchmark, kept for alpha probes
    alpha_bounds: dict = field(default_factory=dict)

    @property
    def dim(self) -> int:
        return self.density.dim

    def mesh(self, n: int) -> Mesh:
        """Uniform mesh with ``n`` cells per coordinate direction."""
        if self.dim == 1:
            (a, b), = self.domain
            return build_interval_mesh(a, b, n)
        return build_rect_tri_mesh(self.domain[0], self.domain[1], n, n)

    def space(self, mesh: Mesh, degree: int = 1) -> FeSpace:
        return build_space(mesh, degree, self.bc)


# --- Mania -----------------------------------------------------------------

def _mania_f(p, v, x):
    r = v**3 - x[..., 0]
    return p[..., 0] ** 6 * r**2


def _mania_dp(p, v, x):
    r = v**3 - x[..., 0]
    return (6 * p[..., 0] ** 5 * r**2)[..., None]


def _mania_dv(p, v, x):
    r = v**3 - x[..., 0]
    return 6 * v**2 * p[..., 0] ** 6 * r


def mania_problem() -> Problem:
    """J(v) = int_0^1 v'^6 (v^3 - x)^2 dx, v(0) = 0, v(1) = 1; minimiser x^(1/3)."""
    return Problem(
        name="mania",
        density=EnergyDensity(1, _mania_f, _mania_dp, _mania_dv),
        domain=((0.0, 1.0),),
        bc={"left": lambda X: np.zeros(len(X)), "right": lambda X: np.ones(len(X))},
        exact_minimizer=lambda X: np.cbrt(X[:, 0]),
        inf_A=0.0,
        inf_Ainf=None,
        inf_Ainf_positive=True,
        alpha_sufficient=1 / 6,
        alpha_default=1 / 4,
        initial_guess=lambda X: X[:, 0].copy(),
        warm_start_default=False,
        default_levels=(10, 20, 40, 80, 160),
        # 1/6 is where the interpolant estimate is proven; runs converge up to about 1/2
        alpha_bounds={"interpolant_estimate": 1 / 6, "numerical_critical": 1 / 2},
    )


# --- Foss ------------------------------------------------------------------

FOSS_CONSTANT = 66.0 * (13.0 / 14.0) ** 14


def _foss_parts(v, x):
    xx, y = x[..., 0], x[..., 1]
    k14 = (y / (y - 1.0)) ** 14
    a = (14.0 - 3.0 * y) / (y - 1.0)
    b = y / (y - 1.0)
    av = np.abs(v)
    r = av**b - xx
    return k14, a, b, av, r


def _foss_f(p, v, x):
    k14, a, _, av, r = _foss_parts(v, x)
    return FOSS_CONSTANT * k14 * av**a * r**2 * p[..., 0] ** 14


def _foss_dp(p, v, x):
    k14, a, _, av, r = _foss_parts(v, x)
    dx = 14.0 * FOSS_CONSTANT * k14 * av**a * r**2 * p[..., 0] ** 13
    return np.stack([dx, np.zeros_like(dx)], axis=-1)


def _foss_dv(p, v, x):
    # d|v|^q/dv = q sign(v) |v|^(q-1); every q - 1 here is positive, so v = 0 gives 0
    k14, a, b, av, r = _foss_parts(v, x)
    s = np.sign(v)
    d_pow_a = a * s * av ** (a - 1.0)
    d_pow_b = b * s * av ** (b - 1.0)
    inner = d_pow_a * r**2 + av**a * 2.0 * r * d_pow_b
    return FOSS_CONSTANT * k14 * p[..., 0] ** 14 * inner


def foss_problem() -> Problem:
    """Foss' 2-D functional on (0,1) x (3/2, 5/2); minimiser x^((y-1)/y)."""
    return Problem(
        name="foss",
        density=EnergyDensity(2, _foss_f, _foss_dp, _foss_dv),
        domain=((0.0, 1.0), (1.5, 2.5)),
        bc={"left": lambda X: np.zeros(len(X)), "right": lambda X: np.ones(len(X))},
        exact_minimizer=lambda X: X[:, 0] ** ((X[:, 1] - 1.0) / X[:, 1]),
        inf_A=0.0,
        inf_Ainf=1.0,
        alpha_sufficient=3 / 14,
        alpha_default=1 / 6,
        initial_guess=lambda X: X[:, 0].copy(),
        warm_start_default=True,
        default_levels=(6, 12, 24),
    )


PROBLEMS = {"mania": mania_problem, "foss": foss_problem}


def get_problem(name: str) -> Problem:
    try:
        return PROBLEMS[name]()
    except KeyError:
        raise ValueError(f"unknown problem {name!r}; choose from {sorted(PROBLEMS)}") from None
