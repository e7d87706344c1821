"""Energy functionals J and the gradient-capped J_h^alpha, with exact coefficient gradients."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .fem import FeFunction, FeSpace, Tabulation, interpolate
from .quadrature import QuadratureRule, reference_rule


class NonFiniteEnergyError(ArithmeticError):
    """The integrand is not finite on some element."""

    def __init__(self, element: int, value: float):
        super().__init__(f"non-finite energy contribution {value!r} on element {element}")
        self.element = element
        self.value = value


@dataclass(frozen=True)
class CutoffParams:
    alpha: float
    h: float

    def __post_init__(self):
        if not self.alpha > 0:
            raise ValueError(f"alpha must be positive, got {self.alpha}")
        if not self.h > 0:
            raise ValueError(f"h must be positive, got {self.h}")

    @property
    def threshold(self) -> float:
        return self.h ** (-self.alpha)


@dataclass(frozen=True)
class EnergyDensity:
    """Integrand f(p, v, x) with partial derivatives.

    All three callables are vectorised: ``p`` has shape (..., dim), ``v`` shape
    (...), ``x`` shape (..., dim). ``df_dp`` returns (..., dim), the others (...).
    """

    dim: int
    f: Callable
    df_dp: Callable
    df_dv: Callable


def cutoff_apply(s, params: CutoffParams) -> np.ndarray:
    t = params.threshold
    s = np.asarray(s, dtype=float)
    # |s_i| <= t keeps s_i, otherwise sign(s_i) * t
    return np.where(np.abs(s) <= t, s, np.sign(s) * t)


def cutoff_jacobian_diag(s, params: CutoffParams) -> np.ndarray:
    return (np.abs(np.asarray(s, dtype=float)) <= params.threshold).astype(float)


def _check_rule(density: EnergyDensity, rule: QuadratureRule | None, fe_degree: int = 1) -> QuadratureRule:
    if rule is None:
        return reference_rule(density.dim, fe_degree=fe_degree)
    if rule.dim != density.dim:
        raise ValueError(f"rule dimension {rule.dim} does not match density dimension {density.dim}")
    return rule


def _params_for(space: FeSpace, alpha: float | CutoffParams | None) -> CutoffParams | None:
    if alpha is None:
        return None
    if isinstance(alpha, CutoffParams):
        if alpha.h != space.mesh.h:
            raise ValueError(f"cut-off built for h={alpha.h} but mesh has h={space.mesh.h}")
        return alpha
    return CutoffParams(float(alpha), space.mesh.h)


def _element_sums(density, vals, grads, tab: Tabulation, params):
    p = grads if params is None else cutoff_apply(grads, params)
    with np.errstate(over="ignore", invalid="ignore"):
        integrand = density.f(p, vals, tab.points)
        sums = np.sum(tab.weights * integrand, axis=1)
    bad = np.flatnonzero(~np.isfinite(sums))
    if bad.size:
        raise NonFiniteEnergyError(int(bad[0]), float(sums[bad[0]]))
    return sums


def _total(sums: np.ndarray) -> float:
    # correctly rounded, so independent of reduction order
    return math.fsum(sums.tolist())


def energy_J(density: EnergyDensity, f: FeFunction, rule: QuadratureRule | None = None) -> float:
    """Quadrature approximation of the integral of f(grad v, v, x)."""
    rule = _check_rule(density, rule, f.space.degree)
    tab = f.space.tabulate(rule)
    vals, grads = f.at_quadrature(tab)
    return _total(_element_sums(density, vals, grads, tab, None))


def energy_Jh(density: EnergyDensity, f: FeFunction, alpha, rule: QuadratureRule | None = None) -> float:
    """Like :func:`energy_J` but each gradient component is clamped to [-h^-alpha, h^-alpha].

    ``alpha`` may be a float or a :class:`CutoffParams`; in the latter case its
    ``h`` must equal the mesh parameter of ``f``'s space.
    """
    rule = _check_rule(density, rule, f.space.degree)
    params = _params_for(f.space, alpha)
    tab = f.space.tabulate(rule)
    vals, grads = f.at_quadrature(tab)
    return _total(_element_sums(density, vals, grads, tab, params))


def _assemble_gradient(density, f: FeFunction, vals, grads, tab: Tabulation, params):
    space = f.space
    if params is None:
        p = grads
        dpdg = None
    else:
        p = cutoff_apply(grads, params)
        dpdg = cutoff_jacobian_diag(grads, params)
    with np.errstate(over="ignore", invalid="ignore"):
        fp = density.df_dp(p, vals, tab.points)
        fv = density.df_dv(p, vals, tab.points)
    if dpdg is not None:
        fp = fp * dpdg
    w = tab.weights
    local = np.einsum("eqd,eqbd->eb", fp * w[..., None], tab.grads) + (fv * w) @ tab.values
    full = np.bincount(space.element_dofs.ravel(), weights=local.ravel(), minlength=space.num_dofs)
    return full[space.free_dofs]


def grad_J(density: EnergyDensity, f: FeFunction, rule: QuadratureRule | None = None) -> np.ndarray:
    rule = _check_rule(density, rule, f.space.degree)
    tab = f.space.tabulate(rule)
    vals, grads = f.at_quadrature(tab)
    return _assemble_gradient(density, f, vals, grads, tab, None)


def grad_Jh(density: EnergyDensity, f: FeFunction, alpha, rule: QuadratureRule | None = None) -> np.ndarray:
    """Gradient of :func:`energy_Jh` with respect to the free coefficients.

    The clamp is differentiated almost everywhere, with slope 1 on the closed
    identity branch |s_i| <= h^-alpha.
    """
    rule = _check_rule(density, rule, f.space.degree)
    params = _params_for(f.space, alpha)
    tab = f.space.tabulate(rule)
    vals, grads = f.at_quadrature(tab)
    return _assemble_gradient(density, f, vals, grads, tab, params)


class DiscreteEnergy:
    """Objective over the free coefficients of a fixed admissible template.

    Calling the instance with a free-coefficient vector returns
    ``(value, gradient)``. ``alpha=None`` gives the raw functional J.
    """

    def __init__(self, density: EnergyDensity, template: FeFunction, alpha=None,
                 rule: QuadratureRule | None = None):
        self.density = density
        self.template = template
        self.space = template.space
        self.rule = _check_rule(density, rule, template.space.degree)
        self.params = _params_for(self.space, alpha)
        self.tab = self.space.tabulate(self.rule)

    def function(self, free: np.ndarray) -> FeFunction:
        return self.template.with_free(free)

    def value(self, free: np.ndarray) -> float:
        f = self.function(free)
        vals, grads = f.at_quadrature(self.tab)
        return _total(_element_sums(self.density, vals, grads, self.tab, self.params))

    def __call__(self, free: np.ndarray):
        f = self.function(free)
        vals, grads = f.at_quadrature(self.tab)
        value = _total(_element_sums(self.density, vals, grads, self.tab, self.params))
        return value, _assemble_gradient(self.density, f, vals, grads, self.tab, self.params)


def verify_interpolant_convergence(problem, alpha: float, levels, degree: int = 1,
                                   quad_degree: int | None = None):
    """Evaluate J_h^alpha and J at the nodal interpolant of the exact minimizer.

    No optimisation is involved. Returns a list of ``(h, Jh, J)`` per level.
    """
    if problem.exact_minimizer is None:
        raise ValueError(f"problem {problem.name!r} has no exact minimizer")
    rule = reference_rule(problem.dim, quad_degree, degree)
    out = []
    for n in levels:
        space = problem.space(problem.mesh(n), degree)
        ih = interpolate(space, problem.exact_minimizer)
        out.append((space.mesh.h,
                    energy_Jh(problem.density, ih, alpha, rule),
                    energy_J(problem.density, ih, rule)))
    return out
