"""Finite elements with a gradient cut-off for variational problems with a Lavrentiev gap."""

from .energy import (
    CutoffParams,
    DiscreteEnergy,
    EnergyDensity,
    NonFiniteEnergyError,
    cutoff_apply,
    cutoff_jacobian_diag,
    energy_J,
    energy_Jh,
    grad_J,
    grad_Jh,
    verify_interpolant_convergence,
)
from .experiments import (
    StudyReport,
    StudyRow,
    emit_csv,
    interpolant_study,
    nodal_error,
    run_alpha_sweep,
    run_convergence_study,
)
from .fem import FeFunction, FeSpace, build_space, eval_on_element, interpolate, linf_error
from .mesh import Mesh, build_interval_mesh, build_rect_tri_mesh
from .optimize import (
    MinimizeOptions,
    MinimizeResult,
    minimize,
    solve_enhanced_fem,
    solve_standard_fem,
)
from .problems import Problem, foss_problem, get_problem, mania_problem
from .quadrature import QuadratureRule, gauss_interval, gauss_triangle

__version__ = "0.1.0"

__all__ = [
    "CutoffParams",
    "DiscreteEnergy",
    "EnergyDensity",
    "FeFunction",
    "FeSpace",
    "Mesh",
    "MinimizeOptions",
    "MinimizeResult",
    "NonFiniteEnergyError",
    "Problem",
    "QuadratureRule",
    "StudyReport",
    "StudyRow",
    "build_interval_mesh",
    "build_rect_tri_mesh",
    "build_space",
    "cutoff_apply",
    "cutoff_jacobian_diag",
    "emit_csv",
    "energy_J",
    "energy_Jh",
    "eval_on_element",
    "foss_problem",
    "gauss_interval",
    "gauss_triangle",
    "get_problem",
    "grad_J",
    "grad_Jh",
    "interpolant_study",
    "interpolate",
    "linf_error",
    "mania_problem",
    "minimize",
    "nodal_error",
    "run_alpha_sweep",
    "run_convergence_study",
    "solve_enhanced_fem",
    "solve_standard_fem",
    "verify_interpolant_convergence",
]
