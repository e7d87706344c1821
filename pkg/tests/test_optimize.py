import numpy as np
import pytest

from lavfem.energy import DiscreteEnergy, EnergyDensity, energy_J, energy_Jh
from lavfem.fem import build_space, interpolate
from lavfem.mesh import build_interval_mesh
from lavfem.optimize import (
    CONVERGED,
    InvalidStartError,
    MinimizeOptions,
    minimize,
    solve_enhanced_fem,
    solve_standard_fem,
)
from lavfem.problems import Problem, foss_problem, mania_problem


def assert_monotone(trace):
    assert all(b <= a for a, b in zip(trace, trace[1:]))


def test_options_validation():
    with pytest.raises(ValueError):
        MinimizeOptions(grad_tol=0)
    with pytest.raises(ValueError):
        MinimizeOptions(backtrack_factor=1.0)
    with pytest.raises(ValueError):
        MinimizeOptions(memory=0)


def test_quadratic_objective(rng):
    sp = build_space(build_interval_mesh(0, 1, 30), 1, {"left": 0.0, "right": 1.0})
    target = rng.normal(size=len(sp.free_dofs))
    scale = rng.uniform(0.5, 5.0, size=len(target))

    def objective(c):
        r = c - target
        return float(np.sum(scale * r * r)), 2 * scale * r

    init = sp.function()
    res = minimize(objective, init, MinimizeOptions())
    assert res.status == CONVERGED
    assert res.iterations <= 50
    assert np.max(np.abs(res.minimizer.coeffs[sp.free_dofs] - target)) <= 1e-8
    assert_monotone(res.energy_trace)
    assert res.minimizer.coeffs[0] == 0.0 and res.minimizer.coeffs[-1] == 1.0


def test_invalid_start():
    sp = build_space(build_interval_mesh(0, 1, 4), 1)
    with pytest.raises(InvalidStartError):
        minimize(lambda c: (np.nan, np.zeros_like(c)), sp.function())


def _poisson_problem(dim):
    # f = |p|^2 / 2 - v: minimiser solves -lap u = 1 with zero data
    dens = EnergyDensity(
        dim,
        lambda p, v, x: 0.5 * np.sum(p**2, axis=-1) - v,
        lambda p, v, x: p,
        lambda p, v, x: -np.ones_like(v),
    )
    zero = lambda X: np.zeros(len(X))  # noqa: E731
    if dim == 1:
        domain, bc = ((0.0, 1.0),), {"left": zero, "right": zero}
    else:
        domain = ((0.0, 1.0), (0.0, 1.0))
        bc = {s: zero for s in ("left", "right", "top", "bottom")}
    return Problem("poisson", dens, domain, bc, None, 0.0, None, 1.0, 1.0, zero)


def test_standard_fem_poisson_1d():
    prob = _poisson_problem(1)
    mesh = prob.mesh(16)
    res = solve_standard_fem(prob, mesh, 1)
    x = mesh.vertices[:, 0]
    # 1-D P1 Galerkin is nodally exact for -u'' = 1
    assert np.max(np.abs(res.minimizer.coeffs - x * (1 - x) / 2)) <= 1e-8


def test_standard_fem_poisson_2d_linear_solve():
    prob = _poisson_problem(2)
    mesh = prob.mesh(6)
    res = solve_standard_fem(prob, mesh, 1)

    # independent assembly of the P1 stiffness matrix and load vector
    nv = mesh.num_vertices
    K = np.zeros((nv, nv))
    b = np.zeros(nv)
    for tri in mesh.elements:
        P = mesh.vertices[tri]
        M = np.column_stack([np.ones(3), P])
        area = 0.5 * abs(np.linalg.det(M))
        G = np.linalg.inv(M)[1:, :].T  # rows: gradients of the hat functions
        K[np.ix_(tri, tri)] += area * G @ G.T
        b[tri] += area / 3
    bnd = np.unique(np.concatenate(list(mesh.boundary.values())))
    free = np.setdiff1d(np.arange(nv), bnd)
    u = np.zeros(nv)
    u[free] = np.linalg.solve(K[np.ix_(free, free)], b[free])
    assert np.max(np.abs(res.minimizer.coeffs - u)) <= 1e-8


@pytest.fixture(scope="module")
def mania():
    return mania_problem()


def test_mania_enhanced_n40(mania):
    res = solve_enhanced_fem(mania, mania.mesh(40), 1, 0.25)
    assert res.final_energy <= 1e-3
    assert_monotone(res.energy_trace)
    assert res.final_energy == pytest.approx(
        energy_Jh(mania.density, res.minimizer, 0.25), rel=1e-12)


def test_standard_fem_does_not_go_to_zero(mania):
    vals = [solve_standard_fem(mania, mania.mesh(n), 1).final_energy for n in (10, 20, 40, 80, 160)]
    # bounded away from zero: the Lipschitz infimum is positive
    assert min(vals) > 1e-2
    assert vals[-1] > 0.5 * vals[0]


def test_standard_vs_enhanced_separation(mania):
    for n in (40, 80):
        mesh = mania.mesh(n)
        enh = solve_enhanced_fem(mania, mesh, 1, 0.25)
        std = solve_standard_fem(mania, mesh, 1)
        assert enh.final_energy < 1e-2
        assert std.final_energy > 1e-2
        assert std.final_energy > 10 * enh.final_energy


def test_constraints_preserved_bitwise(mania):
    mesh = mania.mesh(20)
    sp = mania.space(mesh, 1)
    res = solve_enhanced_fem(mania, mesh, 1, 0.25)
    cd = sp.constrained_dofs
    assert np.array_equal(res.minimizer.coeffs[cd], sp.constrained_values)


def test_deterministic(mania):
    a = solve_enhanced_fem(mania, mania.mesh(40), 1, 0.25)
    b = solve_enhanced_fem(mania, mania.mesh(40), 1, 0.25)
    assert a.energy_trace == b.energy_trace
    assert np.array_equal(a.minimizer.coeffs, b.minimizer.coeffs)


def test_final_energy_consistent(mania):
    res = solve_standard_fem(mania, mania.mesh(20), 1)
    assert res.final_energy == pytest.approx(energy_J(mania.density, res.minimizer), rel=1e-12)


def test_alpha_must_be_positive(mania):
    with pytest.raises(ValueError):
        solve_enhanced_fem(mania, mania.mesh(10), 1, 0.0)


def test_alpha_two_sevenths_coarse_vs_fine(mania):
    errs = {}
    for n in (10, 160):
        u = solve_enhanced_fem(mania, mania.mesh(n), 1, 2 / 7).minimizer
        errs[n] = np.max(np.abs(u.coeffs - np.cbrt(u.space.dof_coords[:, 0])))
    assert errs[10] > 5 * errs[160]


def test_warm_start_runs_standard_first():
    foss = foss_problem()
    mesh = foss.mesh(4)
    std = solve_standard_fem(foss, mesh, 1)
    warm = solve_enhanced_fem(foss, mesh, 1, 1 / 6, warm_start=True)
    explicit = solve_enhanced_fem(foss, mesh, 1, 1 / 6, init=std.minimizer)
    assert warm.energy_trace == explicit.energy_trace
    assert warm.energy_trace[0] == pytest.approx(energy_Jh(foss.density, std.minimizer, 1 / 6), rel=1e-12)
    assert_monotone(warm.energy_trace)


def test_line_search_failure_keeps_best(rng):
    sp = build_space(build_interval_mesh(0, 1, 6), 1, {"left": 0.0, "right": 0.0})

    # gradient lies about the descent direction, so no step is accepted
    def objective(c):
        return float(np.sum(c**2)), -2 * c

    init = sp.function()
    init.coeffs[sp.free_dofs] = rng.normal(size=len(sp.free_dofs))
    res = minimize(objective, init, MinimizeOptions(max_line_search=5))
    assert res.status == "line-search-failure"
    assert np.array_equal(res.minimizer.coeffs, init.coeffs)
    assert res.energy_trace == [res.final_energy]


def test_max_iters_status(mania):
    res = solve_enhanced_fem(mania, mania.mesh(40), 1, 0.25, MinimizeOptions(max_iters=3))
    assert res.status == "max-iters" and res.iterations == 3
    assert len(res.energy_trace) == 4


def test_discrete_energy_matches_functionals(mania):
    sp = mania.space(mania.mesh(10), 1)
    f = interpolate(sp, mania.exact_minimizer)
    obj = DiscreteEnergy(mania.density, f, 0.25)
    val, grad = obj(f.coeffs[sp.free_dofs])
    assert val == energy_Jh(mania.density, f, 0.25)
    assert grad.shape == (len(sp.free_dofs),)
