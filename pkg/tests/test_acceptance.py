"""Acceptance criteria; each check prints one PASS/FAIL line.

Run with ``pytest tests/test_acceptance.py -v -rA`` to see the lines, or read
the "acceptance criteria" section of the terminal summary.
"""

import math

import numpy as np
import pytest

from lavfem.energy import CutoffParams, cutoff_apply
from lavfem.experiments import fitted_rate, interpolant_study, run_convergence_study
from lavfem.fem import build_space, interpolate
from lavfem.mesh import build_interval_mesh, build_rect_tri_mesh
from lavfem.optimize import solve_enhanced_fem, solve_standard_fem
from lavfem.problems import foss_problem, mania_problem
from lavfem.quadrature import gauss_interval, gauss_triangle

from test_energy import _fd_check

LEVELS = [10, 20, 40, 80, 160]
TABLE_J = [7.19e-1, 1.52, 3.04, 6.09, 12.9]
TABLE_JH = [2.41e-3, 8.63e-4, 3.09e-4, 1.10e-4, 3.91e-5]


@pytest.fixture(scope="module")
def mania():
    return mania_problem()


@pytest.fixture(scope="module")
def verify_report(mania):
    return interpolant_study(mania, 0.25, 1, LEVELS)


@pytest.fixture(scope="module")
def mania_study(mania):
    return run_convergence_study(mania, 0.25, 1, LEVELS)


@pytest.fixture(scope="module")
def foss_study():
    return run_convergence_study(foss_problem(), 1 / 6, 1, [6, 12, 24], warm_start=True)


# 1. optimizer-free table reproduction

@pytest.mark.parametrize("k", range(5), ids=[f"n={n}" for n in LEVELS])
def test_c1_J_interpolant(verify_report, criterion, k):
    got = verify_report.rows[k].J_interp
    rel = abs(got / TABLE_J[k] - 1)
    criterion(f"C1 J(I_h u) n={LEVELS[k]}", rel <= 0.03, f"{got:.5g} vs {TABLE_J[k]:.3g} (rel {rel:.3%})")


@pytest.mark.parametrize("k", range(5), ids=[f"n={n}" for n in LEVELS])
def test_c1_Jh_interpolant(verify_report, criterion, k):
    got = verify_report.rows[k].Jh_interp
    rel = abs(got / TABLE_JH[k] - 1)
    criterion(f"C1 Jh(I_h u) n={LEVELS[k]}", rel <= 0.03, f"{got:.5g} vs {TABLE_JH[k]:.3g} (rel {rel:.3%})")


# 2. rate 1.5 for both elements

@pytest.mark.parametrize("degree", [1, 2])
def test_c2_rate(mania, verify_report, criterion, degree):
    rep = verify_report if degree == 1 else interpolant_study(mania, 0.25, 2, LEVELS)
    slope = fitted_rate(rep.column("h"), rep.column("Jh_interp"))
    criterion(f"C2 slope P{degree}", 1.3 <= slope <= 1.7, f"{slope:.4f}")


# 3. standard-FEM divergence signature

def test_c3_interpolant_ratios(verify_report, criterion):
    j = verify_report.column("J_interp")
    ratios = j[1:] / j[:-1]
    ok = bool(np.all((ratios >= 1.8) & (ratios <= 2.2)))
    criterion("C3 J(I_h u) halving ratios", ok, " ".join(f"{r:.4f}" for r in ratios))


@pytest.mark.parametrize("n", LEVELS)
def test_c3_standard_energy(mania, criterion, n):
    res = solve_standard_fem(mania, mania.mesh(n), 1)
    criterion(f"C3 standard J(u_h) > 0.5 n={n}", res.final_energy > 0.5,
              f"{res.final_energy:.4g} ({res.status}, start J = 8/105)")


# 4. enhanced convergence on Manià

def test_c4_enhanced_mania(mania_study, criterion):
    row = mania_study.rows[-1]
    criterion("C4 Jh(u_h) n=160", row.Jh_min <= 1e-3, f"{row.Jh_min:.4g} ({row.status}, {row.iterations} its)")


def test_c4_enhanced_error(mania_study, criterion):
    row = mania_study.rows[-1]
    criterion("C4 nodal Linf error n=160", row.linf_error <= 5e-2, f"{row.linf_error:.4g}")


# 5. Foss study

def test_c5_foss_monotone(foss_study, criterion):
    jh = foss_study.column("Jh_min")
    ok = bool(np.all(np.diff(jh) < 0))
    criterion("C5 Foss Jh(u_h) decreasing", ok, " ".join(f"{v:.3e}" for v in jh))


def test_c5_foss_fine(foss_study, criterion):
    jh = foss_study.rows[-1].Jh_min
    criterion("C5 Foss Jh(u_h) n=24 <= 5e-3", jh <= 5e-3, f"{jh:.4g}")


def test_c5_foss_gap(foss_study, criterion):
    j = foss_study.column("J_min")
    criterion("C5 Foss J(u_h) > 1", bool(np.all(j > 1)), " ".join(f"{v:.4g}" for v in j))


# 6. property suites

def test_c6_cutoff(criterion):
    rng = np.random.default_rng(6)
    m = 10_000
    s = rng.normal(scale=10.0, size=m) * rng.choice([1e-3, 1.0, 1e3], size=m)
    h = rng.uniform(1e-4, 1.0, m)
    alpha = rng.uniform(1e-3, 2.0, m)
    ok = {"idempotent": True, "bounded": True, "identity": True, "clamp": True}
    for si, hi, ai in zip(s, h, alpha):
        params = CutoffParams(ai, hi)
        t = params.threshold
        c = cutoff_apply(si, params)
        ok["idempotent"] &= bool(cutoff_apply(c, params) == c)
        ok["bounded"] &= bool(abs(c) <= t)
        ok["identity" if abs(si) <= t else "clamp"] &= bool(c == (si if abs(si) <= t else math.copysign(t, si)))
    criterion("C6 cutoff properties (1e4 triples)", all(ok.values()),
              " ".join(f"{k}={v}" for k, v in ok.items()))


@pytest.mark.parametrize("name", ["mania", "foss"])
def test_c6_gradient_fd(name, criterion):
    rng = np.random.default_rng(7)
    if name == "mania":
        prob, n, alpha = mania_problem(), 20, 0.25

        def make(sp, rng):
            x = sp.dof_coords[sp.free_dofs, 0]
            return np.cbrt(x) * rng.uniform(0.8, 1.1) + 0.1 * rng.normal(size=x.shape)
    else:
        prob, n, alpha = foss_problem(), 4, 1 / 6

        def make(sp, rng):
            X = sp.dof_coords[sp.free_dofs]
            return X[:, 0] ** rng.uniform(0.4, 1.0) + 0.05 * rng.normal(size=len(X))

    clamped = _fd_check(prob, n, alpha, make, rng, count=100)
    criterion(f"C6 gradient vs central difference ({name})", True, f"100 functions, {clamped} touch the clamp")


def test_c6_quadrature_exactness(criterion):
    worst = 0.0
    for deg in range(1, 31):
        r = gauss_interval(deg)
        for k in range(deg + 1):
            worst = max(worst, abs(r.integrate(lambda x: x[:, 0] ** k) * (k + 1) - 1))
    for deg in range(1, 41):
        r = gauss_triangle(deg)
        for a in range(deg + 1):
            for b in range(deg + 1 - a):
                exact = math.factorial(a) * math.factorial(b) / math.factorial(a + b + 2)
                worst = max(worst, abs(r.integrate(lambda x: x[:, 0] ** a * x[:, 1] ** b) / exact - 1))
    criterion("C6 quadrature monomial exactness", worst <= 1e-12, f"worst rel {worst:.2e}")


def test_c6_partition_and_reproduction(criterion):
    rng = np.random.default_rng(8)
    worst = 0.0
    for dim in (1, 2):
        mesh = build_interval_mesh(0, 1, 7) if dim == 1 else build_rect_tri_mesh((0, 1), (0, 1), 3, 4)
        for degree in (1, 2):
            sp = build_space(mesh, degree)
            ref = rng.random((20, dim))
            if dim == 2:
                ref = ref[ref.sum(axis=1) <= 1]
            ones = sp.function(np.ones(sp.num_dofs))
            vals, _ = ones.sample(ref)
            worst = max(worst, np.max(np.abs(vals - 1)))
            coef = rng.normal(size=(degree + 1, degree + 1))

            def poly(X):
                y = X[:, 1] if dim == 2 else np.zeros(len(X))
                return sum(coef[i, j] * X[:, 0] ** i * y**j
                           for i in range(degree + 1) for j in range(degree + 1 - i)
                           if dim == 2 or j == 0)

            f = interpolate(sp, poly)
            vals, pts = f.sample(ref)
            worst = max(worst, np.max(np.abs(vals - poly(pts.reshape(-1, dim)).reshape(vals.shape))))
    criterion("C6 partition of unity and P_r reproduction", worst <= 1e-12, f"worst {worst:.2e}")


def test_c6_nonnegative(criterion):
    rng = np.random.default_rng(9)
    ok = True
    for prob in (mania_problem(), foss_problem()):
        X = rng.random((5000, prob.dim))
        if prob.dim == 2:
            X[:, 1] = 1.5 + X[:, 1]
        p = rng.normal(scale=5.0, size=(5000, prob.dim))
        v = rng.normal(scale=2.0, size=5000)
        ok &= bool(np.all(prob.density.f(p, v, X) >= 0))
    criterion("C6 densities nonnegative", ok, "5000 random inputs per problem")


def test_c6_armijo_monotone(mania_study, foss_study, mania, criterion):
    traces = [solve_enhanced_fem(mania, mania.mesh(n), 1, 0.25).energy_trace for n in (10, 40)]
    traces += [solve_standard_fem(mania, mania.mesh(n), 1).energy_trace for n in (10, 40)]
    foss = foss_problem()
    traces.append(solve_enhanced_fem(foss, foss.mesh(6), 1, 1 / 6, warm_start=True).energy_trace)
    bad = sum(any(b > a for a, b in zip(t, t[1:])) for t in traces)
    criterion("C6 energy traces nonincreasing", bad == 0, f"{len(traces)} traces, {bad} violations")


def test_c6_quadrature_stability(mania, verify_report, criterion):
    raised = interpolant_study(mania, 0.25, 1, LEVELS, quad_degree=14)
    worst = 0.0
    for name in ("J_interp", "Jh_interp"):
        worst = max(worst, np.max(np.abs(raised.column(name) / verify_report.column(name) - 1)))
    criterion("C6 quadrature stability (+2 degrees)", worst < 5e-3, f"max rel change {worst:.2e}")
