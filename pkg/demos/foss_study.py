"""
A 2-D example with a positive gap
=================================

On (0,1) x (1.5, 2.5) the density
    |u^(y/(y-1)) - x|^2 |u_x|^((14-3y)/(y-1)) + C |u_x|^14
with C = 66 (13/14)^14 has minimiser u = x^((y-1)/y). The plain infimum over
Lipschitz functions is 1 while the minimum is 0. Standard P1 solves seed the
capped solves with alpha = 1/6.
"""

from pathlib import Path

from lavfem import foss_problem, run_convergence_study
from lavfem.plots import emit_plot

out = Path(__file__).with_name("output")
out.mkdir(exist_ok=True)
problem = foss_problem()

report = run_convergence_study(problem, alpha=1 / 6, warm_start=True, keep_solutions=True)
print(f"{'n':>4} {'J std':>10} {'Jh std':>10} {'Jh(u_h)':>10} {'J(u_h)':>10} {'nodal err':>10}")
for r in report.rows:
    print(f"{r.n:4d} {r.J_std:10.4g} {r.Jh_std:10.4g} {r.Jh_min:10.3e} {r.J_min:10.4g} {r.linf_error:10.3e}")

fine = report.rows[-1]
emit_plot(fine.solution, out / "foss_error.svg", "error-surface-2d", exact=problem.exact_minimizer)
print("wrote", out / "foss_error.svg")
