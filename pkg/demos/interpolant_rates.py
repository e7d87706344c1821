"""
Energies of the interpolated minimiser
======================================

No optimiser is involved here: the exact minimiser x^(1/3) is interpolated on
each mesh and both energies are evaluated. J(I_h u) doubles with every
refinement, while the capped energy decays like h^1.5 for P1 and P2 alike.
"""

from lavfem import interpolant_study, mania_problem
from lavfem.experiments import fitted_rate

problem = mania_problem()
levels = [10, 20, 40, 80, 160]

for degree in (1, 2):
    rep = interpolant_study(problem, alpha=0.25, degree=degree, levels=levels)
    print(f"P{degree}")
    for r in rep.rows:
        print(f"  n={r.n:4d}  J(I_h u) = {r.J_interp:9.4f}   Jh(I_h u) = {r.Jh_interp:.4e}")
    j = rep.column("J_interp")
    print("  halving ratios of J:", (j[1:] / j[:-1]).round(4))
    print(f"  fitted slope of Jh: {fitted_rate(rep.column('h'), rep.column('Jh_interp')):.3f}\n")

# the first element alone carries 8/(105 h) of the plain energy
print("8/105 =", 8 / 105)
