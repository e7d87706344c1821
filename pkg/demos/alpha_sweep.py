"""
How large may alpha be?
=======================

For small alpha the clamp is tight and the capped energy converges. For larger
alpha, and on coarse meshes, the threshold h^(-alpha) no longer cuts the steep
first element and the optimiser stays at the standard minimiser (Jh = J).
"""

from lavfem import mania_problem, run_alpha_sweep

problem = mania_problem()
alphas = [0.1, 1 / 6, 0.25, 2 / 7, 0.4, 0.49]

for n in (10, 160):
    print(f"n = {n}")
    for alpha, row in run_alpha_sweep(problem, alphas, n=n):
        print(f"  alpha={alpha:.4f}  threshold={row.h ** -alpha:7.3f}  Jh={row.Jh_min:.3e}  "
              f"J={row.J_min:.3e}  nodal err={row.linf_error:.3e}")

# alpha = 2/7 resolves u only on the fine mesh
