"""Error versus reduced dimension R and versus node count M on the desk mesh.

Writes CSV tables to out/demo_sweeps/. Run: python demos/04_error_sweeps.py
"""

from pathlib import Path

import numpy as np

from ltrb import (NewmarkConfig, build_reduced_basis, build_structured_mesh, assemble_operators, cholesky_gram,
                  compute_snapshots, gaussian_field, l2_project, make_quadrature, max_generalized_eigenvalue,
                  newmark_solve, optimal_beta, reduce_system, reduced_relative_error)
from ltrb.io import write_csv

out = Path("out/demo_sweeps")
out.mkdir(parents=True, exist_ok=True)

mesh = build_structured_mesh(24)
ops = assemble_operators(mesh)
u0 = l2_project(ops, mesh, gaussian_field((0.25, -0.1), 0.05))
u1 = np.zeros_like(u0)
cfg = NewmarkConfig(1.0, 2000)
full = newmark_solve(ops.mass, ops.stiffness, None, u0, u1, cfg, store_derivatives=False)
beta = optimal_beta(5.0, max_generalized_eigenvalue(ops).lambda_max).beta_opt
factor = cholesky_gram(ops)

r_values = list(range(5, 61, 5))
for m in (100, 200, 400):
    basis = build_reduced_basis(compute_snapshots(ops, make_quadrature(5.0, beta, m), u0, u1), factor,
                                max(r_values), ops.mesh_digest)
    rows = []
    for R in r_values:
        if R > basis.R:
            break
        sub = basis.truncate(R)
        red = reduce_system(ops, sub, u0, u1).solve(cfg, store_derivatives=False)
        rows.append((R, *(reduced_relative_error(full, red, sub, ops, n) for n in ("L2", "H10"))))
    write_csv(out / f"error_vs_R_M{m}.csv", ["R", "err_L2", "err_H10"], rows)
    # Error drops roughly geometrically in R until the sampling error in M takes over.
    print(f"M={m:4d} rank={basis.rank:3d}  " + "  ".join(f"R={r}:{e:.1e}" for r, _, e in rows[::2]))
print(f"tables in {out}/")
