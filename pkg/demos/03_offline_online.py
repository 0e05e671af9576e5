"""Offline basis construction, online reduced time stepping, and accuracy.

Run: python demos/03_offline_online.py
"""

import numpy as np

from ltrb import (NewmarkConfig, build_reduced_basis, build_structured_mesh, assemble_operators, cholesky_gram,
                  compute_snapshots, gaussian_field, l2_project, make_quadrature, max_generalized_eigenvalue,
                  newmark_solve, optimal_beta, reduce_system, reduced_relative_error, singular_value_report)
from ltrb.metrics import Stopwatch, timing_report

watch = Stopwatch()
with watch.phase("assemble_fem"):
    mesh = build_structured_mesh(24)
    ops = assemble_operators(mesh)
    u0 = l2_project(ops, mesh, gaussian_field((0.25, -0.1), 0.05))
    u1 = np.zeros_like(u0)

# Offline: Laplace-domain solves, then a weighted POD in the H^1_0 inner product.
with watch.phase("laplace_hf"):
    beta = optimal_beta(5.0, max_generalized_eigenvalue(ops).lambda_max).beta_opt
    snaps = compute_snapshots(ops, make_quadrature(5.0, beta, 200), u0, u1)
with watch.phase("build_rb"):
    basis = build_reduced_basis(snaps, cholesky_gram(ops), 60, ops.mesh_digest)

report = singular_value_report(basis)
print(f"numerical rank {basis.rank}; sigma_j / sigma_1 for j = 1, 10, 30, {basis.rank}:")
for j in (1, 10, 30, basis.rank):
    print(f"  {j:3d}  {report[j - 1][2]:.3e}")

# Online: the reduced stiffness is c^2 I by construction, so each step costs
# one dense R x R solve with a prefactored matrix.
cfg = NewmarkConfig(t_final=1.0, n_steps=2000)
with watch.phase("solve_td_rb"):
    reduced = reduce_system(ops, basis, u0, u1).solve(cfg, store_derivatives=False)
with watch.phase("solve_td_hf"):
    full = newmark_solve(ops.mass, ops.stiffness, None, u0, u1, cfg, store_derivatives=False)

for norm in ("L2", "H10"):
    print(f"relative {norm} error over [0, 1]: {reduced_relative_error(full, reduced, basis, ops, norm):.3e}")

rep = timing_report(watch.phases, n_solves=snaps.n_solves, n_steps=cfg.n_steps, R=basis.R, n_dofs=ops.n_dofs)
for name, seconds in rep.rows():
    print(f"  {name:13s} {seconds:8.3f} s")
print(f"speedup at this size: {rep.speedup:.2f}x (the offline cost dominates on small meshes)")
