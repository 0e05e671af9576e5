"""Reference-scale timing: 14641 dofs, 2e4 Newmark steps, M = 600, R = 150.

Takes about a minute on one core. Run: python demos/05_reference_scale.py
"""

import numpy as np

from ltrb import (NewmarkConfig, build_reduced_basis, build_structured_mesh, assemble_operators, cholesky_gram,
                  compute_snapshots, gaussian_field, l2_project, make_quadrature, max_generalized_eigenvalue,
                  newmark_solve, optimal_beta, reduce_system, reduced_relative_error)
from ltrb.metrics import Stopwatch, timing_report

watch = Stopwatch()
with watch.phase("assemble_fem"):
    mesh = build_structured_mesh(122)
    ops = assemble_operators(mesh)
    u0 = l2_project(ops, mesh, gaussian_field((0.25, -0.1), 0.05))
u1 = np.zeros_like(u0)
print(f"dofs {ops.n_dofs}, h = {mesh.h:.4e}")

cfg = NewmarkConfig(1.0, 20000)
with watch.phase("laplace_hf"):
    sel = optimal_beta(5.0, max_generalized_eigenvalue(ops).lambda_max)
    snaps = compute_snapshots(ops, make_quadrature(5.0, sel.beta_opt, 600), u0, u1)
with watch.phase("build_rb"):
    basis = build_reduced_basis(snaps, cholesky_gram(ops), 150, ops.mesh_digest)
# keep every 100th state; the full history would not fit comfortably in memory
with watch.phase("solve_td_rb"):
    red = reduce_system(ops, basis, u0, u1).solve(cfg, store_every=100, store_derivatives=False)
with watch.phase("solve_td_hf"):
    full = newmark_solve(ops.mass, ops.stiffness, None, u0, u1, cfg, store_every=100, store_derivatives=False)

print(f"beta_opt {sel.beta_opt:.2f}, {snaps.n_solves} solves, rank {basis.rank}, R = {basis.R}")
rep = timing_report(watch.phases, n_solves=snaps.n_solves, n_steps=cfg.n_steps, R=basis.R, n_dofs=ops.n_dofs)
for name, seconds in rep.rows():
    print(f"  {name:13s} {seconds:8.2f} s")
print(f"speedup {rep.speedup:.2f}x; relative L2 error {reduced_relative_error(full, red, basis, ops):.2e}")
