"""Laplace-domain sampling: quadrature nodes, the optimal beta and snapshots.

Run: python demos/02_laplace_snapshots.py
"""

import numpy as np

from ltrb import (build_structured_mesh, assemble_operators, compute_snapshots, gaussian_field, l2_project,
                  make_quadrature, max_generalized_eigenvalue, optimal_beta)

mesh = build_structured_mesh(24)
ops = assemble_operators(mesh)
u0 = l2_project(ops, mesh, gaussian_field((0.25, -0.1), 0.05))

# The sampling parameter comes from the largest eigenvalue of the
# stiffness/mass pencil; eta is the predicted per-dimension convergence factor.
power = max_generalized_eigenvalue(ops)
sel = optimal_beta(alpha=5.0, lambda_max=power.lambda_max)
print(f"power iteration: {power.iterations} steps")
print("\n".join(sel.lines()))

# Nodes sit on Re s = alpha and come in conjugate pairs; the middle node is
# real and the last one is replaced by the initial displacement.
rule = make_quadrature(5.0, sel.beta_opt, 8)
for i, (s, w) in enumerate(zip(rule.nodes, rule.weights), start=1):
    print(f"  i={i}  s={s:.4f}  w={w:.4f}")

# Only the first M/2 nodes are solved; the real parts at conjugate nodes agree.
snaps = compute_snapshots(ops, make_quadrature(5.0, sel.beta_opt, 200), u0, np.zeros_like(u0))
print(f"\nM={snaps.m}: {snaps.n_solves} linear solves, snapshot matrix {snaps.columns.shape}")
