"""Meshes, finite-element operators and the Gaussian initial condition.

Run: python demos/01_mesh_and_operators.py
"""

import numpy as np

from ltrb import assemble_operators, build_structured_mesh, gaussian_field, l2_project, mesh_quality
from ltrb.fem import QUAD_DEGREE5

# A structured mesh splits every grid cell along the same diagonal. Boundary
# vertices carry the homogeneous Dirichlet condition and are eliminated, so an
# n x n grid has (n - 1)^2 unknowns.
for n in (8, 32, 122):
    mesh = build_structured_mesh(n)
    q = mesh_quality(mesh)
    print(f"n={n:4d}  dofs={q.n_dofs:6d}  triangles={q.n_triangles:6d}  h={q.h:.4e}  "
          f"gamma={q.gamma:.4f}  c_qu={q.c_qu:.1f}")

# Mass, stiffness and H^1_0 Gram matrices share one sparsity pattern; the
# stiffness is the Gram matrix scaled by c^2.
mesh = build_structured_mesh(32)
ops = assemble_operators(mesh, c=1.5)
print("\nnonzeros per operator:", ops.mass.nnz, ops.stiffness.nnz, ops.gram_h10.nnz)
print("max |A - c^2 B| =", abs(ops.stiffness - 1.5**2 * ops.gram_h10).max())

# The initial displacement is the L^2 projection of a narrow Gaussian. The
# production three-point rule is compared with a degree-5 rule.
bump = gaussian_field(x0=(0.25, -0.1), zeta=0.05)
u0 = l2_project(ops, mesh, bump)
u0_ref = l2_project(ops, mesh, bump, QUAD_DEGREE5)
print("\npeak of projected bump:", u0.max())
print("3-point vs 7-point relative difference:", np.linalg.norm(u0 - u0_ref) / np.linalg.norm(u0_ref))
