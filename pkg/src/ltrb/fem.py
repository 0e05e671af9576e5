"""P1 finite-element operators on interior degrees of freedom.

Dirichlet conditions are imposed by eliminating boundary vertices, so every
matrix and vector here is indexed by ``Mesh.interior_index``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp

from .errors import InvalidArgument, InvalidMesh, NumericalFailure
from .mesh import Mesh, triangle_geometry

__all__ = [
    "OperatorSet",
    "QUAD_MIDPOINT",
    "QUAD_DEGREE5",
    "assemble_operators",
    "assemble_full",
    "local_stiffness",
    "gaussian_field",
    "load_vector",
    "l2_project",
]

# (barycentric coordinates, weights summing to 1)
QUAD_MIDPOINT = (
    np.array([[0.5, 0.5, 0.0], [0.0, 0.5, 0.5], [0.5, 0.0, 0.5]]),
    np.full(3, 1.0 / 3.0),
)


def _degree5_rule():
    r = np.sqrt(15.0)
    b1, b2 = (6.0 + r) / 21.0, (6.0 - r) / 21.0
    a1, a2 = 1.0 - 2.0 * b1, 1.0 - 2.0 * b2
    w1, w2 = (155.0 + r) / 1200.0, (155.0 - r) / 1200.0
    pts = [
        [1 / 3, 1 / 3, 1 / 3],
        [a1, b1, b1], [b1, a1, b1], [b1, b1, a1],
        [a2, b2, b2], [b2, a2, b2], [b2, b2, a2],
    ]
    return np.array(pts), np.array([9.0 / 40.0, w1, w1, w1, w2, w2, w2])


QUAD_DEGREE5 = _degree5_rule()


@dataclass(frozen=True)
class OperatorSet:
    """Mass, stiffness and H^1_0 Gram matrices over interior dofs.

    ``stiffness == c**2 * gram_h10`` entrywise, and all three share one
    sparsity pattern.
    """

    mass: sp.csr_matrix
    stiffness: sp.csr_matrix
    gram_h10: sp.csr_matrix
    c: float
    mesh_digest: str

    @property
    def n_dofs(self) -> int:
        return self.mass.shape[0]


def local_stiffness(points: np.ndarray) -> np.ndarray:
    """Element gradient Gram matrices ``int_K grad phi_a . grad phi_b``.

    ``points`` has shape ``(T, 3, 2)``; returns ``(T, 3, 3)``.
    """
    d1 = points[:, 1] - points[:, 0]
    d2 = points[:, 2] - points[:, 0]
    det = d1[:, 0] * d2[:, 1] - d1[:, 1] * d2[:, 0]
    # rows of inv(J)^T applied to reference gradients (-1,-1), (1,0), (0,1)
    gx = np.stack([points[:, 1, 1] - points[:, 2, 1],
                   points[:, 2, 1] - points[:, 0, 1],
                   points[:, 0, 1] - points[:, 1, 1]], axis=1) / det[:, None]
    gy = np.stack([points[:, 2, 0] - points[:, 1, 0],
                   points[:, 0, 0] - points[:, 2, 0],
                   points[:, 1, 0] - points[:, 0, 0]], axis=1) / det[:, None]
    area = 0.5 * det
    return area[:, None, None] * (gx[:, :, None] * gx[:, None, :] + gy[:, :, None] * gy[:, None, :])


def _check_areas(area):
    if np.any(area <= 0.0):
        bad = int(np.flatnonzero(area <= 0.0)[0])
        raise InvalidMesh(f"triangle {bad} is degenerate or clockwise")


def assemble_full(mesh: Mesh):
    """Mass and gradient-Gram matrices over *all* vertices (no Dirichlet)."""
    area, _, points = triangle_geometry(mesh)
    _check_areas(area)
    local_mass = (area / 12.0)[:, None, None] * (np.ones((3, 3)) + np.eye(3))
    local_grad = local_stiffness(points)

    t = mesh.triangles
    rows = np.repeat(t, 3, axis=1).ravel()
    cols = np.tile(t, (1, 3)).ravel()
    shape = (mesh.n_vertices, mesh.n_vertices)
    mass = _symmetric_csr(local_mass.ravel(), rows, cols, shape)
    grad = _symmetric_csr(local_grad.ravel(), rows, cols, shape)
    return mass, grad


def _symmetric_csr(data, rows, cols, shape) -> sp.csr_matrix:
    # built from the same (rows, cols) for every operator so patterns coincide;
    # arithmetic on .data keeps structural zeros that sparse binops would drop
    mat = sp.coo_matrix((data, (rows, cols)), shape=shape).tocsr()
    mat.sum_duplicates()
    mat.sort_indices()
    tr = mat.T.tocsr()
    tr.sort_indices()
    assert np.array_equal(mat.indptr, tr.indptr) and np.array_equal(mat.indices, tr.indices)
    mat.data = 0.5 * (mat.data + tr.data)
    return mat


def _restrict(mat: sp.csr_matrix, keep: np.ndarray) -> sp.csr_matrix:
    out = mat[keep][:, keep].tocsr()
    out.sort_indices()
    return out


def assemble_operators(mesh: Mesh, c: float = 1.0) -> OperatorSet:
    """Exact P1 mass, stiffness (``c**2`` times the gradient Gram) and H^1_0 Gram."""
    if not c > 0:
        raise InvalidArgument(f"wave speed must be positive, got c={c}")
    mass_full, grad_full = assemble_full(mesh)
    keep = mesh.interior_vertices
    mass = _restrict(mass_full, keep)
    gram = _restrict(grad_full, keep)
    stiffness = gram.copy()
    stiffness.data *= float(c) ** 2
    return OperatorSet(mass=mass, stiffness=stiffness, gram_h10=gram, c=float(c), mesh_digest=mesh.digest())


class gaussian_field:
    """``x -> exp(-|x - x0|^2 / zeta^2)``, vectorized over coordinate arrays."""

    def __init__(self, x0=(0.25, -0.1), zeta: float = 0.05):
        if not zeta > 0:
            raise InvalidArgument(f"zeta must be positive, got {zeta}")
        self.x0 = (float(x0[0]), float(x0[1]))
        self.zeta = float(zeta)

    def __call__(self, x, y):
        r2 = (np.asarray(x) - self.x0[0]) ** 2 + (np.asarray(y) - self.x0[1]) ** 2
        return np.exp(-r2 / self.zeta**2)

    def __repr__(self):
        return f"gaussian_field(x0={self.x0}, zeta={self.zeta})"


def _load_full(mesh: Mesh, g, rule) -> np.ndarray:
    bary, weights = rule
    area, _, points = triangle_geometry(mesh)
    _check_areas(area)
    # quadrature points (T, Q, 2)
    qp = np.einsum("qa,tad->tqd", bary, points)
    gv = np.broadcast_to(np.asarray(g(qp[..., 0], qp[..., 1]), dtype=float), qp.shape[:2])
    local = area[:, None] * np.einsum("tq,q,qa->ta", gv, weights, bary)
    return np.bincount(mesh.triangles.ravel(), weights=local.ravel(), minlength=mesh.n_vertices)


def load_vector(mesh: Mesh, g, rule=QUAD_MIDPOINT) -> np.ndarray:
    """``b_i = int g phi_i`` over interior dofs, by per-triangle quadrature."""
    return _load_full(mesh, g, rule)[mesh.interior_vertices]


def l2_project(ops: OperatorSet, mesh: Mesh, g, rule=QUAD_MIDPOINT) -> np.ndarray:
    """Coefficients of the L^2 projection of ``g`` onto the P1 space with zero trace."""
    from scipy.sparse.linalg import spsolve

    b = load_vector(mesh, g, rule)
    if not np.any(b):
        return np.zeros(ops.n_dofs)
    x = spsolve(ops.mass.tocsc(), b)
    if not np.all(np.isfinite(x)):
        raise NumericalFailure("mass-matrix solve produced non-finite values")
    return x
