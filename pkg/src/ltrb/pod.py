"""Weighted POD in the H^1_0 inner product.

The weighted snapshot matrix ``R S D^{1/2}`` (``B = R^T R``) is decomposed by
a thin SVD; left singular vectors mapped back through ``R^{-1}`` form a
``B``-orthonormal basis that is optimal for the weighted projection error.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg as la

from .errors import InvalidArgument
from .fem import OperatorSet
from .laplace import SnapshotSet
from .linalg import CholeskyFactor

__all__ = [
    "RANK_TOL",
    "ReducedBasis",
    "cholesky_gram",
    "build_reduced_basis",
    "pod_projection_error",
]

RANK_TOL = 1e-12


@dataclass(frozen=True)
class ReducedBasis:
    """``B``-orthonormal reduced basis.

    Attributes
    ----------
    phi : (N_h, R) ndarray
    singular_values : ndarray
        Every singular value of the weighted snapshot matrix, nonincreasing.
    rank : int
        Number of singular values above ``RANK_TOL * sigma_1``.
    b_gram_hash : str
        Digest of the mesh whose Gram matrix defined the orthonormality.
    truncated : bool
        True when more vectors were requested than the numerical rank allows.
    meta : dict
        Free-form provenance (alpha, beta, m, c, ...), persisted alongside.
    """

    phi: np.ndarray
    singular_values: np.ndarray
    rank: int
    b_gram_hash: str
    truncated: bool = False
    meta: dict | None = None

    @property
    def R(self) -> int:
        return self.phi.shape[1]

    @property
    def n_dofs(self) -> int:
        return self.phi.shape[0]

    def tail(self, R: int) -> float:
        """``sum_{j > R} sigma_j^2`` over the numerical rank."""
        return float(np.sum(self.singular_values[R : self.rank] ** 2))

    def truncate(self, R: int) -> "ReducedBasis":
        if not 1 <= R <= self.R:
            raise InvalidArgument(f"cannot truncate a basis of size {self.R} to {R}")
        return ReducedBasis(self.phi[:, :R], self.singular_values, self.rank, self.b_gram_hash, False, self.meta)


def cholesky_gram(ops: OperatorSet) -> CholeskyFactor:
    """Factor ``B_h = R_h^T R_h``; raises ``InvalidOperator`` if ``B_h`` is not SPD."""
    return CholeskyFactor(ops.gram_h10)


def build_reduced_basis(
    snaps: SnapshotSet,
    factor: CholeskyFactor,
    R: int,
    b_gram_hash: str = "",
    rank_tol: float = RANK_TOL,
    meta: dict | None = None,
) -> ReducedBasis:
    if int(R) != R or R < 1:
        raise InvalidArgument(f"reduced dimension must be a positive integer, got {R}")
    S = np.asarray(snaps.columns, dtype=float)
    if S.ndim != 2 or S.shape[1] == 0:
        raise InvalidArgument("empty snapshot set")
    weights = np.asarray(snaps.weights, dtype=float)
    if weights.shape != (S.shape[1],) or np.any(weights <= 0):
        raise InvalidArgument("need one strictly positive weight per snapshot")

    weighted = factor.apply_r(S * np.sqrt(weights)[None, :])
    try:
        U, sigma, _ = la.svd(weighted, full_matrices=False, lapack_driver="gesdd")
    except la.LinAlgError:
        U, sigma, _ = la.svd(weighted, full_matrices=False, lapack_driver="gesvd")

    rank = int(np.sum(sigma > sigma[0] * rank_tol)) if sigma[0] > 0 else 0
    if rank == 0:
        raise InvalidArgument("snapshot set is numerically zero")
    keep = min(int(R), rank)
    phi = factor.solve_r(np.ascontiguousarray(U[:, :keep]))
    return ReducedBasis(
        phi=np.asarray(phi),
        singular_values=sigma,
        rank=rank,
        b_gram_hash=b_gram_hash,
        truncated=keep < R,
        meta=dict(meta or {}),
    )


def pod_projection_error(basis: ReducedBasis, snaps: SnapshotSet, ops: OperatorSet, R: int) -> float:
    """``sum_j w_j |s_j - Phi_R Phi_R^T B s_j|_B^2``, evaluated directly with ``B``."""
    if int(R) != R or not 1 <= R <= basis.R:
        raise InvalidArgument(f"R must lie in [1, {basis.R}], got {R}")
    S = snaps.columns
    if S.shape[0] != basis.n_dofs:
        raise InvalidArgument(f"snapshots have {S.shape[0]} rows, basis has {basis.n_dofs}")
    B = ops.gram_h10
    phi = basis.phi[:, :R]
    E = S - phi @ (phi.T @ (B @ S))
    per_column = np.einsum("ij,ij->j", E, B @ E)
    return float(per_column @ snaps.weights)
