"""Banded Cholesky factorization of sparse SPD matrices.

P1 matrices on structured meshes have bandwidth ~n in natural dof order, so
LAPACK's banded routines give an exact sparse Cholesky without a sparse
direct-solver dependency. For other meshes a reverse Cuthill-McKee ordering is
applied when it shrinks the band.
"""

from __future__ import annotations

import numpy as np
import scipy.linalg as la
import scipy.sparse as sp
from scipy.linalg import lapack
from scipy.sparse.csgraph import reverse_cuthill_mckee

from .errors import InvalidOperator

__all__ = ["CholeskyFactor", "bandwidth", "to_upper_banded"]


def bandwidth(mat: sp.spmatrix) -> int:
    coo = mat.tocoo()
    if coo.nnz == 0:
        return 0
    return int(np.max(np.abs(coo.row - coo.col)))


def to_upper_banded(mat: sp.spmatrix, u: int) -> np.ndarray:
    """LAPACK upper band storage: ``ab[u + i - j, j] = A[i, j]`` for ``i <= j``."""
    coo = sp.triu(mat).tocoo()
    n = mat.shape[0]
    ab = np.zeros((u + 1, n), dtype=mat.dtype)
    ab[u + coo.row - coo.col, coo.col] = coo.data
    return ab


class CholeskyFactor:
    """Factor ``B = R^T R`` of a sparse SPD matrix.

    ``R = U P`` where ``U`` is upper triangular in a bandwidth-reducing order
    and ``P`` the corresponding permutation; in natural order (the structured
    mesh case) ``R`` is itself upper triangular. Either way ``R`` is an
    invertible square factor, which is all the weighted POD needs.
    """

    def __init__(self, mat: sp.spmatrix, reorder: bool | None = None):
        mat = sp.csr_matrix(mat)
        n = mat.shape[0]
        if mat.shape != (n, n):
            raise InvalidOperator(f"matrix must be square, got {mat.shape}")
        perm = None
        band = bandwidth(mat)
        if reorder is None or reorder:
            p = reverse_cuthill_mckee(mat, symmetric_mode=True)
            pb = bandwidth(mat[p][:, p])
            # keep natural order (true upper-triangular R) unless RCM clearly helps
            if reorder or pb < 0.8 * band:
                perm, band = np.asarray(p), pb
                mat = mat[perm][:, perm]
        self.n = n
        self.perm = perm
        self.u = band
        ab = to_upper_banded(mat, band)
        try:
            cb = la.cholesky_banded(ab, lower=False, check_finite=True)
        except la.LinAlgError as exc:
            raise InvalidOperator(f"Cholesky factorization failed: {exc}") from exc
        self.banded = cb
        self._dia = sp.dia_matrix((cb, np.arange(band, -1, -1)), shape=(n, n)).tocsr()

    # permutation helpers: x in natural order <-> permuted order
    def _fwd(self, x):
        return x if self.perm is None else x[self.perm]

    def _bwd(self, x):
        if self.perm is None:
            return x
        out = np.empty_like(x)
        out[self.perm] = x
        return out

    def _tbtrs(self, b, trans):
        b = np.asarray(b)
        dtype = np.result_type(b.dtype, np.float64)
        routine = lapack.ztbtrs if np.iscomplexobj(b) else lapack.dtbtrs
        ab = self.banded.astype(dtype, copy=False)
        vec = b.ndim == 1
        rhs = np.asfortranarray(b.reshape(self.n, -1).astype(dtype, copy=False))
        x, info = routine(ab, rhs, uplo="U", trans=trans, diag="N")
        if info != 0:
            raise InvalidOperator(f"triangular solve failed (info={info})")
        return x[:, 0] if vec else x

    def apply_r(self, x: np.ndarray) -> np.ndarray:
        """``R @ x``."""
        return self._dia @ self._fwd(x)

    def apply_rt(self, y: np.ndarray) -> np.ndarray:
        """``R^T @ y``."""
        return self._bwd(self._dia.T @ y)

    def solve_r(self, y: np.ndarray) -> np.ndarray:
        """``R^{-1} @ y``."""
        return self._bwd(self._tbtrs(y, trans="N"))

    def solve_rt(self, x: np.ndarray) -> np.ndarray:
        """``R^{-T} @ x``."""
        return self._tbtrs(self._fwd(x), trans="T")

    def solve(self, b: np.ndarray) -> np.ndarray:
        """``B^{-1} @ b``."""
        return self.solve_r(self.solve_rt(b))

    def r_matrix(self) -> sp.csr_matrix:
        """``R`` as an explicit sparse matrix in natural dof order."""
        if self.perm is None:
            return self._dia.copy()
        eye = sp.identity(self.n, format="csr")
        return (self._dia @ eye[self.perm]).tocsr()
