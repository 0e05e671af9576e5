import numpy as np
import pytest
import scipy.sparse as sp
from hypothesis import given, settings, strategies as st

from ltrb import (InvalidArgument, InvalidOperator, build_reduced_basis, cholesky_gram, compute_snapshots,
                  make_quadrature, pod_projection_error)
from ltrb.laplace import SnapshotSet
from ltrb.linalg import CholeskyFactor

from conftest import gaussian_ic, mesh_and_ops


def snapshot_set(columns, weights):
    columns = np.asarray(columns, dtype=float)
    rule = make_quadrature(5.0, 1.0, 2)
    return SnapshotSet(columns, np.asarray(weights, dtype=float), rule, 0)


def orthogonality_defect(basis, ops):
    phi = basis.phi
    return np.max(np.abs(phi.T @ (ops.gram_h10 @ phi) - np.eye(basis.R)))


def test_cholesky_scalar():
    f = CholeskyFactor(sp.csr_matrix([[4.0]]))
    assert f.r_matrix().toarray().tolist() == [[2.0]]


def test_cholesky_identity():
    f = CholeskyFactor(sp.identity(7, format="csr"))
    np.testing.assert_array_equal(f.r_matrix().toarray(), np.eye(7))


def test_cholesky_reconstructs_gram():
    _, ops = mesh_and_ops(16)
    f = cholesky_gram(ops)
    R = f.r_matrix()
    assert f.perm is None
    assert sp.triu(R).nnz == R.nnz  # upper triangular in natural order
    assert abs(R.T @ R - ops.gram_h10).max() < 1e-12


def test_cholesky_reordered_factor():
    _, ops = mesh_and_ops(9)
    rng = np.random.default_rng(3)
    p = rng.permutation(ops.n_dofs)
    B = ops.gram_h10[p][:, p].tocsr()
    f = CholeskyFactor(B, reorder=True)
    R = f.r_matrix()
    assert abs(R.T @ R - B).max() < 1e-12
    x = rng.standard_normal(ops.n_dofs)
    np.testing.assert_allclose(f.solve(B @ x), x, rtol=1e-10)
    np.testing.assert_allclose(f.solve_r(f.apply_r(x)), x, rtol=1e-10)
    np.testing.assert_allclose(f.apply_rt(f.solve_rt(x)), x, rtol=1e-10)


def test_cholesky_rejects_indefinite():
    with pytest.raises(InvalidOperator):
        CholeskyFactor(sp.csr_matrix(np.array([[1.0, 2.0], [2.0, 1.0]])))


def test_rank_one_snapshot():
    _, ops = mesh_and_ops(10)
    v = gaussian_ic(10).copy()
    w = 0.37
    basis = build_reduced_basis(snapshot_set(v[:, None], [w]), cholesky_gram(ops), 1)
    norm_b = np.sqrt(v @ (ops.gram_h10 @ v))
    assert basis.rank == 1 and basis.R == 1
    phi = basis.phi[:, 0] * np.sign(basis.phi[:, 0] @ v)
    np.testing.assert_allclose(phi, v / norm_b, rtol=1e-12, atol=1e-14)
    assert basis.singular_values[0] == pytest.approx(np.sqrt(w) * norm_b, rel=1e-13)


def test_orthogonal_pair_projection_error():
    _, ops = mesh_and_ops(8)
    _, vecs = np.linalg.eigh(ops.gram_h10.toarray())
    v1, v2 = 3.0 * vecs[:, -1], vecs[:, 5]
    B = ops.gram_h10
    assert abs(v1 @ (B @ v2)) < 1e-12
    w1, w2 = 2.0, 0.5
    snaps = snapshot_set(np.column_stack([v1, v2]), [w1, w2])
    basis = build_reduced_basis(snaps, cholesky_gram(ops), 1)
    expected = w2 * (v2 @ (B @ v2))
    assert pod_projection_error(basis, snaps, ops, 1) == pytest.approx(expected, rel=1e-10)
    assert basis.tail(1) == pytest.approx(expected, rel=1e-10)


def test_duplicated_columns_keep_rank():
    _, ops = mesh_and_ops(8)
    rng = np.random.default_rng(0)
    base = rng.standard_normal((ops.n_dofs, 3))
    dup = np.column_stack([base, base[:, 0], base[:, 1]])
    factor = cholesky_gram(ops)
    a = build_reduced_basis(snapshot_set(base, np.ones(3)), factor, 5)
    b = build_reduced_basis(snapshot_set(dup, np.ones(5)), factor, 5)
    assert a.rank == b.rank == 3
    assert a.truncated and b.truncated and b.R == 3


@settings(max_examples=20, deadline=None)
@given(st.integers(0, 2**32 - 1), st.integers(2, 30))
def test_eckart_young_on_random_sets(seed, m):
    _, ops = mesh_and_ops(8)
    rng = np.random.default_rng(seed)
    S = rng.standard_normal((ops.n_dofs, m))
    w = rng.uniform(0.1, 3.0, m)
    snaps = snapshot_set(S, w)
    basis = build_reduced_basis(snaps, cholesky_gram(ops), m)
    assert orthogonality_defect(basis, ops) < 1e-10
    prev = np.inf
    for R in range(1, basis.rank):
        err = pod_projection_error(basis, snaps, ops, R)
        assert err == pytest.approx(basis.tail(R), rel=1e-8)
        assert err <= prev * (1 + 1e-12)
        prev = err
    total = float(np.einsum("ij,ij->j", S, ops.gram_h10 @ S) @ w)
    assert pod_projection_error(basis, snaps, ops, basis.rank) <= 1e-16 * total * 100


@pytest.fixture(scope="module")
def laplace_basis():
    _, ops = mesh_and_ops(16)
    u0 = gaussian_ic(16)
    snaps = compute_snapshots(ops, make_quadrature(5.0, 60.0, 200), u0, np.zeros_like(u0))
    return ops, snaps, build_reduced_basis(snaps, cholesky_gram(ops), 200)


def test_laplace_basis_properties(laplace_basis):
    ops, snaps, basis = laplace_basis
    assert basis.truncated and basis.R == basis.rank <= min(ops.n_dofs, snaps.m)
    assert orthogonality_defect(basis, ops) < 1e-10
    sig = basis.singular_values
    assert np.all(np.diff(sig) <= 0)
    assert np.all(sig[: basis.rank] > 1e-12 * sig[0])
    assert np.all(sig[basis.rank :] <= 1e-12 * sig[0])


def test_laplace_basis_eckart_young_sweep(laplace_basis):
    ops, snaps, basis = laplace_basis
    prev = np.inf
    for R in (1, 2, 5, 10, 20, 30, 40):
        err = pod_projection_error(basis, snaps, ops, R)
        assert err == pytest.approx(basis.tail(R), rel=1e-8)
        assert err <= prev
        prev = err


def test_truncation(laplace_basis):
    ops, _, basis = laplace_basis
    sub = basis.truncate(7)
    assert sub.R == 7 and not sub.truncated
    np.testing.assert_array_equal(sub.phi, basis.phi[:, :7])
    with pytest.raises(InvalidArgument):
        basis.truncate(0)
    with pytest.raises(InvalidArgument):
        basis.truncate(basis.R + 1)


def test_invalid_requests():
    _, ops = mesh_and_ops(4)
    f = cholesky_gram(ops)
    with pytest.raises(InvalidArgument):
        build_reduced_basis(snapshot_set(np.ones((ops.n_dofs, 1)), [1.0]), f, 0)
    with pytest.raises(InvalidArgument):
        build_reduced_basis(snapshot_set(np.ones((ops.n_dofs, 0)), []), f, 1)
    with pytest.raises(InvalidArgument):
        build_reduced_basis(snapshot_set(np.zeros((ops.n_dofs, 2)), [1.0, 1.0]), f, 1)
    basis = build_reduced_basis(snapshot_set(np.ones((ops.n_dofs, 1)), [1.0]), f, 1)
    with pytest.raises(InvalidArgument):
        pod_projection_error(basis, snapshot_set(np.ones((ops.n_dofs, 1)), [1.0]), ops, 2)
