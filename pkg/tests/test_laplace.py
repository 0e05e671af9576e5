import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy.integrate import quad

import ltrb.laplace as laplace_mod
from ltrb import (InvalidArgument, SeparableForcing, TimeProfile, compute_snapshots, make_quadrature,
                  solve_laplace)

from conftest import gaussian_ic, generalized_eigh, mesh_and_ops


def test_four_node_rule():
    rule = make_quadrature(5.0, 1.0, 4)
    assert rule.nodes[0] == pytest.approx(5 + 1j, abs=1e-15)
    assert rule.weights[0] == pytest.approx(math.pi / 2, rel=1e-15)
    assert rule.nodes[1] == 5.0 and rule.nodes[1].imag == 0.0
    assert rule.weights[1] == pytest.approx(math.pi / 4, rel=1e-15)
    assert rule.nodes[2] == np.conj(rule.nodes[0])
    assert rule.weights[3] == pytest.approx(math.pi / 4, rel=1e-15)
    assert rule.replaced_last and math.isnan(rule.nodes[3].real)
    np.testing.assert_allclose(rule.thetas, [math.pi / 2, math.pi, 3 * math.pi / 2, 2 * math.pi])


@settings(max_examples=60, deadline=None)
@given(st.floats(0.1, 50), st.floats(0.1, 1e3), st.integers(1, 400))
def test_rule_invariants(alpha, beta, half):
    m = 2 * half
    rule = make_quadrature(alpha, beta, m)
    regular = rule.nodes[:-1]
    assert np.all(rule.weights > 0)
    assert np.all(regular.real == alpha)
    for i in range(1, m // 2):
        assert rule.nodes[m - i - 1] == np.conj(rule.nodes[i - 1])
        assert rule.weights[m - i - 1] == rule.weights[i - 1]
    i = np.arange(1, m)
    theta = 2 * np.pi * i / m
    np.testing.assert_allclose(regular.imag, beta / np.tan(theta / 2), rtol=1e-12, atol=1e-12 * beta)
    np.testing.assert_allclose(rule.weights[:-1], np.pi * beta / (m * np.sin(theta / 2) ** 2), rtol=1e-12)
    assert rule.weights[-1] == pytest.approx(np.pi / (m * beta), rel=1e-15)


@pytest.mark.parametrize("m", [3, 7, 0, -2, 1])
def test_rule_rejects_bad_count(m):
    with pytest.raises(InvalidArgument):
        make_quadrature(5.0, 1.0, m)


def test_rule_rejects_nonpositive_parameters():
    with pytest.raises(InvalidArgument):
        make_quadrature(0.0, 1.0, 4)
    with pytest.raises(InvalidArgument):
        make_quadrature(1.0, -1.0, 4)


def test_zero_data_gives_zero():
    _, ops = mesh_and_ops(8)
    z = np.zeros(ops.n_dofs)
    assert not np.any(solve_laplace(ops, 5 + 3j, None, z, z))


def test_eigenvector_oracle():
    _, ops = mesh_and_ops(16)
    lam, vecs = generalized_eigh(ops)
    z = np.zeros(ops.n_dofs)
    for k in (0, 3, 50, 150, 224):
        v = vecs[:, k]
        for s in (5.0, 5 + 1j, 5 - 40j, 5 + 300j):
            u = solve_laplace(ops, s, None, v, z)
            assert np.linalg.norm(u - s / (s * s + lam[k]) * v) / np.linalg.norm(v) < 1e-10


def test_conjugate_symmetry():
    _, ops = mesh_and_ops(12)
    u0 = np.linspace(0, 1, ops.n_dofs)
    u1 = np.cos(np.arange(ops.n_dofs))
    s = 5 + 17.5j
    a = solve_laplace(ops, s, None, u0, u1)
    b = solve_laplace(ops, np.conj(s), None, u0, u1)
    np.testing.assert_allclose(b, np.conj(a), rtol=0, atol=1e-13 * np.abs(a).max())


def test_residual_on_quadrature_nodes():
    _, ops = mesh_and_ops(16)
    u0 = gaussian_ic(16)
    u1 = 0.5 * u0
    rule = make_quadrature(5.0, 120.0, 40)
    for s in rule.nodes[:-1]:
        u = solve_laplace(ops, s, None, u0, u1)
        rhs = s * (ops.mass @ u0) + ops.mass @ u1
        res = (s * s) * (ops.mass @ u) + ops.stiffness @ u - rhs
        assert np.linalg.norm(res) / np.linalg.norm(rhs) < 1e-10


def test_real_node_uses_real_arithmetic(monkeypatch):
    _, ops = mesh_and_ops(8)
    seen = []
    original = laplace_mod._solve_sparse

    def spy(mat, rhs):
        seen.append((mat.dtype, rhs.dtype))
        return original(mat, rhs)

    monkeypatch.setattr(laplace_mod, "_solve_sparse", spy)
    u0 = np.ones(ops.n_dofs)
    u = solve_laplace(ops, 5.0, None, u0, 0 * u0)
    assert seen == [(np.float64, np.float64)]
    assert u.dtype == complex and not np.any(u.imag)


def test_left_half_plane_rejected():
    _, ops = mesh_and_ops(4)
    z = np.zeros(ops.n_dofs)
    for s in (0.0, -1 + 2j, 1j):
        with pytest.raises(InvalidArgument):
            solve_laplace(ops, s, None, z, z)


def _counting(monkeypatch):
    calls = []
    original = laplace_mod._solve_sparse

    def counted(mat, rhs):
        calls.append(mat.dtype)
        return original(mat, rhs)

    monkeypatch.setattr(laplace_mod, "_solve_sparse", counted)
    return calls


def test_four_nodes_two_solves(monkeypatch):
    _, ops = mesh_and_ops(8)
    calls = _counting(monkeypatch)
    u0 = np.linspace(-1, 1, ops.n_dofs)
    snaps = compute_snapshots(ops, make_quadrature(5.0, 3.0, 4), u0, np.zeros_like(u0))
    assert snaps.n_solves == 2 and len(calls) == 2
    assert calls == [np.complex128, np.float64]
    assert np.array_equal(snaps.columns[:, 2], snaps.columns[:, 0])
    assert np.array_equal(snaps.columns[:, 3], u0)


def test_six_hundred_nodes_give_three_hundred_solves(monkeypatch):
    _, ops = mesh_and_ops(3)
    calls = _counting(monkeypatch)
    u0 = np.arange(1.0, ops.n_dofs + 1)
    snaps = compute_snapshots(ops, make_quadrature(5.0, 50.0, 600), u0, np.zeros_like(u0))
    assert snaps.n_solves == 300 and len(calls) == 300
    assert snaps.m == 600


def test_columns_match_individual_solves(monkeypatch):
    _, ops = mesh_and_ops(16)
    u0 = gaussian_ic(16)
    rule = make_quadrature(5.0, 60.0, 16)
    calls = _counting(monkeypatch)
    snaps = compute_snapshots(ops, rule, u0, np.zeros_like(u0))
    assert len(calls) == 8
    for j in range(rule.m - 1):
        col = solve_laplace(ops, rule.nodes[j], None, u0, np.zeros_like(u0)).real
        assert np.max(np.abs(snaps.columns[:, j] - col)) < 1e-12
    for j in range(rule.m // 2 - 1):
        assert np.array_equal(snaps.columns[:, j], snaps.columns[:, rule.mirror_of(j)])
    assert np.array_equal(snaps.columns[:, -1], u0)
    np.testing.assert_array_equal(snaps.weights, rule.weights)


def test_parallel_matches_serial():
    _, ops = mesh_and_ops(16)
    u0 = gaussian_ic(16)
    rule = make_quadrature(5.0, 60.0, 24)
    a = compute_snapshots(ops, rule, u0, np.zeros_like(u0))
    b = compute_snapshots(ops, rule, u0, np.zeros_like(u0), parallel=True, max_workers=4)
    assert np.array_equal(a.columns, b.columns)


def test_zero_data_snapshots_are_zero():
    _, ops = mesh_and_ops(6)
    z = np.zeros(ops.n_dofs)
    snaps = compute_snapshots(ops, make_quadrature(5.0, 10.0, 8), z, z)
    assert not np.any(snaps.columns)


def test_snapshot_shape_checked():
    _, ops = mesh_and_ops(6)
    with pytest.raises(InvalidArgument):
        compute_snapshots(ops, make_quadrature(5.0, 10.0, 4), np.zeros(3), np.zeros(3))


@pytest.mark.parametrize("profile", [TimeProfile("exp", 2.0), TimeProfile("sin", 3.0),
                                     TimeProfile("const"), TimeProfile("zero")])
@pytest.mark.parametrize("s", [1.5, 5 + 2j, 5 - 7j])
def test_profile_transforms_against_quadrature(profile, s):
    def part(fn):
        return quad(lambda t: fn(np.exp(-s * t) * profile(t)), 0, np.inf, limit=400)[0]

    numeric = part(np.real) + 1j * part(np.imag)
    assert profile.laplace(s) == pytest.approx(numeric, rel=1e-7, abs=1e-10)


def test_unknown_profile_rejected():
    with pytest.raises(InvalidArgument):
        TimeProfile("cosh", 1.0)
    with pytest.raises(InvalidArgument):
        TimeProfile("sin", 0.0)


def test_forced_eigenvector_oracle():
    # load g = M v, profile q: u_hat = (s c0 + c1 + q_hat(s)) / (s^2 + lam) v
    _, ops = mesh_and_ops(12)
    lam, vecs = generalized_eigh(ops)
    k = 5
    v = vecs[:, k]
    forcing = SeparableForcing(ops.mass @ v, TimeProfile("sin", 4.0))
    rule = make_quadrature(5.0, 80.0, 12)
    snaps = compute_snapshots(ops, rule, 0.5 * v, 2.0 * v, forcing)
    for j in range(rule.m - 1):
        s = rule.nodes[j]
        coef = (0.5 * s + 2.0 + forcing.profile.laplace(s)) / (s * s + lam[k])
        np.testing.assert_allclose(snaps.columns[:, j], (coef * v).real, atol=1e-12)


def test_callable_forcing_equivalent_to_separable():
    _, ops = mesh_and_ops(8)
    g = np.linspace(0.0, 1.0, ops.n_dofs)
    prof = TimeProfile("exp", 1.5)
    rule = make_quadrature(5.0, 30.0, 10)
    z = np.zeros(ops.n_dofs)
    a = compute_snapshots(ops, rule, z, z, SeparableForcing(g, prof))
    b = compute_snapshots(ops, rule, z, z, lambda s: prof.laplace(s) * g)
    assert np.array_equal(a.columns, b.columns)
    assert np.any(a.columns)
