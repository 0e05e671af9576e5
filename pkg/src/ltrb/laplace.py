"""Laplace-domain snapshots.

Nodes lie on the vertical line ``Re s = alpha`` and come from the trapezoidal
rule on the circle pulled back through ``s = alpha + i beta cot(theta/2)``.
The rule is conjugate-symmetric, so only the upper half of the nodes needs a
linear solve; the real parts of the mirrored solutions coincide.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable

import numpy as np
import scipy.sparse.linalg as spla

from .errors import InvalidArgument, NumericalFailure
from .fem import OperatorSet

__all__ = [
    "QuadratureRule",
    "SnapshotSet",
    "TimeProfile",
    "SeparableForcing",
    "make_quadrature",
    "solve_laplace",
    "compute_snapshots",
]


@dataclass(frozen=True)
class QuadratureRule:
    """Nodes ``s_i`` and weights ``w_i``, ``i = 1..m`` (stored 0-based).

    With ``replaced_last`` the final entry does not correspond to a Laplace
    node: its weight is ``pi / (m beta)`` and its snapshot is the initial
    displacement. ``nodes[-1]`` is then ``nan``.
    """

    alpha: float
    beta: float
    m: int
    nodes: np.ndarray
    weights: np.ndarray
    thetas: np.ndarray
    replaced_last: bool = True

    def solved_indices(self) -> np.ndarray:
        """0-based indices of the nodes that need a linear solve."""
        return np.arange(self.m // 2)

    def mirror_of(self, j: int) -> int:
        """0-based index of the conjugate partner of node ``j``."""
        return self.m - 2 - j


def make_quadrature(alpha: float, beta: float, m: int) -> QuadratureRule:
    if not alpha > 0 or not beta > 0:
        raise InvalidArgument(f"alpha and beta must be positive, got {alpha}, {beta}")
    if int(m) != m or m < 2 or m % 2:
        raise InvalidArgument(f"node count must be an even integer >= 2, got {m}")
    m = int(m)
    half = m // 2
    i = np.arange(1, m + 1)
    thetas = 2.0 * np.pi * i / m

    nodes = np.empty(m, dtype=complex)
    weights = np.empty(m)
    k = np.arange(1, half + 1)
    half_angle = np.pi * k / m
    cot = np.cos(half_angle) / np.sin(half_angle)
    cot[-1] = 0.0  # theta = pi: the real node s = alpha
    nodes[:half] = alpha + 1j * beta * cot
    weights[:half] = np.pi * beta / (m * np.sin(half_angle) ** 2)
    weights[half - 1] = np.pi * beta / m
    # i -> m - i is conjugation; fill by mirroring so the symmetry is exact
    nodes[half : m - 1] = np.conj(nodes[: half - 1][::-1])
    weights[half : m - 1] = weights[: half - 1][::-1]
    nodes[m - 1] = np.nan
    weights[m - 1] = np.pi / (m * beta)
    return QuadratureRule(float(alpha), float(beta), m, nodes, weights, thetas, True)


# -- forcing -----------------------------------------------------------------

_PROFILES = ("zero", "exp", "sin", "const")


@dataclass(frozen=True)
class TimeProfile:
    """Temporal factor ``q(t)`` with a closed-form Laplace transform.

    ``zero``: 0; ``exp``: ``exp(-a t)``; ``sin``: ``sin(a t)``; ``const``: 1.
    """

    kind: str = "zero"
    a: float = 0.0

    def __post_init__(self):
        if self.kind not in _PROFILES:
            raise InvalidArgument(f"unknown time profile {self.kind!r}; choose from {_PROFILES}")
        if self.kind == "sin" and not self.a > 0:
            raise InvalidArgument("sin profile needs a positive angular frequency")

    def __call__(self, t: float) -> float:
        if self.kind == "zero":
            return 0.0
        if self.kind == "exp":
            return float(np.exp(-self.a * t))
        if self.kind == "sin":
            return float(np.sin(self.a * t))
        return 1.0

    def laplace(self, s: complex) -> complex:
        if self.kind == "zero":
            return 0.0
        if self.kind == "exp":
            return 1.0 / (s + self.a)
        if self.kind == "sin":
            return self.a / (s * s + self.a * self.a)
        return 1.0 / s


@dataclass(frozen=True)
class SeparableForcing:
    """``f(x, t) = g(x) q(t)`` given the assembled load vector of ``g``."""

    spatial: np.ndarray
    profile: TimeProfile

    def load(self, t: float) -> np.ndarray:
        return self.profile(t) * self.spatial

    def laplace_load(self, s: complex) -> np.ndarray:
        return self.profile.laplace(s) * self.spatial

    @property
    def is_zero(self) -> bool:
        return self.profile.kind == "zero" or not np.any(self.spatial)


# -- solves ------------------------------------------------------------------


# Residual above which the diagonal-pivot factorization is redone with
# partial pivoting.
_RESIDUAL_RETRY = 1e-10


def _solve_sparse(mat, rhs):
    # s^2 M + A is complex symmetric with imaginary part 2 Re(s) Im(s) M, which
    # is definite off the real axis; diagonal pivots are then safe and keep the
    # symmetric fill of the minimum-degree ordering. Partial pivoting on these
    # indefinite-real-part matrices can inflate the fill by two orders of magnitude.
    csc = mat.tocsc()
    lu = spla.splu(csc, permc_spec="MMD_AT_PLUS_A", diag_pivot_thresh=0.0,
                   options=dict(SymmetricMode=True))
    x = lu.solve(rhs)
    res = np.linalg.norm(csc @ x - rhs) / np.linalg.norm(rhs)
    if not res <= _RESIDUAL_RETRY:
        x = spla.splu(csc, permc_spec="MMD_AT_PLUS_A").solve(rhs)
    return x


def solve_laplace(ops: OperatorSet, s: complex, f_hat_s, u0h, u1h) -> np.ndarray:
    """Solve ``(s^2 M + A) u = f_hat(s) + s M u0 + M u1`` for the complex dof vector."""
    s = complex(s)
    if not s.real > 0:
        raise InvalidArgument(f"Laplace node must lie in the right half-plane, got {s}")
    M, A = ops.mass, ops.stiffness
    rhs = (s.real if s.imag == 0.0 else s) * (M @ u0h) + M @ u1h
    if f_hat_s is not None:
        rhs = rhs + f_hat_s
    if s.imag == 0.0 and not np.any(np.imag(rhs)):
        # real node with real data: identical solution in real arithmetic
        mat = (s.real * s.real) * M + A
        rhs = np.real(rhs).astype(float)
    else:
        mat = (s * s) * M + A
        rhs = np.asarray(rhs, dtype=complex)
    if not np.any(rhs):
        return np.zeros(ops.n_dofs, dtype=complex)
    try:
        x = _solve_sparse(mat, rhs)
    except RuntimeError as exc:  # SuperLU reports singular factors this way
        raise NumericalFailure(f"Laplace solve failed at s={s}: {exc}") from exc
    if not np.all(np.isfinite(x)):
        raise NumericalFailure(f"Laplace solve at s={s} produced non-finite values")
    return x.astype(complex, copy=False)


@dataclass(frozen=True)
class SnapshotSet:
    """Real parts of Laplace-domain solutions, one column per quadrature node."""

    columns: np.ndarray
    weights: np.ndarray
    rule: QuadratureRule
    n_solves: int

    @property
    def m(self) -> int:
        return self.columns.shape[1]


def compute_snapshots(
    ops: OperatorSet,
    rule: QuadratureRule,
    u0h: np.ndarray,
    u1h: np.ndarray,
    forcing: SeparableForcing | Callable[[complex], np.ndarray] | None = None,
    parallel: bool = False,
    max_workers: int | None = None,
) -> SnapshotSet:
    """Snapshot matrix for ``rule`` using ``m/2`` solves.

    ``forcing`` is either a :class:`SeparableForcing` or a callable returning
    the Laplace-transformed load vector at a node.
    """
    if isinstance(forcing, SeparableForcing):
        f_hat = None if forcing.is_zero else forcing.laplace_load
    else:
        f_hat = forcing

    u0h = np.asarray(u0h, dtype=float)
    u1h = np.asarray(u1h, dtype=float)
    n = ops.n_dofs
    if u0h.shape != (n,) or u1h.shape != (n,):
        raise InvalidArgument(f"initial data must have length {n}")

    def solve(j):
        s = rule.nodes[j]
        try:
            return solve_laplace(ops, s, None if f_hat is None else f_hat(s), u0h, u1h).real
        except NumericalFailure as exc:
            raise NumericalFailure(f"node {j + 1} (s={s}): {exc}") from exc

    todo = rule.solved_indices()
    if parallel and len(todo) > 1:
        with ThreadPoolExecutor(max_workers=max_workers) as pool:
            results = list(pool.map(solve, todo))
    else:
        results = [solve(j) for j in todo]

    S = np.empty((n, rule.m))
    for j, col in zip(todo, results):
        S[:, j] = col
    for j in todo[:-1]:
        S[:, rule.mirror_of(j)] = S[:, j]
    if rule.replaced_last:
        S[:, rule.m - 1] = u0h
    if not np.all(np.isfinite(S)):
        raise NumericalFailure("snapshot matrix contains non-finite entries")
    return SnapshotSet(columns=S, weights=rule.weights.copy(), rule=rule, n_solves=len(todo))
