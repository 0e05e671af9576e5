"""Implicit Newmark time stepping and Galerkin reduction onto a POD basis."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np
import scipy.linalg as la
import scipy.sparse as sp

from .errors import IncompatibleBasis, InvalidArgument, InvalidOperator, NumericalFailure
from .fem import OperatorSet
from .linalg import CholeskyFactor
from .pod import ReducedBasis

__all__ = [
    "NewmarkConfig",
    "Trajectory",
    "ReducedSystem",
    "newmark_solve",
    "reduce_system",
    "lift",
    "energy",
]


@dataclass(frozen=True)
class NewmarkConfig:
    t_final: float
    n_steps: int
    gamma: float = 0.5
    beta: float = 0.25

    def __post_init__(self):
        if not self.t_final > 0:
            raise InvalidArgument(f"t_final must be positive, got {self.t_final}")
        if int(self.n_steps) != self.n_steps or self.n_steps < 1:
            raise InvalidArgument(f"n_steps must be a positive integer, got {self.n_steps}")
        if not self.beta > 0:
            raise InvalidArgument("implicit Newmark needs beta > 0")

    @property
    def dt(self) -> float:
        return self.t_final / self.n_steps


@dataclass
class Trajectory:
    """States on a uniform time grid; row ``k`` belongs to ``times[k]``.

    With ``store_every > 1`` only every ``store_every``-th step (plus the final
    one) is kept.
    """

    times: np.ndarray
    displacements: np.ndarray
    velocities: np.ndarray | None
    accelerations: np.ndarray | None
    space: str = "full"

    def __len__(self):
        return len(self.times)

    @property
    def n_coords(self) -> int:
        return self.displacements.shape[1]


class _Solver:
    """Prefactored SPD solve for sparse (banded Cholesky) or dense matrices."""

    def __init__(self, mat):
        if sp.issparse(mat):
            self._f = CholeskyFactor(mat)
            self.solve = self._f.solve
        else:
            try:
                cf = la.cho_factor(np.asarray(mat, dtype=float))
            except la.LinAlgError as exc:
                raise NumericalFailure(f"Newmark factorization failed: {exc}") from exc
            self.solve = lambda b: la.cho_solve(cf, b, check_finite=False)


def _factor(mat):
    try:
        return _Solver(mat)
    except InvalidOperator as exc:
        raise NumericalFailure(f"Newmark factorization failed: {exc}") from exc


def newmark_solve(
    mass,
    stiffness,
    load: Callable[[float], np.ndarray] | None,
    u0: np.ndarray,
    v0: np.ndarray,
    cfg: NewmarkConfig,
    store_every: int = 1,
    store_derivatives: bool = True,
    space: str = "full",
) -> Trajectory:
    """Integrate ``M u'' + K u = f(t)`` from ``u(0)=u0, u'(0)=v0``.

    ``mass``/``stiffness`` may be scipy sparse or dense arrays. The initial
    acceleration solves ``M a0 = f(0) - K u0``; each step then solves with
    the effective matrix ``M + beta dt^2 K``, factored once.
    """
    n = mass.shape[0]
    u = np.array(u0, dtype=float)
    v = np.array(v0, dtype=float)
    if u.shape != (n,) or v.shape != (n,) or stiffness.shape != (n, n):
        raise InvalidArgument("dimension mismatch between operators and initial data")
    if int(store_every) != store_every or store_every < 1:
        raise InvalidArgument("store_every must be a positive integer")

    dt, beta, gamma, N = cfg.dt, cfg.beta, cfg.gamma, cfg.n_steps
    K = stiffness
    force = (lambda t: load(t)) if load is not None else None

    rhs0 = -(K @ u)
    if force is not None:
        rhs0 = rhs0 + force(0.0)
    a = _factor(mass).solve(rhs0) if np.any(rhs0) else np.zeros(n)
    effective = _factor(mass + (beta * dt * dt) * K)

    steps = list(range(0, N + 1, store_every))
    if steps[-1] != N:
        steps.append(N)
    nstore = len(steps)
    U = np.empty((nstore, n))
    V = np.empty((nstore, n)) if store_derivatives else None
    A = np.empty((nstore, n)) if store_derivatives else None

    def record(k, u, v, a):
        U[k] = u
        if store_derivatives:
            V[k] = v
            A[k] = a

    record(0, u, v, a)
    slot = 1
    c1 = (0.5 - beta) * dt * dt
    c2 = (1.0 - gamma) * dt
    c3 = beta * dt * dt
    c4 = gamma * dt
    for step in range(1, N + 1):
        u_pred = u + dt * v + c1 * a
        v_pred = v + c2 * a
        rhs = -(K @ u_pred)
        if force is not None:
            rhs += force(step * dt)
        a = effective.solve(rhs)
        u = u_pred + c3 * a
        v = v_pred + c4 * a
        if slot < nstore and steps[slot] == step:
            record(slot, u, v, a)
            slot += 1
    if not np.all(np.isfinite(u)):
        raise NumericalFailure("Newmark iteration produced non-finite values")
    times = np.asarray(steps, dtype=float) * dt
    times[-1] = cfg.t_final
    return Trajectory(times, U, V, A, space)


def energy(traj: Trajectory, mass, stiffness) -> np.ndarray:
    """Discrete energy ``1/2 v^T M v + 1/2 u^T K u`` at every stored time."""
    if traj.velocities is None:
        raise InvalidArgument("trajectory was recorded without velocities")
    U, V = traj.displacements, traj.velocities
    kin = np.einsum("ij,ij->i", V, (mass @ V.T).T)
    pot = np.einsum("ij,ij->i", U, (stiffness @ U.T).T)
    return 0.5 * (kin + pot)


@dataclass(frozen=True)
class ReducedSystem:
    mass_r: np.ndarray
    stiffness_r: np.ndarray
    u0_r: np.ndarray
    u1_r: np.ndarray
    load_r: Callable[[float], np.ndarray] | None
    c: float

    @property
    def R(self) -> int:
        return self.mass_r.shape[0]

    def solve(self, cfg: NewmarkConfig, **kwargs) -> Trajectory:
        return newmark_solve(self.mass_r, self.stiffness_r, self.load_r, self.u0_r, self.u1_r, cfg,
                             space="reduced", **kwargs)


def reduce_system(
    ops: OperatorSet,
    basis: ReducedBasis,
    u0h: np.ndarray,
    u1h: np.ndarray,
    load: Callable[[float], np.ndarray] | None = None,
) -> ReducedSystem:
    """Galerkin projection onto ``span(Phi)``.

    The reduced stiffness is set to ``c^2 I``, which holds exactly for a
    ``B``-orthonormal basis.
    """
    if basis.b_gram_hash and basis.b_gram_hash != ops.mesh_digest:
        raise IncompatibleBasis("basis was built on a different mesh")
    if basis.n_dofs != ops.n_dofs:
        raise IncompatibleBasis(f"basis has {basis.n_dofs} rows, operators have {ops.n_dofs} dofs")
    phi = basis.phi
    Mr = phi.T @ (ops.mass @ phi)
    Mr = 0.5 * (Mr + Mr.T)
    Kr = (ops.c**2) * np.eye(basis.R)
    B = ops.gram_h10
    u0r = phi.T @ (B @ u0h)
    u1r = phi.T @ (B @ u1h)
    load_r = None if load is None else (lambda t: phi.T @ load(t))
    return ReducedSystem(Mr, Kr, u0r, u1r, load_r, ops.c)


def lift(basis: ReducedBasis, traj: Trajectory) -> Trajectory:
    """Map reduced coefficients back to dof coordinates."""
    if traj.n_coords != basis.R:
        raise InvalidArgument(f"trajectory has {traj.n_coords} coordinates, basis has {basis.R}")
    phi_t = basis.phi.T

    def up(X):
        return None if X is None else X @ phi_t

    return Trajectory(traj.times.copy(), up(traj.displacements), up(traj.velocities),
                      up(traj.accelerations), "full")
