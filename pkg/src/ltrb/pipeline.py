"""End-to-end LT-RB workflow shared by the command line and the demos."""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np

from .config import RunConfig
from .fem import OperatorSet, assemble_operators, gaussian_field, l2_project, load_vector
from .laplace import SeparableForcing, SnapshotSet, TimeProfile, compute_snapshots, make_quadrature
from .mesh import Mesh, build_structured_mesh, read_mesh
from .metrics import Stopwatch
from .newmark import NewmarkConfig, Trajectory, newmark_solve, reduce_system
from .pod import ReducedBasis, build_reduced_basis, cholesky_gram
from .spectral import BetaSelection, max_generalized_eigenvalue, optimal_beta

log = logging.getLogger(__name__)

__all__ = ["Problem", "setup_problem", "select_beta", "run_full", "run_offline", "run_online", "newmark_config"]


@dataclass
class Problem:
    mesh: Mesh
    ops: OperatorSet
    u0h: np.ndarray
    u1h: np.ndarray
    forcing: SeparableForcing | None

    @property
    def load(self):
        return None if self.forcing is None else self.forcing.load


def setup_problem(cfg: RunConfig, watch: Stopwatch | None = None) -> Problem:
    """Mesh, operators and projected data; timed as ``assemble_fem``."""
    watch = watch or Stopwatch()
    with watch.phase("assemble_fem"):
        if cfg.get("mesh.file"):
            mesh = read_mesh(cfg["mesh.file"])
        else:
            mesh = build_structured_mesh(cfg["mesh.n"], cfg["mesh.domain"])
        ops = assemble_operators(mesh, cfg["physics.c"])
        bump = l2_project(ops, mesh, gaussian_field(cfg["ic.x0"], cfg["ic.zeta"]))
        u0h = bump if cfg["ic.u0"] == "gaussian" else np.zeros(ops.n_dofs)
        if cfg["ic.u1"] == "gaussian":
            u1h = cfg["ic.u1_amplitude"] * bump
        else:
            u1h = np.zeros(ops.n_dofs)
        forcing = None
        if cfg["forcing.kind"] != "zero":
            g = gaussian_field(cfg["forcing.x0"], cfg["forcing.zeta"])
            spatial = cfg["forcing.amplitude"] * load_vector(mesh, g)
            forcing = SeparableForcing(spatial, TimeProfile(cfg["forcing.kind"], cfg["forcing.a"]))
    log.info("mesh: %d triangles, %d dofs, h=%.4e", mesh.n_triangles, ops.n_dofs, mesh.h)
    return Problem(mesh, ops, u0h, u1h, forcing)


def newmark_config(cfg: RunConfig) -> NewmarkConfig:
    return NewmarkConfig(cfg["time.t_final"], cfg["time.n_steps"], cfg["time.gamma"], cfg["time.beta"])


def select_beta(problem: Problem, cfg: RunConfig) -> tuple[float, BetaSelection | None]:
    """Sampling parameter: the configured value, or the optimal one when ``auto``."""
    beta = cfg["laplace.beta"]
    if beta != "auto":
        return float(beta), None
    res = max_generalized_eigenvalue(problem.ops, cfg["laplace.power_tol"], cfg["laplace.power_max_iter"])
    sel = optimal_beta(cfg["laplace.alpha"], res.lambda_max)
    log.info("lambda_max=%.10g (%d iterations), beta_opt=%.10g, eta=%.6g",
             sel.lambda_max, res.iterations, sel.beta_opt, sel.eta)
    return sel.beta_opt, sel


def run_full(problem: Problem, cfg: RunConfig, watch: Stopwatch | None = None, **kwargs) -> Trajectory:
    watch = watch or Stopwatch()
    kwargs.setdefault("store_every", cfg["time.store_every"])
    with watch.phase("solve_td_hf"):
        return newmark_solve(problem.ops.mass, problem.ops.stiffness, problem.load,
                             problem.u0h, problem.u1h, newmark_config(cfg), **kwargs)


def run_offline(
    problem: Problem,
    cfg: RunConfig,
    m: int,
    r: int,
    beta: float,
    watch: Stopwatch | None = None,
    parallel: bool = False,
) -> tuple[ReducedBasis, SnapshotSet]:
    """Snapshots at ``m`` nodes (``laplace_hf``) then a basis of size ``r`` (``build_rb``)."""
    watch = watch or Stopwatch()
    alpha = cfg["laplace.alpha"]
    with watch.phase("laplace_hf"):
        rule = make_quadrature(alpha, beta, m)
        snaps = compute_snapshots(problem.ops, rule, problem.u0h, problem.u1h, problem.forcing, parallel=parallel)
    with watch.phase("build_rb"):
        meta = {"alpha": alpha, "beta": beta, "M": m, "c": problem.ops.c}
        basis = build_reduced_basis(snaps, cholesky_gram(problem.ops), r, problem.ops.mesh_digest, meta=meta)
    if basis.truncated:
        log.warning("requested R=%d exceeds numerical rank %d; kept %d vectors", r, basis.rank, basis.R)
    return basis, snaps


def run_online(problem: Problem, cfg: RunConfig, basis: ReducedBasis, watch: Stopwatch | None = None,
               **kwargs) -> Trajectory:
    watch = watch or Stopwatch()
    kwargs.setdefault("store_every", cfg["time.store_every"])
    with watch.phase("solve_td_rb"):
        system = reduce_system(problem.ops, basis, problem.u0h, problem.u1h, problem.load)
        return system.solve(newmark_config(cfg), **kwargs)
