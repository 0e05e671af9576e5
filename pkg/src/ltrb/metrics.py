"""Error metrics, singular-value reports and timing breakdowns."""

from __future__ import annotations

import math
import time
from contextlib import contextmanager
from dataclasses import dataclass, field, fields

import numpy as np

from .errors import InvalidArgument
from .fem import OperatorSet
from .newmark import Trajectory
from .pod import ReducedBasis

__all__ = [
    "relative_error",
    "reduced_relative_error",
    "singular_value_report",
    "TimingReport",
    "timing_report",
    "Stopwatch",
]

_NORMS = ("L2", "H10")


def _gram(ops: OperatorSet, norm: str):
    if norm == "L2":
        return ops.mass
    if norm == "H10":
        return ops.gram_h10
    raise InvalidArgument(f"norm must be one of {_NORMS}, got {norm!r}")


def _sq_norms(G, X):
    return np.einsum("ij,ij->i", X, (G @ X.T).T)


def relative_error(hf: Trajectory, rb: Trajectory, ops: OperatorSet, norm: str = "L2") -> float:
    """Time-discrete relative ``L^2(J; X)`` error over every stored step.

    Returns ``nan`` when the reference trajectory has zero norm.
    """
    G = _gram(ops, norm)
    if hf.displacements.shape != rb.displacements.shape or not np.array_equal(hf.times, rb.times):
        raise InvalidArgument("trajectories must share the time grid and dimension")
    den = float(np.sum(_sq_norms(G, hf.displacements)))
    num = float(np.sum(_sq_norms(G, hf.displacements - rb.displacements)))
    if den == 0.0:
        return math.nan
    return math.sqrt(max(num, 0.0) / den)


def reduced_relative_error(
    hf: Trajectory, traj_r: Trajectory, basis: ReducedBasis, ops: OperatorSet, norm: str = "L2", chunk: int = 512
) -> float:
    """Same as :func:`relative_error` but lifts the reduced states chunk by chunk."""
    G = _gram(ops, norm)
    if len(hf) != len(traj_r) or not np.array_equal(hf.times, traj_r.times):
        raise InvalidArgument("trajectories must share the time grid")
    phi = basis.phi[:, : traj_r.n_coords]
    num = den = 0.0
    for k in range(0, len(hf), chunk):
        H = hf.displacements[k : k + chunk]
        D = H - traj_r.displacements[k : k + chunk] @ phi.T
        num += float(np.sum(_sq_norms(G, D)))
        den += float(np.sum(_sq_norms(G, H)))
    if den == 0.0:
        return math.nan
    return math.sqrt(max(num, 0.0) / den)


def singular_value_report(basis: ReducedBasis) -> list[tuple[int, float, float]]:
    """``(j, sigma_j, sigma_j / sigma_1)`` for ``j = 1..rank``."""
    sig = basis.singular_values[: basis.rank]
    return [(j + 1, float(s), float(s / sig[0])) for j, s in enumerate(sig)]


@dataclass
class TimingReport:
    """Wall-clock phases in seconds. ``solve_td_hf=None`` means no baseline was run."""

    assemble_fem: float = 0.0
    laplace_hf: float = 0.0
    build_rb: float = 0.0
    solve_td_rb: float = 0.0
    solve_td_hf: float | None = None
    n_solves: int = 0
    n_steps: int = 0
    R: int = 0
    n_dofs: int = 0

    def __post_init__(self):
        for f in ("assemble_fem", "laplace_hf", "build_rb", "solve_td_rb", "solve_td_hf"):
            v = getattr(self, f)
            if v is not None and v < 0:
                raise InvalidArgument(f"{f} must be nonnegative, got {v}")

    @property
    def lt_rb_total(self) -> float:
        return self.assemble_fem + self.laplace_hf + self.build_rb + self.solve_td_rb

    @property
    def hf_total(self) -> float | None:
        return None if self.solve_td_hf is None else self.assemble_fem + self.solve_td_hf

    @property
    def speedup(self) -> float | None:
        hf, rb = self.hf_total, self.lt_rb_total
        if hf is None or hf <= 0 or rb <= 0:
            return None
        return hf / rb

    def rows(self) -> list[tuple[str, float]]:
        out = [
            ("assemble_fem", self.assemble_fem),
            ("laplace_hf", self.laplace_hf),
            ("build_rb", self.build_rb),
            ("solve_td_rb", self.solve_td_rb),
            ("lt_rb_total", self.lt_rb_total),
        ]
        if self.solve_td_hf is not None:
            out += [("solve_td_hf", self.solve_td_hf), ("hf_total", self.hf_total)]
        return out


def timing_report(phases: dict, **counts) -> TimingReport:
    """Build a report from a ``{phase: seconds}`` mapping; unknown phases are rejected."""
    names = {f.name for f in fields(TimingReport)}
    unknown = set(phases) - names
    if unknown:
        raise InvalidArgument(f"unknown timing phases {sorted(unknown)}")
    return TimingReport(**phases, **counts)


class Stopwatch:
    """Accumulates monotonic wall-clock time per named phase."""

    def __init__(self):
        self.phases: dict[str, float] = {}

    @contextmanager
    def phase(self, name: str):
        t0 = time.perf_counter()
        try:
            yield
        finally:
            self.phases[name] = self.phases.get(name, 0.0) + time.perf_counter() - t0
