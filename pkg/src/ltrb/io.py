"""Persistence: Matrix Market matrices with JSON sidecars, and CSV tables."""

from __future__ import annotations

import csv
import json
from pathlib import Path

import numpy as np
import scipy.io
import scipy.sparse as sp

from .errors import IncompatibleBasis, InvalidArgument
from .laplace import SnapshotSet, make_quadrature
from .newmark import Trajectory
from .pod import ReducedBasis

__all__ = [
    "write_matrix",
    "read_matrix",
    "save_basis",
    "load_basis",
    "save_snapshots",
    "load_snapshots",
    "write_csv",
    "write_trajectory_csv",
    "save_trajectory",
    "load_trajectory",
]


def _fmt(x) -> str:
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    return repr(float(x))


def write_matrix(path, mat) -> None:
    """Matrix Market: coordinate format for sparse input, array format for dense."""
    path = Path(path)
    if sp.issparse(mat):
        scipy.io.mmwrite(path, sp.coo_matrix(mat), symmetry="general", precision=17)
    else:
        scipy.io.mmwrite(path, np.atleast_2d(np.asarray(mat, dtype=float)), precision=17)


def read_matrix(path):
    return scipy.io.mmread(Path(path))


def _sidecar(path) -> Path:
    return Path(path).with_suffix(".json")


def save_basis(path, basis: ReducedBasis) -> None:
    """``<path>.mtx`` holds Phi (dense array), ``<path>.json`` the metadata."""
    path = Path(path).with_suffix(".mtx")
    write_matrix(path, basis.phi)
    meta = {
        "kind": "reduced_basis",
        "R": basis.R,
        "rank": basis.rank,
        "truncated": basis.truncated,
        "mesh_hash": basis.b_gram_hash,
        "singular_values": [float(s) for s in basis.singular_values],
        **(basis.meta or {}),
    }
    _sidecar(path).write_text(json.dumps(meta, indent=1, sort_keys=True))


def load_basis(path, expect_hash: str | None = None) -> ReducedBasis:
    path = Path(path).with_suffix(".mtx")
    meta = json.loads(_sidecar(path).read_text())
    if meta.get("kind") != "reduced_basis":
        raise InvalidArgument(f"{path} is not a reduced basis")
    if expect_hash is not None and meta["mesh_hash"] != expect_hash:
        raise IncompatibleBasis(f"{path} was built on a different mesh")
    phi = np.asarray(read_matrix(path), dtype=float)
    extra = {k: v for k, v in meta.items()
             if k not in ("kind", "R", "rank", "truncated", "mesh_hash", "singular_values")}
    return ReducedBasis(
        phi=phi,
        singular_values=np.asarray(meta["singular_values"], dtype=float),
        rank=int(meta["rank"]),
        b_gram_hash=meta["mesh_hash"],
        truncated=bool(meta["truncated"]),
        meta=extra,
    )


def save_snapshots(path, snaps: SnapshotSet, **meta) -> None:
    path = Path(path).with_suffix(".mtx")
    write_matrix(path, snaps.columns)
    rule = snaps.rule
    info = {
        "kind": "snapshots",
        "alpha": rule.alpha,
        "beta": rule.beta,
        "M": rule.m,
        "n_solves": snaps.n_solves,
        **meta,
    }
    _sidecar(path).write_text(json.dumps(info, indent=1, sort_keys=True))


def load_snapshots(path) -> tuple[SnapshotSet, dict]:
    path = Path(path).with_suffix(".mtx")
    info = json.loads(_sidecar(path).read_text())
    if info.get("kind") != "snapshots":
        raise InvalidArgument(f"{path} is not a snapshot set")
    rule = make_quadrature(info["alpha"], info["beta"], info["M"])
    cols = np.asarray(read_matrix(path), dtype=float)
    return SnapshotSet(cols, rule.weights.copy(), rule, int(info["n_solves"])), info


def write_csv(path, header, rows) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([v if isinstance(v, str) else _fmt(v) for v in row])


def write_trajectory_csv(path, traj: Trajectory, every: int = 1) -> None:
    """Columns ``t, dof_0..`` for full trajectories, ``t, q_0..`` for reduced ones."""
    prefix = "q" if traj.space == "reduced" else "dof"
    header = ["t"] + [f"{prefix}_{i}" for i in range(traj.n_coords)]
    idx = list(range(0, len(traj), every))
    if idx[-1] != len(traj) - 1:
        idx.append(len(traj) - 1)
    with open(path, "w", newline="") as fh:
        fh.write(",".join(header) + "\n")
        for k in idx:
            fh.write(",".join([_fmt(traj.times[k])] + [repr(v) for v in traj.displacements[k].tolist()]) + "\n")


def save_trajectory(path, traj: Trajectory) -> None:
    """Lossless binary dump (``.npz``)."""
    arrays = {"times": traj.times, "displacements": traj.displacements, "space": np.array(traj.space)}
    if traj.velocities is not None:
        arrays["velocities"] = traj.velocities
    if traj.accelerations is not None:
        arrays["accelerations"] = traj.accelerations
    np.savez(Path(path), **arrays)


def load_trajectory(path) -> Trajectory:
    with np.load(Path(path)) as data:
        return Trajectory(
            data["times"],
            data["displacements"],
            data["velocities"] if "velocities" in data else None,
            data["accelerations"] if "accelerations" in data else None,
            str(data["space"]),
        )
