"""Command-line driver: ``ltrb {full,offline,online,compare,quality,beta}``.

Exit codes: 0 ok, 2 configuration error, 3 numerical failure,
4 incompatible basis.
"""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

from . import io
from .config import RunConfig, load_config
from .errors import (ConfigError, IncompatibleBasis, InvalidArgument, InvalidMesh, InvalidOperator, LTRBError,
                     NumericalFailure)
from .mesh import mesh_quality
from .metrics import Stopwatch, reduced_relative_error, singular_value_report, timing_report
from .newmark import lift
from .pipeline import run_full, run_offline, run_online, select_beta, setup_problem

log = logging.getLogger("ltrb")

EXIT_OK, EXIT_CONFIG, EXIT_NUMERICAL, EXIT_INCOMPATIBLE = 0, 2, 3, 4


def _outdir(cfg: RunConfig) -> Path:
    out = Path(cfg["output.dir"])
    out.mkdir(parents=True, exist_ok=True)
    return out


def _write_timings(path, rows):
    io.write_csv(path, ["phase", "seconds"], rows)


def cmd_full(cfg: RunConfig, args) -> int:
    cfg.require("full")
    watch = Stopwatch()
    problem = setup_problem(cfg, watch)
    traj = run_full(problem, cfg, watch, store_derivatives=False)
    out = _outdir(cfg)
    if cfg["output.write_trajectory"]:
        io.write_trajectory_csv(out / "trajectory_full.csv", traj, cfg["output.trajectory_every"])
    _write_timings(out / "timings.csv", sorted(watch.phases.items()))
    log.info("Solve TD-HF: %.3f s", watch.phases["solve_td_hf"])
    return EXIT_OK


def cmd_offline(cfg: RunConfig, args) -> int:
    cfg.require("offline")
    watch = Stopwatch()
    problem = setup_problem(cfg, watch)
    with watch.phase("laplace_hf"):
        beta, sel = select_beta(problem, cfg)
    if sel is not None:
        print("\n".join(sel.lines()))
    basis, snaps = run_offline(problem, cfg, cfg["laplace.m"], cfg["pod.r"], beta, watch,
                               parallel=cfg["run.parallel_snapshots"])
    log.info("%d effective Laplace solves for M=%d", snaps.n_solves, cfg["laplace.m"])
    out = _outdir(cfg)
    io.save_basis(out / "basis.mtx", basis)
    io.write_csv(out / "singular_values.csv", ["j", "sigma", "ratio"], singular_value_report(basis))
    rep = timing_report(dict(watch.phases), n_solves=snaps.n_solves, R=basis.R, n_dofs=problem.ops.n_dofs)
    _write_timings(out / "timings.csv", rep.rows()[:3])
    return EXIT_OK


def cmd_online(cfg: RunConfig, args) -> int:
    cfg.require("online")
    watch = Stopwatch()
    problem = setup_problem(cfg, watch)
    out = _outdir(cfg)
    path = Path(args.basis) if args.basis else out / "basis.mtx"
    basis = io.load_basis(path, expect_hash=problem.ops.mesh_digest)
    R = min(cfg["pod.r"], basis.R)
    if R < basis.R:
        basis = basis.truncate(R)
    traj = run_online(problem, cfg, basis, watch, store_derivatives=False)
    every = cfg["output.trajectory_every"]
    io.write_trajectory_csv(out / "trajectory_reduced.csv", traj, every)
    if cfg["online.lift"]:
        io.write_trajectory_csv(out / "trajectory_lifted.csv", lift(basis, traj), every)
    _write_timings(out / "timings.csv", [("solve_td_rb", watch.phases["solve_td_rb"])])
    log.info("Solve TD-RB (R=%d, %d steps): %.3f s", basis.R, cfg["time.n_steps"], watch.phases["solve_td_rb"])
    return EXIT_OK


def cmd_compare(cfg: RunConfig, args) -> int:
    """Full run once, offline per M, online per (M, R); error and timing tables."""
    cfg.require("compare")
    out = _outdir(cfg)
    base = Stopwatch()
    problem = setup_problem(cfg, base)
    hf = run_full(problem, cfg, base, store_derivatives=False)
    beta_watch = Stopwatch()
    with beta_watch.phase("laplace_hf"):
        beta, _ = select_beta(problem, cfg)

    r_values = sorted(set(cfg["compare.r_values"]))
    summary, timing_rows, speed_rows = [], [], []
    for m in cfg["compare.m_values"]:
        watch = Stopwatch()
        watch.phases.update(beta_watch.phases)
        basis, snaps = run_offline(problem, cfg, m, max(r_values), beta, watch,
                                   parallel=cfg["run.parallel_snapshots"])
        rows = []
        for R in r_values:
            if R > basis.R:
                log.warning("M=%d: skipping R=%d above numerical rank %d", m, R, basis.R)
                continue
            sub = basis.truncate(R)
            run_watch = Stopwatch()
            traj = run_online(problem, cfg, sub, run_watch, store_derivatives=False)
            errs = [reduced_relative_error(hf, traj, sub, problem.ops, norm) for norm in ("L2", "H10")]
            rows.append((R, *errs))
            if R == min(max(r_values), basis.R):
                watch.phases["solve_td_rb"] = run_watch.phases["solve_td_rb"]
        io.write_csv(out / f"error_vs_R_M{m}.csv", ["R", "err_L2", "err_H10"], rows)
        io.write_csv(out / f"singular_values_M{m}.csv", ["j", "sigma", "ratio"], singular_value_report(basis))
        if rows:
            summary.append((m, *rows[-1]))
        rep = timing_report(
            {"assemble_fem": base.phases["assemble_fem"], "solve_td_hf": base.phases["solve_td_hf"],
             **{k: v for k, v in watch.phases.items()}},
            n_solves=snaps.n_solves, n_steps=cfg["time.n_steps"], R=rows[-1][0] if rows else 0,
            n_dofs=problem.ops.n_dofs,
        )
        timing_rows += [(f"M={m}/{name}", sec) for name, sec in rep.rows()]
        speed_rows.append((m, rep.R, rep.lt_rb_total, rep.hf_total, rep.speedup))
        log.info("M=%d: LT-RB %.3f s vs HF %.3f s, speedup %.2fx", m, rep.lt_rb_total, rep.hf_total, rep.speedup)
    io.write_csv(out / "error_vs_M.csv", ["M", "R", "err_L2", "err_H10"], summary)
    _write_timings(out / "timings.csv", timing_rows)
    io.write_csv(out / "speedup.csv", ["M", "R", "lt_rb_seconds", "hf_seconds", "speedup"], speed_rows)
    return EXIT_OK


def cmd_quality(cfg: RunConfig, args) -> int:
    cfg.require("quality")
    problem = setup_problem(cfg)
    print("\n".join(mesh_quality(problem.mesh).lines()))
    return EXIT_OK


def cmd_beta(cfg: RunConfig, args) -> int:
    cfg.require("beta")
    problem = setup_problem(cfg)
    _, sel = select_beta(problem, cfg.with_values(laplace__beta="auto"))
    print("\n".join(sel.lines()))
    return EXIT_OK


COMMANDS = {
    "full": cmd_full,
    "offline": cmd_offline,
    "online": cmd_online,
    "compare": cmd_compare,
    "quality": cmd_quality,
    "beta": cmd_beta,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="ltrb", description="Laplace-transform reduced basis for the 2D wave equation")
    sub = parser.add_subparsers(dest="command", required=True)
    for name, fn in COMMANDS.items():
        p = sub.add_parser(name, help=(fn.__doc__ or "").strip().splitlines()[0] if fn.__doc__ else None)
        p.add_argument("--config", required=True, help="path to a section.key = value config file")
        p.add_argument("--out", help="output directory (overrides output.dir)")
        p.add_argument("--parallel", action="store_true", help="solve Laplace nodes concurrently")
        p.add_argument("-v", "--verbose", action="store_true")
        if name == "online":
            p.add_argument("--basis", help="persisted basis (.mtx); defaults to <out>/basis.mtx")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s", stream=sys.stderr)
    try:
        cfg = load_config(args.config)
        if args.out:
            cfg = cfg.with_values(output__dir=args.out)
        if args.parallel:
            cfg = cfg.with_values(run__parallel_snapshots=True)
        return COMMANDS[args.command](cfg, args)
    except (ConfigError, InvalidArgument, InvalidMesh) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except IncompatibleBasis as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INCOMPATIBLE
    except (NumericalFailure, InvalidOperator, LTRBError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
