"""Command-line entry points: simulation runs and verification suites.

Every subcommand prints a short report, writes ``summary.json`` (one record
per check) into the output directory and exits 0 iff every check passed.
Usage errors exit 2; configuration errors exit 3.
"""
from __future__ import annotations

import argparse
import sys
from pathlib import Path

from . import verify
from .config import Config, ConfigError, config_from_dict, parse_config, write_config
from .evolution import simulate
from .forms import build_operators
from .initial import build_initial
from .mesh import build_mesh
from .mms import TRILINEAR_FIELDS, convergence_study
from .output import check_record, write_energy_csv, write_summary, write_vtk_snapshot
from .vonkarman import VkConfig

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_CONFIG = 0, 1, 2, 3


def _common(parser: argparse.ArgumentParser):
    parser.add_argument("--config", type=Path, help="JSON configuration file")
    parser.add_argument("--out-dir", type=Path, help="output directory (overrides output.dir)")
    parser.add_argument("--seed", type=int, help="random seed (overrides ic.seed)")
    parser.add_argument("--threads", type=int, default=0,
                        help="assembly threads; 0 is deterministic single-threaded")
    parser.add_argument("--n-plane", type=int, help="in-plane cells (overrides mesh.n_plane)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="poroplate", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", metavar="command")

    p = sub.add_parser("simulate", help="implicit Euler run with an energy audit")
    _common(p)
    p.add_argument("--dt", type=float, help="time step (overrides run.dt)")
    p.add_argument("--steps", type=int, help="number of steps (overrides run.steps)")
    p.add_argument("--nonlinear", action="store_true", help="switch on the von Karman plate force")

    p = sub.add_parser("resolvent", help="unit-shift resolvent solves: contraction check")
    _common(p)
    p.add_argument("--count", type=int, default=1, help="number of random data vectors")

    p = sub.add_parser("infsup", help="Stokes inf-sup sweep, Taylor-Hood and equal-order control")
    _common(p)
    p.add_argument("--sizes", type=int, nargs="+", default=[2, 4, 8], help="n_plane values of the sweep")

    p = sub.add_parser("coercivity", help="smallest eigenvalue of sym(A) against the Gram matrix")
    _common(p)

    p = sub.add_parser("mms", help="manufactured-solution convergence table")
    _common(p)
    p.add_argument("--sizes", type=int, nargs="+", default=[2, 4, 8], help="n_plane values of the study")
    p.add_argument("--min-order", type=float, default=1.8, help="required order for trilinear fields")

    p = sub.add_parser("vk-verify", help="bracket, Airy and potential checks")
    _common(p)
    return parser


def _load_config(args) -> Config:
    cfg = parse_config(args.config) if args.config else Config()
    if args.out_dir is not None:
        cfg = cfg.replace("output", dir=str(args.out_dir))
    if args.seed is not None:
        cfg = cfg.replace("ic", seed=args.seed)
    if args.n_plane is not None:
        cfg = cfg.replace("mesh", n_plane=args.n_plane)
    if getattr(args, "dt", None) is not None:
        cfg = cfg.replace("run", dt=args.dt)
    if getattr(args, "steps", None) is not None:
        cfg = cfg.replace("run", steps=args.steps)
    if getattr(args, "nonlinear", False):
        cfg = cfg.replace("run", nonlinear=True)
    # re-validate the overridden values through the same path as a file
    return config_from_dict(cfg.to_dict())


def _operators(cfg: Config, threads: int):
    m = cfg.mesh
    mesh = build_mesh(m.n_plane, m.nz_b, m.nz_f, m.ns_p, m.h_p)
    return build_operators(mesh, cfg.params, threads)


def _finish(records, out_dir: Path, command: str) -> int:
    path = write_summary(records, out_dir / "summary.json")
    failed = [r for r in records if not r["pass"]]
    for r in records:
        print(f"  {'PASS' if r['pass'] else 'FAIL'}  {r['name']}: {r['value']} (tolerance {r['tolerance']})")
    if failed:
        print(f"{command}: {len(failed)} check(s) failed: {', '.join(r['name'] for r in failed)}; see {path}",
              file=sys.stderr)
        return EXIT_FAIL
    print(f"{command}: all {len(records)} checks passed; summary in {path}")
    return EXIT_OK


def cmd_simulate(cfg: Config, threads: int) -> list:
    ops = _operators(cfg, threads)
    out = Path(cfg.output.dir)
    init = build_initial(ops, cfg.ic.name, cfg.ic.seed, cfg.ic.amplitude, cfg.ic.modes)
    vk = VkConfig(picard_tol=cfg.run.picard_tol, picard_max=cfg.run.picard_max) if cfg.run.nonlinear else None
    snapshots = "vtk" in cfg.output.formats and cfg.output.stride > 0

    def on_step(n, state, report):
        if snapshots and n % cfg.output.stride == 0:
            write_vtk_snapshot(ops, state, out / f"step_{n:06d}")

    if snapshots:
        write_vtk_snapshot(ops, init, out / "step_000000")
    traj = simulate(ops, init, cfg.run.dt, cfg.run.steps, vk=vk, on_step=on_step)
    write_config(cfg, out / "config.json")
    if "csv" in cfg.output.formats:
        write_energy_csv(traj.reports, out / "energy.csv")
    records = verify.energy_run_checks(ops, traj)
    if vk is not None and traj.ok:
        records += verify.nonlinear_energy_checks(ops, traj, vk)
    if traj.reports:
        last = traj.reports[-1]
        print(f"simulate: {len(traj.reports)} steps, t={last.t:.6g}, E={last.E:.12g}"
              + (f", E+2Pi={last.E_total:.12g}" if vk is not None else ""))
    return records


def cmd_resolvent(cfg: Config, threads: int, count: int) -> list:
    ops = _operators(cfg, threads)
    records = verify.resolvent_checks(ops, count=count, seed=cfg.ic.seed)
    print(f"resolvent: max ||y||_X / ||F||_X = {records[0]['max_ratio']:.12g} over {count} solve(s)")
    return records


def cmd_infsup(sizes) -> list:
    sweep = verify.infsup_sweep(tuple(sizes))
    print(verify.format_infsup(sweep))
    return verify.infsup_checks(sweep)


def cmd_coercivity(cfg: Config, threads: int) -> list:
    ops = _operators(cfg, threads)
    return [verify.coercivity_check(ops)] + verify.skew_check(ops, seed=cfg.ic.seed)


def cmd_mms(cfg: Config, threads: int, sizes, min_order: float) -> list:
    table = convergence_study(tuple(sizes), cfg.params, cfg.mesh.h_p, threads)
    print(table.format())
    order = table.min_order()
    return [check_record("mms_min_order", order, min_order, order >= min_order, fields=list(TRILINEAR_FIELDS),
                         errors={f: e for f, e in table.errors.items()})]


def cmd_vk_verify(cfg: Config) -> list:
    mesh = build_mesh(cfg.mesh.n_plane, 1, 1, 1, cfg.mesh.h_p)
    records = verify.bracket_checks(mesh, cfg.ic.seed) + verify.vk_checks(mesh, cfg.ic.seed)
    airy = verify.airy_mms()
    worst = min(airy["orders"])
    records.append(check_record("airy_h2_order", worst, 1.8, worst >= 1.8, errors=airy["errors"]))
    return records


def run_cli(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:  # argparse exits 2 on usage errors, 0 on --help
        return int(exc.code or 0)
    if args.command is None:
        parser.print_usage(sys.stderr)
        print("poroplate: error: a command is required", file=sys.stderr)
        return EXIT_USAGE
    try:
        cfg = _load_config(args)
    except ConfigError as exc:
        print(f"poroplate: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    out = Path(cfg.output.dir)
    try:
        if args.command == "simulate":
            records = cmd_simulate(cfg, args.threads)
        elif args.command == "resolvent":
            records = cmd_resolvent(cfg, args.threads, args.count)
        elif args.command == "infsup":
            records = cmd_infsup(args.sizes)
        elif args.command == "coercivity":
            records = cmd_coercivity(cfg, args.threads)
        elif args.command == "mms":
            records = cmd_mms(cfg, args.threads, args.sizes, args.min_order)
        else:
            records = cmd_vk_verify(cfg)
    except Exception as exc:
        records = [check_record(f"{args.command}_error", f"{type(exc).__name__}: {exc}", None, False)]
    return _finish(records, out, args.command)


def main() -> None:
    sys.exit(run_cli())


__all__ = ["build_parser", "main", "run_cli"]
