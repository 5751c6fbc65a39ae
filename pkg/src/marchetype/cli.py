"""Command-line front end.

Sub-commands: gen, compile, solve, oracle, compare, toy, count, rerun.
Every command that writes files also writes a run manifest next to them.

Exit codes: 0 success, 1 I/O or input-format error, 2 usage error,
3 non-optimal solve, 4 oracle size guard.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
import time
import uuid
from dataclasses import replace
from pathlib import Path
from typing import Any

from . import __version__
from .bench import (
    MANIFEST_NAME,
    RunManifest,
    collapse_sweep,
    compare_policies,
    load_manifest,
    oracle_backend,
    pdhg_backend,
    verify_outputs,
    write_manifest,
    write_sweep,
)
from .config import load_config
from .datagen import (
    GenConfig,
    default_constraint_menu,
    generate_instance,
    save_hierarchy,
    subsample_instance,
)
from .logging import JSONLLogger, configure_logger, default_log_dir, get_logger
from .lp import LPFormatError, load_lp, save_lp, save_mps
from .oracle import OracleError, SizeGuardError, densify, simplex_solve, vertex_enumerate
from .solver import (
    ConvergenceLogger,
    KKTResiduals,
    RestartReason,
    SolverError,
    SolveStatus,
    ToyConfig,
    run_toy,
    solve,
    write_trajectories,
)
from .sparse import SparseFormatError
from .targeting import (
    MenuShape,
    TargetingError,
    compile_interdependent,
    compile_ipwc,
    compile_spwc,
    constraint_count,
    load_instance,
    load_menu,
    load_pair_profits,
    save_instance,
    save_menu,
    synergy_pair_profits,
)


logger = logging.getLogger(__name__)


EXIT_OK = 0
EXIT_IO = 1
EXIT_USAGE = 2
EXIT_NONOPTIMAL = 3
EXIT_GUARD = 4

INPUT_ERRORS = (
    OSError,
    LPFormatError,
    SparseFormatError,
    SolverError,
    TargetingError,
    ValueError,
)


FAMILY_TITLES = {
    "volume1": "Volume I",
    "volume2": "Volume II",
    "similarity1": "Similarity I",
    "similarity2": "Similarity II",
    "targeting": "Targeting",
    "linking": "Linking",
}


class UsageError(Exception):
    """Flag combination that argparse cannot express."""

    pass


def _jsonl() -> JSONLLogger | None:
    try:
        return get_logger()
    except OSError:
        return None


def _manifest_for(output: Path) -> Path:
    return output.with_name(output.name + ".manifest.json")


def _new_manifest(args: argparse.Namespace, argv: list[str]) -> RunManifest:
    return RunManifest(command=args.command, argv=list(argv), version=__version__)


def _print_counts(counts: dict[str, int]) -> None:
    print(f"{'Constraint family':<20} {'Rows':>12}")
    print("-" * 33)
    for family, rows in counts.items():
        print(f"{FAMILY_TITLES.get(family, family):<20} {rows:>12,}")
    print("-" * 33)
    print(f"{'Total':<20} {sum(counts.values()):>12,}")


def _parse_floats(text: str, name: str) -> list[float]:
    try:
        return [float(part) for part in text.split(",") if part.strip()]
    except ValueError as e:
        raise UsageError(f"{name}: expected comma-separated numbers, got {text!r}") from e


def cmd_gen(args: argparse.Namespace, argv: list[str]) -> int:
    """Generate an instance, its default menu and the segment hierarchy."""
    branching = tuple(int(b) for b in _parse_floats(args.branching, "--branching"))
    try:
        config = GenConfig(
            n_customers=args.customers,
            n_actions=args.actions,
            zip_depth=args.depth,
            branching=branching,
            response_rate=args.response_rate,
            profit_mean_hit=args.hit,
            profit_mean_miss=args.miss,
            max_actions=args.max_actions,
            profit_decimals=args.profit_decimals,
            seed=args.seed,
        )
    except ValueError as e:
        raise UsageError(str(e)) from e
    if args.subsample is not None and not 0 < args.subsample <= 1:
        raise UsageError("--subsample must lie in (0, 1]")

    instance = generate_instance(config)
    if args.subsample is not None:
        instance = subsample_instance(instance, args.subsample, seed=args.seed)
    hierarchy = config.hierarchy()
    menu = default_constraint_menu(instance, hierarchy)

    out: Path = args.out
    paths = {
        "instance": out / "instance.json",
        "menu": out / "menu.json",
        "hierarchy": out / "hierarchy.json",
    }
    save_instance(instance, paths["instance"])
    save_menu(menu, paths["menu"])
    save_hierarchy(hierarchy, paths["hierarchy"])

    manifest = _new_manifest(args, argv)
    manifest.config = {**config.to_dict(), "subsample": args.subsample}
    manifest.seed = args.seed
    for name, path in paths.items():
        manifest.add_output(name, path)
    manifest.finish()
    write_manifest(manifest, out / MANIFEST_NAME)

    print(f"Generated {instance.n_customers} customers, {instance.n_segments} segments, "
          f"{instance.n_actions} actions in {out}")
    return EXIT_OK


def cmd_compile(args: argparse.Namespace, argv: list[str]) -> int:
    """Compile an instance and menu into a standard LP."""
    if args.mode == "interdep" and args.pair_profits is None and args.pair_synergy is None:
        raise UsageError("--mode interdep needs --pair-profits FILE or --pair-synergy S")
    if args.mode != "interdep" and (args.pair_profits or args.pair_synergy is not None):
        raise UsageError("pair profits only apply to --mode interdep")

    instance = load_instance(args.instance)
    menu = load_menu(args.menu)
    if args.mode == "ipwc":
        lp = compile_ipwc(instance, menu)
    elif args.mode == "spwc":
        lp = compile_spwc(instance, menu)
    else:
        if args.pair_profits is not None:
            pair_profits = load_pair_profits(args.pair_profits)
        else:
            pair_profits = synergy_pair_profits(instance.profits, args.pair_synergy)
        lp = compile_interdependent(instance, menu, pair_profits)

    save_lp(lp, args.out)
    manifest = _new_manifest(args, argv)
    manifest.config = {"mode": args.mode, "pair_synergy": args.pair_synergy}
    manifest.add_input("instance", args.instance)
    manifest.add_input("menu", args.menu)
    if args.pair_profits is not None:
        manifest.add_input("pair_profits", args.pair_profits)
    manifest.add_output("lp", args.out)
    if args.export_mps is not None:
        save_mps(lp, args.export_mps)
        manifest.add_output("mps", args.export_mps)
    manifest.finish()
    write_manifest(manifest, _manifest_for(args.out))

    print(f"{args.mode}: {lp.n_vars:,} columns, {lp.constraints.nnz:,} nonzeros")
    _print_counts(lp.family_counts())
    return EXIT_OK


class _SolveObserver:
    """Forwards solver events to the convergence CSV and the JSONL log."""

    def __init__(self, csv_log: ConvergenceLogger | None) -> None:
        self.csv_log = csv_log

    def on_evaluation(self, total_iter: int, outer: int, inner: int, residuals: KKTResiduals,
                      rho: float, objective: float, elapsed_s: float) -> None:
        if self.csv_log is not None:
            self.csv_log.on_evaluation(total_iter, outer, inner, residuals, rho, objective,
                                       elapsed_s)

    def on_restart(self, outer: int, inner: int, reason: RestartReason, gap: float) -> None:
        if self.csv_log is not None:
            self.csv_log.on_restart(outer, inner, reason, gap)
        jsonl = _jsonl()
        if jsonl is not None:
            jsonl.log_restart(outer, inner, reason.value, gap)


def cmd_solve(args: argparse.Namespace, argv: list[str]) -> int:
    """Solve an LP with restarted PDHG."""
    solver_config = load_config().solver
    overrides: dict[str, Any] = {}
    if args.tol is not None:
        overrides["tolerance"] = args.tol
    if args.max_iters is not None:
        overrides["max_total_iterations"] = args.max_iters
    if args.no_restart:
        overrides["restart"] = False
    if args.no_rescale:
        overrides["rescale"] = False
    if args.seed is not None:
        overrides["seed"] = args.seed
    if args.time_limit is not None:
        overrides["time_limit"] = args.time_limit
    try:
        config = replace(solver_config, **overrides)
    except ValueError as e:
        raise UsageError(str(e)) from e

    lp = load_lp(args.lp)
    jsonl = _jsonl()
    if jsonl is not None:
        jsonl.log_solve_start(lp.n_vars, lp.n_rows, lp.constraints.nnz, config.to_dict())
    csv_log = ConvergenceLogger(args.log) if args.log is not None else None
    try:
        report = solve(lp, config, observer=_SolveObserver(csv_log))
    finally:
        if csv_log is not None:
            csv_log.close()
    if jsonl is not None:
        jsonl.log_solve_end(report.status.value, report.iterations, report.restarts,
                            objective=report.objective, duration_ms=report.wall_time * 1000)

    args.out.parent.mkdir(parents=True, exist_ok=True)
    with open(args.out, "w") as f:
        json.dump(report.to_dict(), f)
        f.write("\n")

    manifest = _new_manifest(args, argv)
    manifest.config = config.to_dict()
    manifest.seed = config.seed
    manifest.add_input("lp", args.lp)
    manifest.add_output("solution", args.out)
    if args.log is not None:
        manifest.add_output("convergence_log", args.log)
    manifest.finish()
    write_manifest(manifest, _manifest_for(args.out))

    print(f"status: {report.status.value}")
    print(f"objective: {report.objective:.10g}")
    print(f"iterations: {report.iterations} ({report.restarts} restarts)")
    print(f"residuals: primal {report.primal_residual:.3e}, dual {report.dual_residual:.3e}, "
          f"gap {report.relative_gap:.3e}")
    return EXIT_OK if report.status is SolveStatus.OPTIMAL else EXIT_NONOPTIMAL


def cmd_oracle(args: argparse.Namespace, argv: list[str]) -> int:
    """Solve an LP exactly with the dense simplex (or vertex enumeration)."""
    lp = load_lp(args.lp)
    dense = densify(lp)
    result = vertex_enumerate(dense) if args.method == "vertex" else simplex_solve(dense)

    args.out.parent.mkdir(parents=True, exist_ok=True)
    with open(args.out, "w") as f:
        json.dump({"method": args.method, **result.to_dict()}, f)
        f.write("\n")
    manifest = _new_manifest(args, argv)
    manifest.config = {"method": args.method}
    manifest.add_input("lp", args.lp)
    manifest.add_output("solution", args.out)
    manifest.finish()
    write_manifest(manifest, _manifest_for(args.out))

    print(f"status: {result.status.value}")
    print(f"objective: {result.objective:.10g}")
    return EXIT_OK if result.x is not None else EXIT_NONOPTIMAL


def cmd_compare(args: argparse.Namespace, argv: list[str]) -> int:
    """Compare IPwC and SPwC profits, optionally over a collapse-fraction sweep."""
    if args.draws < 1:
        raise UsageError("--draws must be at least 1")
    fractions = _parse_floats(args.fractions, "--fractions") if args.fractions else []
    if any(not 0 <= f <= 1 for f in fractions):
        raise UsageError("--fractions must lie in [0, 1]")

    app_config = load_config()
    solver_config = app_config.solver
    if args.tol is not None:
        solver_config = replace(solver_config, tolerance=args.tol)
    backend = oracle_backend if args.oracle else pdhg_backend(solver_config)

    instance = load_instance(args.instance)
    menu = load_menu(args.menu)
    manifest = _new_manifest(args, argv)
    manifest.config = {"solver": solver_config.to_dict(), "oracle": args.oracle,
                       "fractions": fractions, "draws": args.draws, "threads": app_config.threads}
    manifest.seed = args.seed
    manifest.add_input("instance", args.instance)
    manifest.add_input("menu", args.menu)

    if not fractions:
        comparison = compare_policies(instance, menu, backend)
        print(f"IPwC profit: {comparison.ipwc.profit:.6f} ({comparison.ipwc.iterations} it)")
        print(f"SPwC profit: {comparison.spwc.profit:.6f} ({comparison.spwc.iterations} it)")
        print(f"difference:  {comparison.difference:.6f}")
        result = {
            "ipwc_profit": comparison.ipwc.profit,
            "spwc_profit": comparison.spwc.profit,
            "difference": comparison.difference,
            "ipwc_optimal": comparison.ipwc.optimal,
            "spwc_optimal": comparison.spwc.optimal,
        }
        args.out.parent.mkdir(parents=True, exist_ok=True)
        with open(args.out, "w") as f:
            json.dump(result, f)
            f.write("\n")
        all_optimal = comparison.optimal
    else:
        rows = collapse_sweep(instance, menu, fractions, draws=args.draws, seed=args.seed,
                              backend=backend, threads=app_config.threads)
        write_sweep(rows, args.out)
        print(f"{'fraction':>9} {'IPwC':>14} {'SPwC':>14} {'difference':>12}")
        for row in rows:
            print(f"{row.fraction:>9.2f} {row.ipwc_profit:>14.4f} {row.spwc_profit:>14.4f} "
                  f"{row.difference:>12.4f}{'' if row.all_optimal else '  (non-optimal)'}")
        all_optimal = all(row.all_optimal for row in rows)

    manifest.add_output("report", args.out)
    manifest.finish()
    write_manifest(manifest, _manifest_for(args.out))
    return EXIT_OK if all_optimal else EXIT_NONOPTIMAL


def cmd_toy(args: argparse.Namespace, argv: list[str]) -> int:
    """Run the bilinear toy with and without restarts."""
    start = _parse_floats(args.start, "--start")
    if len(start) != 2:
        raise UsageError("--start needs two numbers: x,y")
    try:
        config = ToyConfig(
            start=(start[0], start[1]),
            x_box=(-args.box, args.box),
            y_box=(-args.box, args.box),
            step=args.step,
            max_iterations=args.max_iters,
        )
    except ValueError as e:
        raise UsageError(str(e)) from e

    report = run_toy(config)
    write_trajectories(report, args.out)
    manifest = _new_manifest(args, argv)
    manifest.config = {"start": list(config.start), "box": args.box, "step": config.step,
                       "max_iterations": config.max_iterations}
    manifest.add_output("trajectories", args.out)
    manifest.finish()
    write_manifest(manifest, _manifest_for(args.out))

    for run in (report.one_loop, report.two_loop):
        print(f"{run.variant:<9} {run.status.value:<16} iterations {run.iterations:>8} "
              f"restarts {run.restarts:>4} distance {run.distance:.2e}")
    return EXIT_OK


def cmd_count(args: argparse.Namespace, argv: list[str]) -> int:
    """Print closed-form constraint counts."""
    if min(args.segments, args.actions) < 1 or args.customers < 0:
        raise UsageError("--segments and --actions must be positive, --customers non-negative")
    shape = MenuShape(
        unordered_pairs=args.unordered,
        volume2_sides=1 if args.no_volume2_upper else 2,
    )
    counts = constraint_count(args.segments, args.actions, args.customers, shape).as_dict()
    counts.pop("total")
    _print_counts(counts)
    return EXIT_OK


def cmd_rerun(args: argparse.Namespace, argv: list[str]) -> int:
    """Replay the command recorded in a manifest and check its output digests."""
    manifest = load_manifest(args.manifest)
    print(f"Rerunning: {manifest.command} {' '.join(manifest.argv[1:])}")
    code = run_cli(manifest.argv)
    if code != EXIT_OK:
        return code

    checked = verify_outputs(manifest)
    changed = sorted(name for name, same in checked.items() if not same)
    jsonl = _jsonl()
    if jsonl is not None:
        jsonl.log("rerun_verified", status="mismatch" if changed else "ok",
                  manifest=str(args.manifest), changed=changed)
    if changed:
        print(f"Error: outputs differ from the recorded digests: {', '.join(changed)}",
              file=sys.stderr)
        return EXIT_IO
    print(f"Verified {len(checked)} output(s) against the recorded digests")
    return EXIT_OK


def create_parser() -> argparse.ArgumentParser:
    """Create the argument parser."""
    parser = argparse.ArgumentParser(
        prog="marchetype",
        description="Constrained targeting LPs solved with restarted PDHG",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    subparsers = parser.add_subparsers(dest="command", help="Sub-command help")

    gen = subparsers.add_parser("gen", help="Generate a synthetic instance")
    gen.add_argument("--customers", type=int, default=1000)
    gen.add_argument("--actions", type=int, default=5)
    gen.add_argument("--depth", type=int, default=5, choices=(3, 4, 5))
    gen.add_argument("--branching", default="2,3,4", help="Fan-out per level, comma-separated")
    gen.add_argument("--response-rate", type=float, default=0.03)
    gen.add_argument("--hit", type=float, default=40.0, help="Mean profit of a responder")
    gen.add_argument("--miss", type=float, default=-0.6, help="Mean profit of a non-responder")
    gen.add_argument("--max-actions", type=int, default=1)
    gen.add_argument("--profit-decimals", type=int, help="Round profits, e.g. 2 for cents")
    gen.add_argument("--subsample", type=float, help="Keep this fraction of every segment")
    gen.add_argument("--seed", type=int, default=0)
    gen.add_argument("--out", type=Path, default=Path("."))

    comp = subparsers.add_parser("compile", help="Compile an instance into an LP")
    comp.add_argument("--instance", type=Path, required=True)
    comp.add_argument("--menu", type=Path, required=True)
    comp.add_argument("--mode", choices=("ipwc", "spwc", "interdep"), default="ipwc")
    comp.add_argument("--pair-profits", type=Path, help="JSON with an I x J x J pair_profits")
    comp.add_argument("--pair-synergy", type=float, help="q = s * (p^j1 + p^j2)")
    comp.add_argument("--out", type=Path, default=Path("lp.json"))
    comp.add_argument("--export-mps", type=Path, help="Also write free MPS")

    sol = subparsers.add_parser("solve", help="Solve an LP with restarted PDHG")
    sol.add_argument("--lp", type=Path, required=True)
    sol.add_argument("--tol", type=float)
    sol.add_argument("--max-iters", type=int)
    sol.add_argument("--no-restart", action="store_true", help="Plain PDHG with one average")
    sol.add_argument("--no-rescale", action="store_true")
    sol.add_argument("--seed", type=int)
    sol.add_argument("--time-limit", type=float)
    sol.add_argument("--log", type=Path, help="Convergence CSV")
    sol.add_argument("--out", type=Path, default=Path("solution.json"))

    orc = subparsers.add_parser("oracle", help="Solve a small LP exactly")
    orc.add_argument("--lp", type=Path, required=True)
    orc.add_argument("--method", choices=("simplex", "vertex"), default="simplex")
    orc.add_argument("--out", type=Path, default=Path("oracle.json"))

    cmp_ = subparsers.add_parser("compare", help="Compare IPwC and SPwC profits")
    cmp_.add_argument("--instance", type=Path, required=True)
    cmp_.add_argument("--menu", type=Path, required=True)
    cmp_.add_argument("--fractions", help="Collapse fractions, e.g. 0,0.25,0.5,0.75,1")
    cmp_.add_argument("--draws", type=int, default=5)
    cmp_.add_argument("--seed", type=int, default=0)
    cmp_.add_argument("--tol", type=float)
    cmp_.add_argument("--oracle", action="store_true", help="Use the simplex oracle")
    cmp_.add_argument("--out", type=Path, default=Path("compare.csv"))

    toy = subparsers.add_parser("toy", help="Bilinear toy: one-loop vs two-loop")
    toy.add_argument("--start", default="5,5")
    toy.add_argument("--box", type=float, default=100.0)
    toy.add_argument("--step", type=float, default=0.9)
    toy.add_argument("--max-iters", type=int, default=2_000_000, help="Cap per variant")
    toy.add_argument("--out", type=Path, default=Path("toy.csv"))

    cnt = subparsers.add_parser("count", help="Closed-form constraint counts")
    cnt.add_argument("--segments", type=int, required=True)
    cnt.add_argument("--actions", type=int, required=True)
    cnt.add_argument("--customers", type=int, required=True)
    cnt.add_argument("--unordered", action="store_true", help="Similarity over k1 < k2 only")
    cnt.add_argument("--no-volume2-upper", action="store_true", help="Lower-only Volume II")

    rerun = subparsers.add_parser("rerun", help="Replay a manifest")
    rerun.add_argument("manifest", type=Path)

    return parser


COMMANDS = {
    "gen": cmd_gen,
    "compile": cmd_compile,
    "solve": cmd_solve,
    "oracle": cmd_oracle,
    "compare": cmd_compare,
    "toy": cmd_toy,
    "count": cmd_count,
    "rerun": cmd_rerun,
}


def _dispatch(args: argparse.Namespace, argv: list[str]) -> tuple[int, str | None]:
    handler = COMMANDS[args.command]
    try:
        return handler(args, argv), None
    except UsageError as e:
        print(f"Error: {e}", file=sys.stderr)
        return EXIT_USAGE, str(e)
    except SizeGuardError as e:
        print(f"Error: {e}", file=sys.stderr)
        return EXIT_GUARD, str(e)
    except OracleError as e:
        print(f"Error: {e}", file=sys.stderr)
        return EXIT_NONOPTIMAL, str(e)
    except INPUT_ERRORS as e:
        print(f"Error: {e}", file=sys.stderr)
        return EXIT_IO, str(e)


def run_cli(argv: list[str] | None = None) -> int:
    """Run the CLI with given arguments.

    Args:
        argv: Command-line arguments. Uses sys.argv[1:] if None.

    Returns:
        Exit code.
    """
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = create_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return int(e.code or 0)

    if args.command is None:
        parser.print_help()
        return EXIT_OK

    try:
        jsonl = configure_logger(default_log_dir())
    except OSError as e:
        logger.warning("JSONL logging disabled: %s", e)
        jsonl = None
    if jsonl is not None:
        jsonl.set_run_id(uuid.uuid4().hex[:12])

    started = time.perf_counter()
    code, error = _dispatch(args, argv)
    if jsonl is not None:
        jsonl.log_command(argv, code, (time.perf_counter() - started) * 1000,
                          command=args.command, error=error)
    return code
