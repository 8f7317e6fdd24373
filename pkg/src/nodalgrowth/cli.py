"""Command line entry point: ``nodalgrowth <subcommand> [options]``.

Exit codes: 0 success, 1 configuration error, 2 numerical convergence
failure, 3 I/O error.
"""
from __future__ import annotations

import argparse
import dataclasses
import json
import logging
import math
import sys
from pathlib import Path

from .disklab import (
    RHO_PLUS,
    RHO_TILDE_MINUS,
    harmonic,
    kernel_constants,
    lemma3_check,
    lemma_family,
    theorem2_check,
    theorem3_check,
)
from .errors import ConfigError, ConvergenceError
from .experiments import (
    TORUS_TARGETS,
    DFRow,
    SandwichRow,
    SweepConfig,
    default_sweeps,
    derive_seed,
    load_config,
    run_df_scan,
    run_sandwich_sweeps,
    subject_eigenfunction,
)
from .geometry import sample_centers, surface_by_name
from .eigenbasis import level_for_eigenvalue
from .growth import growth_batch
from .nodal import extract_nodal_set, write_polylines_csv
from .report import emit_report

log = logging.getLogger("nodalgrowth")

EXIT_OK, EXIT_CONFIG, EXIT_CONVERGENCE, EXIT_IO = 0, 1, 2, 3


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_CONFIG, f"{self.prog}: error: {message}\n")


def _global_flags(defaults: bool) -> argparse.ArgumentParser:
    # shared by the top-level parser and every subparser, so flags may appear
    # on either side of the subcommand; SUPPRESS keeps a later parser from
    # overwriting an earlier value with its default
    p = argparse.ArgumentParser(add_help=False)
    d = (lambda v: v) if defaults else (lambda v: argparse.SUPPRESS)
    p.add_argument("--config", type=Path, default=d(None), help="flat key = value sweep config")
    p.add_argument("--seed", type=int, default=d(None), help="master seed (overrides config)")
    p.add_argument("--out", type=Path, default=d(None), help="output directory (overrides config)")
    p.add_argument("--jobs", type=int, default=d(None), help="worker processes (default: all CPUs)")
    p.add_argument("--format", choices=("csv", "json", "svg"), default=d("csv"))
    return p


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="nodalgrowth", parents=[_global_flags(True)],
                     description="Nodal length and local growth of surface eigenfunctions.")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    g = [_global_flags(False)]

    sub.add_parser("sandwich", parents=g, help="nodal length vs average growth sweep")
    p = sub.add_parser("dfscan", parents=g, help="largest sampled growth exponent per eigenvalue")
    p.add_argument("--surface", choices=("torus", "sphere"))
    p = sub.add_parser("disklab", parents=g, help="planar Schroedinger checks")
    p.add_argument("--q", type=float, action="append", dest="qs")
    p = sub.add_parser("nodal-dump", parents=g, help="nodal polylines of one eigenfunction")
    p.add_argument("--surface", choices=("torus", "sphere"))
    p.add_argument("--level", type=int, default=None)
    p.add_argument("--spw", type=int, default=None, help="samples per wavelength")
    p = sub.add_parser("growth-sample", parents=g, help="growth exponents at sampled centers")
    p.add_argument("--surface", choices=("torus", "sphere"))
    p.add_argument("--level", type=int, default=None)
    return parser


def _configs(args, default) -> list[SweepConfig]:
    cfgs = [load_config(args.config)] if args.config else default
    over = {}
    if args.seed is not None:
        over["seed"] = args.seed
    if args.out is not None:
        over["out"] = str(args.out)
    return [dataclasses.replace(c, **over) for c in cfgs]


def _warn_k0(cfg: SweepConfig) -> None:
    for q in cfg.qs:
        if math.isinf(q) or q <= 1.0:
            continue
        eps = kernel_constants(q).epsilon0_admissible
        if cfg.k0**2 >= eps:
            log.warning("k0^2 = %.3g is not below the admissible potential bound %.3g (q=%g); "
                        "the planar rescaling hypothesis does not hold at this k0", cfg.k0**2, eps, q)


def _emit(rows, args, out, stem, summary, row_type):
    files = emit_report(rows, args.format, out, stem, summary, row_type)
    if args.format == "csv" and summary:
        files.append(Path(out) / f"{stem}_summary.json")
        files[-1].write_text(json.dumps(summary, indent=1) + "\n", encoding="utf-8")
    for f in files:
        print(f)


def cmd_sandwich(args) -> int:
    cfgs = _configs(args, default_sweeps())
    for c in cfgs:
        _warn_k0(c)
    result = run_sandwich_sweeps(cfgs, args.jobs)
    if not result.rows:
        log.info("empty level list: nothing to compute")
    elif any(r.flags for r in result.rows):
        log.warning("%d rows carry flags", sum(1 for r in result.rows if r.flags))
    out = cfgs[0].out if cfgs else "results"
    if result.rows or args.format != "svg":
        _emit(result.rows, args, out, "sandwich", result.summary, SandwichRow)
    return EXIT_OK


def cmd_dfscan(args) -> int:
    torus = surface_by_name("torus")
    default = SweepConfig("torus", tuple(level_for_eigenvalue(torus, lam) for lam in TORUS_TARGETS),
                          qs=(2.0,))
    cfg = _configs(args, [default])[0]
    if args.surface and args.surface != cfg.surface:
        raise ConfigError("--surface disagrees with the config file")
    _warn_k0(cfg)
    result = run_df_scan(cfg, args.jobs)
    if result.rows or args.format != "svg":
        _emit(result.rows, args, cfg.out, "dfscan", result.summary, DFRow)
    return EXIT_OK


def cmd_disklab(args) -> int:
    qs = args.qs or [1.5, 2.0, 4.0]
    out = args.out or Path("results")
    checks, constants = [], {}
    for q in qs:
        consts = kernel_constants(q)
        constants[f"q={q:g}"] = dataclasses.asdict(consts)
        checks.extend(lemma3_check(p, q) for p in lemma_family(q, args.seed or 0))
        for n in range(0, 9):
            checks.append(theorem2_check(harmonic(n), q))
        for n in range(0, 13):
            checks.append(theorem3_check(harmonic(n), q, RHO_TILDE_MINUS, RHO_PLUS))
    if args.format == "svg":
        raise ConfigError("svg output is only available for sandwich and dfscan tables")
    files = emit_report(checks, args.format, out, "disklab", {"constants": constants})
    if args.format == "csv":
        files.append(Path(out) / "disklab_constants.json")
        files[-1].write_text(json.dumps(constants, indent=1) + "\n", encoding="utf-8")
    for f in files:
        print(f)
    return EXIT_OK


def _single_config(args, default_level) -> SweepConfig:
    base = SweepConfig(args.surface or "torus", (default_level,))
    cfg = _configs(args, [base])[0]
    if args.surface:
        cfg = dataclasses.replace(cfg, surface=args.surface)
    if args.level is not None:
        cfg = dataclasses.replace(cfg, levels=(args.level,))
    if not cfg.levels:
        raise ConfigError("no level given")
    return cfg


def cmd_nodal_dump(args) -> int:
    cfg = _single_config(args, 20)
    spw = args.spw or cfg.samples_per_wavelength
    out = Path(cfg.out)
    out.mkdir(parents=True, exist_ok=True)
    for level in cfg.levels:
        f = subject_eigenfunction(cfg, level)
        res = extract_nodal_set(f, spw)
        path = out / f"nodal_{cfg.surface}_{level}.csv"
        write_polylines_csv(res, path)
        print(f"{path}\tlength={res.total_length:.12g}\tcurves={len(res.polylines)}")
    return EXIT_OK


@dataclasses.dataclass(frozen=True)
class GrowthRow:
    surface: str
    level: int
    lam: float
    q: float
    alpha: float
    k0: float
    coord1: float
    coord2: float
    beta: float
    flagged: bool


def cmd_growth_sample(args) -> int:
    cfg = _single_config(args, 20)
    _warn_k0(cfg)
    rows = []
    for level in cfg.levels:
        f = subject_eigenfunction(cfg, level)
        centers = sample_centers(f.surface, cfg.n_centers, derive_seed(cfg.seed, level, 1))
        for alpha in cfg.alphas:
            batch = growth_batch(f, centers, alpha, cfg.k0, cfg.qs)
            for q in cfg.qs:
                rows.extend(
                    GrowthRow(cfg.surface, level, f.eigenvalue, float(q), float(alpha), cfg.k0,
                              float(r.center[0]), float(r.center[1]), r.beta, r.flagged)
                    for r in batch[float(q)]
                )
    if args.format == "svg":
        raise ConfigError("svg output is only available for sandwich and dfscan tables")
    for path in emit_report(rows, args.format, cfg.out, "growth_sample", row_type=GrowthRow):
        print(path)
    return EXIT_OK


COMMANDS = {
    "sandwich": cmd_sandwich,
    "dfscan": cmd_dfscan,
    "disklab": cmd_disklab,
    "nodal-dump": cmd_nodal_dump,
    "growth-sample": cmd_growth_sample,
}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s: %(message)s")
    if args.jobs is not None and args.jobs < 1:
        print("error: --jobs must be >= 1", file=sys.stderr)
        return EXIT_CONFIG
    try:
        return COMMANDS[args.command](args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except ConvergenceError as exc:
        print(f"convergence failure: {exc}", file=sys.stderr)
        return EXIT_CONVERGENCE
    except OSError as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
