#!/usr/bin/env python
"""
CLI entry point for entbounds

Every subcommand writes CSV (header plus rows, 17 significant digits) to
stdout, except `design --verify` and `suite`, which print rich tables.
Logs go to stderr. Exit codes: 0 success, 1 a check failed, 2 bad usage.
"""

import argparse
import logging
import sys
from fractions import Fraction
from pathlib import Path
from typing import Any, Sequence

import numpy as np
import pandas as pd
from rich.console import Console
from rich.table import Table

from entbounds.config import Config, ConfigManager
from entbounds.shared.logging_config import configure_logging, level_from_name

from .bounds import (
    IndexVector,
    Method,
    ProbabilityVector,
    conjecture_sweep,
    index_vector_from_distribution,
    prop1_bounds,
    shannon_entropy,
    tsan1_check,
)
from .coefficients import Family, get_coefficients
from .designs import (
    BUILTIN_DESIGNS,
    MomentVector,
    QuantumDesign,
    QuantumState,
    builtin_design,
    dd,
    frame_potential,
    verify_design,
)
from .errors import (
    DegreeOutOfRange,
    DomainError,
    EntropyBoundsError,
    ErrorCategory,
)
from .figures import (
    FigureId,
    build_figure,
    figure_spec,
    render_svg,
    to_csv_text,
    write_csv,
)
from .poly_estimators import EnvelopeTag, GridSpec, verify_envelope
from .relations import (
    prop2_bounds,
    state_independent_check,
    steering_bounds,
    von_neumann_bounds,
)
from .suite import CHECKS, run_suite

logger = logging.getLogger(__name__)

METHODS = [m.value for m in Method]

# Taylor tables exist for any degree; the command line stops here
MAX_TAYLOR_DEGREE = 64


def _floats(text: str) -> list[float]:
    try:
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise DomainError(
            f"expected comma-separated numbers: {text!r}"
        ) from None


def _emit(rows: list[dict[str, Any]]) -> None:
    sys.stdout.write(to_csv_text(pd.DataFrame(rows)))


def _design(name: str, config: Config) -> QuantumDesign:
    return builtin_design(
        name, config.design_tolerance, config.found_design_tolerance
    )


def _parse_state(text: str) -> QuantumState:
    """bloch:nx,ny,nz or lambda:x (eigenvalues 1 - x, x along +z)."""
    kind, _, values = text.partition(":")
    if kind == "bloch":
        return QuantumState.from_bloch(_floats(values))
    if kind == "lambda":
        numbers = _floats(values)
        if len(numbers) != 1:
            raise DomainError(f"lambda takes one number, got {values!r}")
        return QuantumState.from_min_eigenvalue(numbers[0])
    raise DomainError(
        f"state must be 'bloch:nx,ny,nz' or 'lambda:x', got {text!r}"
    )


# ---------------------------------------------------------------------------
# Subcommands
# ---------------------------------------------------------------------------


def cmd_coeffs(args: argparse.Namespace, config: Config) -> int:
    if args.n > MAX_TAYLOR_DEGREE:
        raise DegreeOutOfRange(
            f"degree must be <= {MAX_TAYLOR_DEGREE} here, got {args.n}"
        )
    table = get_coefficients(args.family, args.n)
    entries = sorted(table.entries.items())
    if args.exact:
        rows = [
            {"s": s, "numerator": v.numerator, "denominator": v.denominator}
            for s, v in entries
        ]
    else:
        rows = [{"s": s, "value": float(v)} for s, v in entries]
    _emit(rows)
    return 0


def cmd_verify(args: argparse.Namespace, config: Config) -> int:
    grid = GridSpec(
        uniform=args.grid or config.envelope_grid,
        endpoint=config.endpoint_points,
    )
    report = verify_envelope(args.n, args.ineq, grid, workers=config.workers)
    _emit([report.as_row()])
    ok = report.passed(config.slack_tolerance)
    return 0 if ok else ErrorCategory.CHECK.exit_code


def cmd_bounds(args: argparse.Namespace, config: Config) -> int:
    if args.probs is not None:
        p = ProbabilityVector(np.asarray(_floats(args.probs)))
        idx = index_vector_from_distribution(p, args.n)
        L = p.L
        exact: float | None = shannon_entropy(p)
    elif args.indices is not None:
        if args.L is None:
            raise DomainError("--indices needs --L")
        idx = IndexVector(tuple(_floats(args.indices)))
        L = args.L
        exact = None
    else:
        raise DomainError("give --probs or --indices")

    methods = METHODS if args.method == "both" else [args.method]
    rows = []
    for method in methods:
        b = prop1_bounds(
            idx,
            L,
            method,
            xtol=config.bisection_xtol,
            maxiter=config.bisection_maxiter,
        )
        row: dict[str, Any] = {
            "method": b.method.value,
            "n": b.degree,
            "upsilon": b.upsilon,
            "lower": b.lower,
            "upper": b.upper,
        }
        if exact is not None:
            row["H"] = exact
        rows.append(row)
    _emit(rows)
    return 0


def cmd_conjecture(args: argparse.Namespace, config: Config) -> int:
    tolerance = config.conjecture_tolerance
    if args.probs is not None:
        p = ProbabilityVector(np.asarray(_floats(args.probs)))
        check = tsan1_check(p, args.n, tolerance)
        _emit(
            [
                {
                    "n": args.n,
                    "lhs": check.lhs,
                    "rhs": check.rhs,
                    "margin": check.margin,
                    "holds": check.holds,
                }
            ]
        )
        return 0 if check.holds else ErrorCategory.CHECK.exit_code

    samples = (
        config.monte_carlo_samples if args.samples is None else args.samples
    )
    rng = np.random.default_rng(config.seed)
    sweep = conjecture_sweep(args.n, samples, rng, tolerance=tolerance)
    _emit(
        [
            {
                "n": sweep.degree,
                "samples": sweep.samples,
                "seed": config.seed,
                "worst_margin": sweep.worst_margin,
                "worst_L": sweep.worst_L,
                "holds": sweep.holds,
            }
        ]
    )
    return 0 if sweep.holds else ErrorCategory.CHECK.exit_code


def cmd_design(args: argparse.Namespace, config: Config) -> int:
    design = _design(args.name, config)
    if args.export is not None:
        if design.bloch is None:
            raise DomainError(f"{design.name} has no Bloch coordinates")
        frame = pd.DataFrame(design.bloch, columns=["nx", "ny", "nz"])
        frame.insert(0, "k", range(design.K))
        write_csv(frame, args.export)

    if not args.verify:
        _emit(
            [
                {
                    "name": design.name,
                    "d": design.d,
                    "t": design.t,
                    "K": design.K,
                    "M": design.M,
                    "ell": design.ell,
                }
            ]
        )
        return 0

    table = Table(
        title=f"{design.name}: frame potentials",
        show_header=True,
        header_style="bold magenta",
    )
    table.add_column("t", style="cyan", justify="right")
    table.add_column("frame potential", justify="right")
    table.add_column("Dd(t, d)", justify="right")
    table.add_column("defect", justify="right")
    for t in range(1, design.t + 2):
        target: Fraction = dd(t, design.d)
        fp = frame_potential(design, t)
        table.add_row(
            str(t), f"{fp:.15f}", str(target), f"{fp - float(target):.2e}"
        )
    Console().print(table)
    check = verify_design(design)
    return 0 if check.is_design else ErrorCategory.CHECK.exit_code


def cmd_relate(args: argparse.Namespace, config: Config) -> int:
    design = _design(args.design, config)
    rho = _parse_state(args.state)
    rows = []
    for method in [args.method] if args.method else METHODS:
        r = prop2_bounds(design, rho, method)
        rows.append(
            {
                "design": design.name,
                "method": r.method.value,
                "lower": r.lower,
                "upper": r.upper,
                "upsilon": r.upsilon,
                "clipped": r.clipped,
                "average_entropy": r.average_entropy,
            }
        )
    _emit(rows)
    ok = all(
        r["lower"] - config.sandwich_tolerance
        <= r["average_entropy"]
        <= r["upper"] + config.sandwich_tolerance
        for r in rows
    )
    return 0 if ok else ErrorCategory.CHECK.exit_code


def cmd_vn(args: argparse.Namespace, config: Config) -> int:
    sums = (1.0, *_floats(args.moments))
    m = MomentVector(args.d, sums)
    rows = []
    for method in [args.method] if args.method else METHODS:
        b = von_neumann_bounds(m, method)
        rows.append(
            {
                "method": b.method.value,
                "t": m.t,
                "lower": b.lower,
                "upper": b.upper,
                "lambda_max": b.upsilon,
            }
        )
    _emit(rows)
    return 0


def cmd_steer(args: argparse.Namespace, config: Config) -> int:
    design = _design(args.design, config)
    method = Method(args.method)
    if args.certify:
        state_independent_check(
            design,
            method,
            config.state_samples,
            config.seed,
            workers=config.workers,
            tolerance=config.sandwich_tolerance,
        )
    bound = steering_bounds(design, method)
    _emit(
        [
            {
                "design": design.name,
                "method": method.value,
                "bound": bound.value,
                "certified": bound.certified,
            }
        ]
    )
    return 0


def cmd_figure(args: argparse.Namespace, config: Config) -> int:
    spec = figure_spec(args.id, config.figure_points)
    df = build_figure(spec, config.sandwich_tolerance)
    if args.out is None:
        sys.stdout.write(to_csv_text(df))
    else:
        write_csv(df, args.out)
        logger.info(f"Wrote {args.out}")
    if args.svg is not None:
        render_svg(df, spec, args.svg)
    return 0


def cmd_suite(args: argparse.Namespace, config: Config) -> int:
    report = run_suite(
        config, quick=args.quick, seed=args.seed, only=args.check
    )
    report.render(Console())
    if not report.passed:
        sys.stderr.write(f"Failed checks: {', '.join(report.failed)}\n")
    return report.exit_code


# ---------------------------------------------------------------------------
# Parser
# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="entbounds",
        description="Two-sided Shannon entropy bounds from power sums",
    )
    parser.add_argument(
        "--config", type=Path, help="key=value file overriding defaults"
    )
    parser.add_argument(
        "-v", "--verbose", action="store_true", help="debug logging"
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("coeffs", help="print a coefficient table")
    p.add_argument(
        "--family", choices=[f.value for f in Family], required=True
    )
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--exact", action="store_true", help="print as fractions")
    p.set_defaults(func=cmd_coeffs)

    p = sub.add_parser("verify", help="check an envelope inequality")
    p.add_argument("--n", type=int, required=True)
    p.add_argument(
        "--ineq", choices=[t.value for t in EnvelopeTag], required=True
    )
    p.add_argument("--grid", type=int, help="uniform grid size")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("bounds", help="entropy bounds of a distribution")
    p.add_argument("--probs", help="comma-separated probabilities")
    p.add_argument("--indices", help="comma-separated I2,...,In")
    p.add_argument("--n", type=int, default=3, help="degree for --probs")
    p.add_argument("--L", type=int, help="number of outcomes")
    p.add_argument("--method", choices=[*METHODS, "both"], default="both")
    p.set_defaults(func=cmd_bounds)

    p = sub.add_parser("conjecture", help="Shannon-Tsallis inequality")
    p.add_argument("--n", type=int, required=True)
    mode = p.add_mutually_exclusive_group()
    mode.add_argument("--probs", help="check one distribution")
    mode.add_argument(
        "--samples", type=int, help="random distributions (worst margin)"
    )
    p.add_argument("--seed", type=int)
    p.set_defaults(func=cmd_conjecture)

    p = sub.add_parser("design", help="inspect a built-in design")
    p.add_argument("--name", choices=list(BUILTIN_DESIGNS), required=True)
    p.add_argument("--verify", action="store_true")
    p.add_argument("--export", type=Path, help="write k,nx,ny,nz CSV")
    p.set_defaults(func=cmd_design)

    p = sub.add_parser("relate", help="relations for a design and state")
    p.add_argument("--design", choices=list(BUILTIN_DESIGNS), required=True)
    p.add_argument("--method", choices=METHODS)
    p.add_argument(
        "--state", required=True, help="bloch:nx,ny,nz or lambda:x"
    )
    p.set_defaults(func=cmd_relate)

    p = sub.add_parser("vn", help="von Neumann entropy bounds from moments")
    p.add_argument("--d", type=int, required=True)
    p.add_argument("--moments", required=True, help="tr rho^2,...,tr rho^t")
    p.add_argument("--method", choices=METHODS)
    p.set_defaults(func=cmd_vn)

    p = sub.add_parser("steer", help="steering inequality bound")
    p.add_argument("--design", choices=list(BUILTIN_DESIGNS), required=True)
    p.add_argument("--method", choices=METHODS, required=True)
    p.add_argument(
        "--certify",
        action="store_true",
        help="run the state-independence check first",
    )
    p.set_defaults(func=cmd_steer)

    p = sub.add_parser("figure", help="emit figure data as CSV")
    p.add_argument("--id", choices=[f.value for f in FigureId], required=True)
    p.add_argument("--points", type=int)
    p.add_argument("--out", type=Path)
    p.add_argument("--svg", type=Path)
    p.set_defaults(func=cmd_figure)

    p = sub.add_parser("suite", help="run the verification suite")
    p.add_argument("--quick", action="store_true")
    p.add_argument("--seed", type=int)
    p.add_argument(
        "--check", action="append", choices=list(CHECKS), help="repeatable"
    )
    p.set_defaults(func=cmd_suite)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    """Main entry point for the entbounds command"""
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return int(e.code or 0)

    try:
        manager = ConfigManager(config_path=args.config)
        config = manager.with_overrides(
            figure_points=getattr(args, "points", None),
            seed=getattr(args, "seed", None),
        )
        level = level_from_name(config.log_level)
        if args.verbose:
            level = logging.DEBUG
        configure_logging(level=level, include_console=True, force=True)
        return int(args.func(args, config))
    except EntropyBoundsError as e:
        logger.debug("Command failed", exc_info=True)
        sys.stderr.write(f"error: {e}\n")
        return e.category.exit_code


if __name__ == "__main__":
    sys.exit(main())
