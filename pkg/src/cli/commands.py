"""
Command-line interface for the detection-performance tool.
"""
from __future__ import annotations

import argparse
import sys
from pathlib import Path

import numpy as np

from src.config.experiment import ExperimentConfig, FoxHConfig
from src.config.settings import DEFAULT_SEED, DEFAULT_TOLERANCE, MAX_WORKERS
from src.numerics.analytic import OperatingPoint, db_to_linear, pd_series
from src.numerics.foxh import FoxHProblem, PdFoxHInputs, eval_bivariate_h, pd_foxh
from src.pipelines.experiment_pipeline import cmd_pd_vs_snr, cmd_pdf, cmd_roc
from src.pipelines.table_pipeline import cmd_table1
from src.pipelines.validation_pipeline import cmd_validate
from src.utils.custom_exception import CustomException
from src.utils.custom_logger import get_logger, set_log_level

logger = get_logger(__name__)

LOG_LEVELS = ["DEBUG", "INFO", "WARNING", "ERROR"]


def _add_common(parser: argparse.ArgumentParser, config: bool = True) -> None:
    if config:
        parser.add_argument("--config", required=True, help="Experiment YAML file")
    parser.add_argument("--seed", type=int, help="Base seed (unsigned 64-bit)")
    parser.add_argument("--trials", type=int, help="Monte-Carlo trials per point")
    parser.add_argument("--out", help="Output CSV path")
    parser.add_argument("--tolerance", type=float, help="Absolute PD tolerance")
    parser.add_argument("--workers", type=int, help="Monte-Carlo worker threads")
    parser.add_argument("--log-level", default="INFO", choices=LOG_LEVELS)


def create_parser() -> argparse.ArgumentParser:
    """Create CLI argument parser."""
    parser = argparse.ArgumentParser(
        description="Detection performance of the post-beamforming GLRT radar detector",
        formatter_class=argparse.RawDescriptionHelpFormatter,
        epilog="""
Examples:
  # ROC curves for M=22, N=3 at three SNRs
  python main.py roc --config configs/roc_m22_n3.yaml

  # PD against SNR for a family of antenna counts, with SNR loss against the LRT
  python main.py pd-vs-snr --config configs/pd_vs_snr_antennas.yaml --trials 100000

  # Series against quadrature on the reference parameter sets
  python main.py table1 --out results/table1.csv

  # Cross-checks (exit status 1 on any failure)
  python main.py validate --trials 100000

  # Detection probability through the Fox H contour integral
  python main.py fox-h --config configs/foxh_problem.yaml
        """,
    )

    subparsers = parser.add_subparsers(dest="command", help="Commands")

    roc_parser = subparsers.add_parser("roc", help="PD over a PFA grid per SNR")
    _add_common(roc_parser)

    snr_parser = subparsers.add_parser("pd-vs-snr", help="PD against SNR per family member")
    _add_common(snr_parser)

    pdf_parser = subparsers.add_parser("pdf", help="Simulated against analytic density of the statistic")
    _add_common(pdf_parser)

    table_parser = subparsers.add_parser("table1", help="Series against quadrature on the reference sets")
    _add_common(table_parser, config=False)
    table_parser.add_argument("--foxh", action="store_true", help="Add the Fox H evaluation to the table")

    validate_parser = subparsers.add_parser("validate", help="Run the cross-check suite")
    _add_common(validate_parser, config=False)
    validate_parser.add_argument("--skip-foxh", action="store_true", help="Skip the Fox H checks")
    validate_parser.add_argument("--inject-fault", action="store_true", help="Perturb thresholds so a check fails")

    foxh_parser = subparsers.add_parser("fox-h", help="Evaluate a Fox H problem")
    foxh_parser.add_argument("--config", help="Fox H problem YAML file")
    foxh_parser.add_argument("--m", type=int, help="Samples M (detection problem)")
    foxh_parser.add_argument("--pfa", type=float, help="False-alarm probability")
    foxh_parser.add_argument("--upsilon-db", type=float, help="Aggregate SNR in dB")
    foxh_parser.add_argument("--truncation", type=float, help="Contour half-length W")
    foxh_parser.add_argument("--tolerance", type=float, help="Absolute tolerance")
    foxh_parser.add_argument("--log-level", default="INFO", choices=LOG_LEVELS)

    return parser


def load_config(args) -> ExperimentConfig:
    config = ExperimentConfig.from_yaml(args.config)
    return config.with_overrides(
        seed=args.seed,
        trials=args.trials,
        output=Path(args.out) if args.out else None,
        tolerance=args.tolerance,
        workers=args.workers,
    )


def handle_roc(args) -> int:
    """Handle roc command."""
    path = cmd_roc(load_config(args))
    print(f"ROC data written to {path}")
    return 0


def handle_pd_vs_snr(args) -> int:
    """Handle pd-vs-snr command."""
    path = cmd_pd_vs_snr(load_config(args))
    print(f"PD-versus-SNR data written to {path}")
    return 0


def handle_pdf(args) -> int:
    """Handle pdf command."""
    path = cmd_pdf(load_config(args))
    print(f"PDF comparison written to {path}")
    return 0


def handle_table1(args) -> int:
    """Handle table1 command."""
    cmd_table1(
        out=Path(args.out) if args.out else None,
        tol=args.tolerance or DEFAULT_TOLERANCE,
        with_foxh=args.foxh,
    )
    return 0


def handle_validate(args) -> int:
    """Handle validate command; the exit status is 1 when a check fails."""
    checks = cmd_validate(
        trials=100_000 if args.trials is None else args.trials,
        seed=DEFAULT_SEED if args.seed is None else args.seed,
        tol=args.tolerance or DEFAULT_TOLERANCE,
        workers=args.workers or MAX_WORKERS,
        inject_fault=args.inject_fault,
        include_foxh=not args.skip_foxh,
    )
    return 0 if all(c.passed for c in checks) else 1


def _foxh_config(args) -> FoxHConfig:
    config = FoxHConfig.from_yaml(args.config) if args.config else FoxHConfig()
    overrides = {"m_samples": args.m, "pfa": args.pfa, "upsilon_db": args.upsilon_db,
                 "truncation": args.truncation, "tolerance": args.tolerance}
    values = {k: v for k, v in overrides.items() if v is not None}
    if values:
        data = {**config.__dict__, **values}
        config = FoxHConfig(**data)
    return config


def handle_foxh(args) -> int:
    """Handle fox-h command."""
    config = _foxh_config(args)

    if config.kind == "pd":
        op = OperatingPoint.from_pfa(config.m_samples, config.pfa, db_to_linear(config.upsilon_db))
        inputs = PdFoxHInputs.from_operating_point(op.m, op.upsilon, op.omega)
        value = pd_foxh(inputs, tol=config.tolerance, truncation=config.truncation)
        series = pd_series(op, config.tolerance)
        print(f"M={op.m} PFA={op.pfa:g} Y={config.upsilon_db:g} dB")
        print(f"  PD (Fox H) = {value:.12f}")
        print(f"  PD (series) = {series.pd:.12f} ({series.terms_used} terms)")
        print(f"  |difference| = {abs(value - series.pd):.3e}")
        return 0

    problem = FoxHProblem(
        x=np.asarray(config.x),
        delta=np.asarray(config.delta),
        dmat=np.asarray(config.dmat, dtype=float),
        beta=np.asarray(config.beta, dtype=float),
        bmat=np.asarray(config.bmat, dtype=float).reshape(len(config.beta), len(config.x)),
        contour_offsets=config.contour_offsets,
        contour_kinds=config.contour_kinds,
        **({"truncation": config.truncation} if config.truncation is not None else {}),
    )
    value = eval_bivariate_h(problem, tol=config.tolerance, log_scale=config.log_scale, strategy=config.strategy)
    print(f"H = {value.real:.15g} {value.imag:+.3e}j (log scale {config.log_scale:g})")
    return 0


HANDLERS = {
    "roc": handle_roc,
    "pd-vs-snr": handle_pd_vs_snr,
    "pdf": handle_pdf,
    "table1": handle_table1,
    "validate": handle_validate,
    "fox-h": handle_foxh,
}


def main(argv=None):
    """Main CLI entry point."""
    parser = create_parser()
    args = parser.parse_args(argv)

    if not args.command:
        parser.print_help()
        sys.exit(1)

    set_log_level(args.log_level)

    try:
        status = HANDLERS[args.command](args)
    except KeyboardInterrupt:
        print("\n\nOperation cancelled by user.")
        sys.exit(1)
    except CustomException as e:
        print(f"\nError: {e}")
        sys.exit(1)

    sys.exit(status)
