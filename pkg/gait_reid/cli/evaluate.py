"""
Evaluate identification accuracy on a dataset.

Splits each subject's sequences into gallery and probe sets, enrolls the
gallery and reports the correct classification rate of the probes.
"""
import argparse
from pathlib import Path

from ..evaluation import EvaluationReport, evaluate
from .utils import add_image_args, add_model_args, add_workers_arg, config_from_args


def write_report(report: EvaluationReport, args: argparse.Namespace) -> None:
    """Print the report and optionally save the per-probe log."""
    print(report.to_csv() if args.csv else report.to_table(), end='')
    if args.probes:
        args.probes.write_text(report.probes_to_csv(), encoding='utf-8')


def main(args: argparse.Namespace) -> None:
    """Run a single evaluation."""
    report = evaluate(
        args.data,
        split=args.split,
        k_segments=args.segments,
        m_dims=args.dims,
        seed=args.seed,
        config=config_from_args(args),
        workers=args.workers,
    )
    write_report(report, args)


def add_report_args(parser: argparse.ArgumentParser) -> None:
    """Add the dataset, seed and output arguments shared with sweep."""
    parser.add_argument(
        '--data', type=Path, required=True,
        help="Dataset root laid out as <subject>/<sequence>/<frames>.")
    parser.add_argument('--seed', type=int, default=0, help="Seed of the train/test split.")
    parser.add_argument(
        '--csv', action='store_true', help="Print CSV instead of an aligned table.")
    parser.add_argument(
        '--probes', type=Path, default=None, help="Write the per-probe outcomes as CSV.")
    add_workers_arg(parser)


def create_subparser(subparsers: argparse._SubParsersAction) -> None:
    """Evaluate command parser."""
    parser = subparsers.add_parser(
        "evaluate",
        description="Evaluate rank-1 identification accuracy with a per-subject split",
        help="Evaluate identification accuracy",
    )

    parser.add_argument(
        '--split', type=float, default=0.5,
        help="Fraction of each subject's sequences used as gallery, defaults to 0.5")
    add_report_args(parser)
    add_image_args(parser)
    add_model_args(parser)

    parser.set_defaults(func=main)
