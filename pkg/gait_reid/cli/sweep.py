"""Evaluate identification accuracy over a grid of splits, K and M."""
import argparse

from ..evaluation import sweep
from .evaluate import add_report_args, write_report
from .utils import add_image_args, config_from_args, float_list, int_list


def main(args: argparse.Namespace) -> None:
    """Run the parameter sweep."""
    report = sweep(
        args.data,
        splits=args.splits,
        k_values=args.segment_values,
        m_values=args.dim_values,
        seed=args.seed,
        config=config_from_args(args, min(args.segment_values), min(args.dim_values)),
        workers=args.workers,
    )
    write_report(report, args)


def create_subparser(subparsers: argparse._SubParsersAction) -> None:
    """Sweep command parser."""
    parser = subparsers.add_parser(
        "sweep",
        description=(
            "Evaluate every combination of the given train fractions, segment counts "
            "and whitened dimension counts, one report row each"
        ),
        help="Sweep evaluation parameters",
    )

    parser.add_argument(
        '--splits', type=float_list, default=[0.5, 0.66, 0.83],
        help="Comma separated train fractions, defaults to 0.5,0.66,0.83")
    parser.add_argument(
        '--segments', dest='segment_values', type=int_list, default=[10, 20, 23, 30],
        help="Segment counts as a list with ranges like 5-30:5, defaults to 10,20,23,30")
    parser.add_argument(
        '--dims', dest='dim_values', type=int_list, default=[5],
        help="Whitened dimension counts as a list with ranges, defaults to 5")
    add_report_args(parser)
    add_image_args(parser)

    parser.set_defaults(func=main)
