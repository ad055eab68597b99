"""Print the per-segment affine moment invariants of a sequence."""
import argparse
from pathlib import Path

from ..gallery import sequence_features
from ..silhouettes import load_sequence
from .utils import add_image_args, add_model_args, config_from_args


def main(args: argparse.Namespace) -> None:
    """Print one line of invariants per segment."""
    config = config_from_args(args)
    sequence = load_sequence(
        args.sequence, config.width, config.height, config.threshold_fraction)

    for k, feature in enumerate(sequence_features(sequence, config)):
        values = ' '.join(repr(float(value)) for value in feature.values)
        print(f"{k} {int(feature.degenerate)} {values}")


def create_subparser(subparsers: argparse._SubParsersAction) -> None:
    """Features command parser."""
    parser = subparsers.add_parser(
        "features",
        description=(
            "Print '<segment> <degenerate flag> <10 invariants>' for each segment "
            "of a sequence's energy template"
        ),
        help="Print the invariants of a sequence",
    )

    parser.add_argument('sequence', type=Path, help="Directory of silhouette frames.")

    add_image_args(parser)
    add_model_args(parser)

    parser.set_defaults(func=main)
