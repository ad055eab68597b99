"""Identify the subject of a probe sequence against a gallery."""
import argparse
import logging
from pathlib import Path

from ..gallery import Gallery
from ..silhouettes import load_sequence

LOGGER = logging.getLogger(__name__)


def main(args: argparse.Namespace) -> None:
    """Identify a probe sequence and print the closest gallery sequences."""
    gallery = Gallery.load(args.gallery)
    if not gallery.is_finalized:
        gallery.finalize()

    config = gallery.config
    probe = load_sequence(args.probe, config.width, config.height, config.threshold_fraction)
    result = gallery.identify(probe)

    print(f"predicted {result.predicted_person}")
    for rank, (key, total) in enumerate(result.ranked(args.top), start=1):
        print(f"{rank} {key.person_id} {key.sequence_id} {total!r}")


def create_subparser(subparsers: argparse._SubParsersAction) -> None:
    """Identify command parser."""
    parser = subparsers.add_parser(
        "identify",
        description=(
            "Identify the subject of a probe sequence, printing the prediction "
            "and the gallery sequences with the lowest total distance"
        ),
        help="Identify a probe sequence",
    )

    parser.add_argument('--gallery', type=Path, required=True, help="Gallery file.")
    parser.add_argument(
        '--probe', type=Path, required=True, help="Directory of probe silhouette frames.")
    parser.add_argument(
        '--top', type=int, default=5, help="Number of ranked matches to print, defaults to 5")

    parser.set_defaults(func=main)
