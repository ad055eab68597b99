"""Render the energy template of a sequence as an image."""
import argparse
import logging
from pathlib import Path

from ..energy_image import energy_image, render_energy_image
from ..silhouettes import load_sequence
from .utils import add_image_args

LOGGER = logging.getLogger(__name__)


def main(args: argparse.Namespace) -> None:
    """Save the energy template of a sequence as a greyscale image."""
    sequence = load_sequence(args.sequence, args.width, args.height, args.threshold)
    image = energy_image(sequence, args.template)
    render_energy_image(image, args.output)
    LOGGER.info(
        f"Saved {args.template.upper()} of {sequence.frame_count} frames to {args.output}")


def create_subparser(subparsers: argparse._SubParsersAction) -> None:
    """Render-aei command parser."""
    parser = subparsers.add_parser(
        "render-aei",
        description="Save the energy template of a sequence as an 8-bit greyscale image",
        help="Render a sequence's energy template",
    )

    parser.add_argument('sequence', type=Path, help="Directory of silhouette frames.")
    parser.add_argument(
        'output', type=Path, help="Image file to write, PGM when no suffix is given.")

    add_image_args(parser)

    parser.set_defaults(func=main)
