"""
Enroll silhouette sequences into a gallery file.

Every sequence directory under the dataset root is enrolled under its
subject directory's name and the gallery is finalized before saving.
"""
import argparse
import logging
from pathlib import Path

from ..gallery import Gallery
from ..silhouettes import find_sequences, load_sequence
from .utils import add_image_args, add_model_args, config_from_args

LOGGER = logging.getLogger(__name__)


def main(args: argparse.Namespace) -> None:
    """Enroll a dataset and save the finalized gallery."""
    config = config_from_args(args)

    if args.append and args.gallery.exists():
        gallery = Gallery.load(args.gallery)
        if gallery.config != config:
            LOGGER.warning("Appending with the configuration stored in the existing gallery")
    else:
        gallery = Gallery(config)

    for subject, sequence_dirs in find_sequences(args.data).items():
        for sequence_dir in sequence_dirs:
            gallery.enroll(load_sequence(
                sequence_dir,
                gallery.config.width,
                gallery.config.height,
                gallery.config.threshold_fraction,
                subject_id=subject,
            ))

    if not args.no_finalize:
        gallery.finalize()
    gallery.save(args.gallery)
    print(f"Enrolled {len(gallery.persons)} persons, {len(gallery.sequences)} sequences")


def create_subparser(subparsers: argparse._SubParsersAction) -> None:
    """Enroll command parser."""
    parser = subparsers.add_parser(
        "enroll",
        description="Enroll every sequence of a dataset into a gallery file",
        help="Enroll sequences into a gallery",
    )

    parser.add_argument(
        '--data', type=Path, required=True,
        help="Dataset root laid out as <subject>/<sequence>/<frames>.")
    parser.add_argument('--gallery', type=Path, required=True, help="Gallery file to write.")
    parser.add_argument(
        '--append', action='store_true',
        help="Add to an existing gallery file instead of replacing it.")
    parser.add_argument(
        '--no-finalize', action='store_true',
        help="Save without fitting the whitening models.")

    add_image_args(parser)
    add_model_args(parser)

    parser.set_defaults(func=main)
