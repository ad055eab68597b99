"""Generate a dataset of synthetic walking silhouettes."""
import argparse
import logging
from pathlib import Path

from ..silhouettes import DEFAULT_HEIGHT, DEFAULT_WIDTH
from ..synthetic import DEFAULT_FRAMES, DEFAULT_NOISE_RATE, MAX_NOISE_RATE, generate_dataset

LOGGER = logging.getLogger(__name__)


def main(args: argparse.Namespace) -> None:
    """Write synthetic subjects to the output directory."""
    sequences = generate_dataset(
        Path(args.out),
        subjects=args.subjects,
        sequences=args.sequences,
        frames=args.frames,
        seed=args.seed,
        noise_rate=args.noise,
        width=args.width,
        height=args.height,
    )
    print(f"Generated {len(sequences)} sequences in {args.out}")


def create_subparser(subparsers: argparse._SubParsersAction) -> None:
    """Synth command parser."""
    parser = subparsers.add_parser(
        "synth",
        description=(
            "Generate synthetic walkers as <out>/<subject>/<sequence>/frame_NNNN.png, "
            "each subject with its own body shape and stride"
        ),
        help="Generate a synthetic silhouette dataset",
    )

    parser.add_argument('--out', type=Path, required=True, help="Directory to write to.")
    parser.add_argument('--subjects', type=int, default=10, help="Number of subjects.")
    parser.add_argument(
        '--sequences', type=int, default=6, help="Number of sequences per subject.")
    parser.add_argument(
        '--frames', type=int, default=DEFAULT_FRAMES, help="Number of frames per sequence.")
    parser.add_argument('--seed', type=int, default=0, help="Seed of the generator.")
    parser.add_argument(
        '--noise', type=float, default=DEFAULT_NOISE_RATE,
        help=f"Per-pixel flip probability, at most {MAX_NOISE_RATE}")
    parser.add_argument('--width', type=int, default=DEFAULT_WIDTH, help="Frame width.")
    parser.add_argument('--height', type=int, default=DEFAULT_HEIGHT, help="Frame height.")

    parser.set_defaults(func=main)
