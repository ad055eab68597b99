"""Utility functions for the CLI."""
import argparse
import os
from typing import List, Optional

from ..energy_image import TEMPLATES
from ..gallery import GalleryConfig
from ..silhouettes import DEFAULT_HEIGHT, DEFAULT_THRESHOLD, DEFAULT_WIDTH

WORKERS_ENV = 'GAIT_REID_WORKERS'


def add_image_args(parser: argparse.ArgumentParser) -> None:
    """Add the silhouette loading and template arguments."""
    parser.add_argument(
        '--width', type=int, default=DEFAULT_WIDTH,
        help=f"Width to resize silhouettes to, defaults to {DEFAULT_WIDTH}")
    parser.add_argument(
        '--height', type=int, default=DEFAULT_HEIGHT,
        help=f"Height to resize silhouettes to, defaults to {DEFAULT_HEIGHT}")
    parser.add_argument(
        '--threshold', type=float, default=DEFAULT_THRESHOLD,
        help=(
            "Binarization threshold as a fraction of the full-scale grey value, "
            f"defaults to {DEFAULT_THRESHOLD}"
        ))
    parser.add_argument(
        '--template', default='aei', choices=TEMPLATES,
        help="Energy template to extract features from, defaults to 'aei'")


def add_model_args(parser: argparse.ArgumentParser) -> None:
    """Add the single valued segment and dimension arguments."""
    defaults = GalleryConfig()
    parser.add_argument(
        '--segments', type=int, default=defaults.k_segments,
        help=f"Number of horizontal segments K, defaults to {defaults.k_segments}")
    parser.add_argument(
        '--dims', type=int, default=defaults.m_dims,
        help=f"Number of whitened dimensions M, defaults to {defaults.m_dims}")


def add_workers_arg(parser: argparse.ArgumentParser) -> None:
    """Add the probe worker count argument, defaulting from the environment."""
    parser.add_argument(
        '--workers', type=int, default=default_workers(),
        help=f"Threads used to identify probes, defaults to ${WORKERS_ENV} or 1")


def default_workers() -> int:
    """Read the default worker count from the environment."""
    value = os.environ.get(WORKERS_ENV, '1')
    try:
        return max(int(value), 1)
    except ValueError:
        return 1


def config_from_args(
    args: argparse.Namespace,
    k_segments: Optional[int] = None,
    m_dims: Optional[int] = None,
) -> GalleryConfig:
    """
    Build and validate a gallery config from the parsed arguments.

    K and M are taken from --segments and --dims unless given explicitly.
    """
    defaults = GalleryConfig()
    if k_segments is None:
        k_segments = getattr(args, 'segments', defaults.k_segments)
    if m_dims is None:
        m_dims = getattr(args, 'dims', defaults.m_dims)
    return GalleryConfig(
        width=args.width,
        height=args.height,
        k_segments=k_segments,
        m_dims=m_dims,
        threshold_fraction=args.threshold,
        template=args.template,
    ).validate()


def parse_ranges(ranges: str) -> List[int]:
    """
    Parse a comma separated list of integers which may include ranges.

    Ranges are hyphen-separated inclusive bounds with an optional step after
    a colon, so "5-30:5" is 5, 10, 15, 20, 25, 30.
    """
    result: List[int] = []
    for part in ranges.split(","):
        part = part.strip()
        if "-" in part:
            bounds, _, step_ = part.partition(":")
            a_, b_ = bounds.split("-")
            a, b = int(a_), int(b_)
            step = int(step_) if step_ else 1
            if step < 1 or b < a:
                raise argparse.ArgumentTypeError(f"Invalid range {part!r}")
            result.extend(range(a, b + 1, step))
        else:
            result.append(int(part))
    return result


def parse_float_list(values: str) -> List[float]:
    """Parse a comma separated list of real numbers."""
    return [float(value) for value in values.split(",")]


def int_list(values: str) -> List[int]:
    """Argparse type for integer lists and ranges."""
    try:
        return parse_ranges(values)
    except ValueError:
        raise argparse.ArgumentTypeError(f"Invalid integer list {values!r}") from None


def float_list(values: str) -> List[float]:
    """Argparse type for real number lists."""
    try:
        return parse_float_list(values)
    except ValueError:
        raise argparse.ArgumentTypeError(f"Invalid number list {values!r}") from None
