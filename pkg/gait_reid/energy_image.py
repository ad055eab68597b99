"""Difference images, the Active Energy Image and the Gait Energy Image."""
from pathlib import Path
from typing import List, NamedTuple, Union

import cv2
import numpy as np
from numpy.typing import NDArray

from .errors import SequenceError
from .silhouettes import GaitSequence

TEMPLATES = ('aei', 'gei')


class DifferenceImage(NamedTuple):
    """Absolute difference between a frame and its predecessor, or the first frame."""

    values: NDArray


class ActiveEnergyImage(NamedTuple):
    """Mean of the difference images of a sequence, values in [0, 1]."""

    values: NDArray
    source_frame_count: int

    @property
    def width(self) -> int:
        """Width of the template in pixels."""
        return int(self.values.shape[1])

    @property
    def height(self) -> int:
        """Height of the template in pixels."""
        return int(self.values.shape[0])


class GaitEnergyImage(NamedTuple):
    """Mean of the silhouettes of a sequence, values in [0, 1]."""

    values: NDArray

    @property
    def width(self) -> int:
        """Width of the template in pixels."""
        return int(self.values.shape[1])

    @property
    def height(self) -> int:
        """Height of the template in pixels."""
        return int(self.values.shape[0])


EnergyImage = Union[ActiveEnergyImage, GaitEnergyImage]


def difference_images(sequence: GaitSequence) -> List[DifferenceImage]:
    """
    Calculate the difference images of a sequence.

    The first output is frame 0 itself, every later output j is |frame_j - frame_(j-1)|.
    """
    if sequence.frame_count < 2:
        raise SequenceError(
            f"Sequence too short: {sequence.subject_id}/{sequence.sequence_id} has "
            f"{sequence.frame_count} frame(s), need at least 2")

    frames = sequence.stack()
    differences = np.abs(np.diff(frames, axis=0))

    return [DifferenceImage(frames[0])] + [DifferenceImage(diff) for diff in differences]


def active_energy_image(sequence: GaitSequence) -> ActiveEnergyImage:
    """Average the difference images of a sequence into its Active Energy Image."""
    differences = difference_images(sequence)
    total = np.sum([diff.values for diff in differences], axis=0)

    return ActiveEnergyImage(
        values=total / len(differences),
        source_frame_count=len(differences),
    )


def gait_energy_image(sequence: GaitSequence) -> GaitEnergyImage:
    """Average the silhouettes of a sequence into its Gait Energy Image."""
    if sequence.frame_count == 0:
        raise SequenceError(
            f"Sequence {sequence.subject_id}/{sequence.sequence_id} has no frames")

    return GaitEnergyImage(values=np.mean(sequence.stack(), axis=0))


def energy_image(sequence: GaitSequence, template: str = 'aei') -> EnergyImage:
    """Compute the named energy template of a sequence, either 'aei' or 'gei'."""
    if template == 'aei':
        return active_energy_image(sequence)
    if template == 'gei':
        return gait_energy_image(sequence)
    raise ValueError(f"Unknown template {template!r}, expected one of {TEMPLATES}")


def render_energy_image(image: EnergyImage, path: Union[str, Path]) -> None:
    """Save an energy image as an 8-bit greyscale image, scaling [0, 1] to [0, 255]."""
    path = Path(path)
    if not path.suffix:
        path = path.with_suffix('.pgm')

    grey = np.rint(np.clip(image.values, 0, 1) * 255).astype(np.uint8)
    if not cv2.imwrite(str(path), grey):
        raise OSError(f"Failed to write image {path}")
