"""Loading, binarizing and resizing binary silhouette sequences."""
import logging
from pathlib import Path
from typing import Dict, List, NamedTuple, Optional, Union

import cv2
import numpy as np
from numpy.typing import NDArray

from .errors import SequenceError

LOGGER = logging.getLogger(__name__)

DEFAULT_WIDTH = 64
DEFAULT_HEIGHT = 128
DEFAULT_THRESHOLD = 0.5

FRAME_SUFFIXES = ('.pgm', '.png')


class SilhouetteFrame(NamedTuple):
    """
    A single binary silhouette frame.

    Pixels are stored row-major, the row is the image y coordinate and the
    column is the image x coordinate. Every pixel is exactly 0 or 1.
    """

    pixels: NDArray

    @property
    def width(self) -> int:
        """Width of the frame in pixels."""
        return int(self.pixels.shape[1])

    @property
    def height(self) -> int:
        """Height of the frame in pixels."""
        return int(self.pixels.shape[0])

    @classmethod
    def from_array(cls, array: NDArray) -> 'SilhouetteFrame':
        """Wrap an array of 0/1 values, checking it is a non-empty binary image."""
        pixels = np.asarray(array)
        if pixels.ndim != 2 or pixels.size == 0:
            raise SequenceError(f"Silhouette must be a non-empty 2D image, got {pixels.shape}")
        if not np.isin(pixels, (0, 1)).all():
            raise SequenceError("Silhouette pixels must be 0 or 1")
        return cls(pixels=pixels.astype(np.uint8))

    @classmethod
    def from_file(
        cls,
        filepath: Union[str, Path],
        threshold_fraction: float = DEFAULT_THRESHOLD,
    ) -> 'SilhouetteFrame':
        """Load a PGM or PNG image file and binarize it."""
        return binarize(read_grey_image(filepath), threshold_fraction)


class GaitSequence(NamedTuple):
    """An ordered sequence of equally sized silhouettes of one walk."""

    subject_id: str
    sequence_id: str
    frames: List[SilhouetteFrame]

    @property
    def frame_count(self) -> int:
        """Number of frames in the sequence."""
        return len(self.frames)

    @property
    def width(self) -> int:
        """Width of the frames in pixels."""
        return self.frames[0].width

    @property
    def height(self) -> int:
        """Height of the frames in pixels."""
        return self.frames[0].height

    def stack(self) -> NDArray:
        """Return the frames as a (frames, height, width) float64 array."""
        shapes = {frame.pixels.shape for frame in self.frames}
        if len(shapes) > 1:
            raise SequenceError(
                f"Sequence {self.subject_id}/{self.sequence_id} has frames of "
                f"mismatched sizes: {sorted(shapes)}")
        return np.stack([frame.pixels for frame in self.frames]).astype(np.float64)


def read_grey_image(filepath: Union[str, Path]) -> NDArray:
    """Decode an image file as a single channel array, keeping its bit depth."""
    filepath = Path(filepath)
    if filepath.suffix.lower() not in FRAME_SUFFIXES:
        raise SequenceError(f"Unsupported frame file: {filepath}")

    image = cv2.imread(str(filepath), cv2.IMREAD_UNCHANGED)
    if image is None:
        raise SequenceError(f"Unable to decode frame image: {filepath}")

    if image.ndim == 3:
        conversion = cv2.COLOR_BGRA2GRAY if image.shape[2] == 4 else cv2.COLOR_BGR2GRAY
        image = cv2.cvtColor(image, conversion)

    return np.asarray(image)


def _full_scale(image: NDArray) -> float:
    if image.dtype == np.bool_:
        return 1.0
    if np.issubdtype(image.dtype, np.integer):
        return float(np.iinfo(image.dtype).max)
    return 1.0


def binarize(
    frame: NDArray,
    threshold_fraction: float = DEFAULT_THRESHOLD,
    full_scale: Optional[float] = None,
) -> SilhouetteFrame:
    """
    Threshold a greyscale image into a silhouette.

    A pixel is foreground iff its grey value is strictly greater than
    threshold_fraction of the full-scale value.

    :param frame: The greyscale image.
    :param threshold_fraction: Fraction of full scale to threshold at, in (0, 1).
    :param full_scale: Override for the full-scale value, defaults to the
        maximum of the image's integer dtype or 1.0 for float images.
    """
    if not 0 < threshold_fraction < 1:
        raise ValueError(f"threshold_fraction must be in (0, 1), got {threshold_fraction}")

    image = np.asarray(frame)
    if image.size == 0:
        raise SequenceError("Cannot binarize an empty image")
    if image.ndim != 2:
        raise SequenceError(f"Expected a single channel image, got shape {image.shape}")

    if full_scale is None:
        full_scale = _full_scale(image)

    cutoff = threshold_fraction * full_scale
    return SilhouetteFrame(pixels=(image.astype(np.float64) > cutoff).astype(np.uint8))


def resize_binary(
    frame: SilhouetteFrame,
    target_width: int,
    target_height: int,
) -> SilhouetteFrame:
    """
    Resize a silhouette with nearest-neighbor sampling.

    Output pixel (i, j) takes source pixel (floor(i*src_h/dst_h), floor(j*src_w/dst_w)),
    so the output stays strictly binary.
    """
    if target_width <= 0 or target_height <= 0:
        raise ValueError(
            f"Target dimensions must be positive, got {target_width}x{target_height}")

    if (frame.width, frame.height) == (target_width, target_height):
        return frame

    rows = (np.arange(target_height) * frame.height) // target_height
    cols = (np.arange(target_width) * frame.width) // target_width

    return SilhouetteFrame(pixels=frame.pixels[np.ix_(rows, cols)])


def list_frame_files(directory: Union[str, Path]) -> List[Path]:
    """List the frame files of a sequence directory in temporal (lexicographic) order."""
    directory = Path(directory)
    if not directory.is_dir():
        raise SequenceError(f"Sequence directory not found: {directory}")

    frame_files = []
    for path in sorted(directory.iterdir()):
        if path.name.startswith('.'):
            continue
        if not path.is_file() or path.suffix.lower() not in FRAME_SUFFIXES:
            raise SequenceError(f"Non-image file in sequence directory: {path}")
        frame_files.append(path)

    return frame_files


def load_sequence(
    directory_path: Union[str, Path],
    target_width: int = DEFAULT_WIDTH,
    target_height: int = DEFAULT_HEIGHT,
    threshold_fraction: float = DEFAULT_THRESHOLD,
    *,
    subject_id: Optional[str] = None,
    sequence_id: Optional[str] = None,
) -> GaitSequence:
    """
    Load a directory of silhouette frames as a normalized gait sequence.

    Frames are binarized and then resized to the target dimensions.
    The subject and sequence ids default to the names of the parent
    directory and the directory itself, matching the
    <root>/<subject_id>/<sequence_id>/<frame>.(pgm|png) dataset layout.
    """
    directory = Path(directory_path)
    frame_files = list_frame_files(directory)
    if len(frame_files) < 2:
        raise SequenceError(
            f"Sequence too short: {directory} has {len(frame_files)} frame(s), "
            f"need at least 2")

    frames = []
    native_shape = None
    for frame_file in frame_files:
        grey = read_grey_image(frame_file)
        if native_shape is None:
            native_shape = grey.shape
        elif grey.shape != native_shape:
            raise SequenceError(
                f"Frame {frame_file} has size {grey.shape[1]}x{grey.shape[0]}, expected "
                f"{native_shape[1]}x{native_shape[0]}")

        frames.append(resize_binary(
            binarize(grey, threshold_fraction),
            target_width,
            target_height,
        ))

    LOGGER.debug(f"Loaded {len(frames)} frames from {directory}")

    return GaitSequence(
        subject_id=directory.parent.name if subject_id is None else subject_id,
        sequence_id=directory.name if sequence_id is None else sequence_id,
        frames=frames,
    )


def find_sequences(dataset_root: Union[str, Path]) -> Dict[str, List[Path]]:
    """Map each subject directory of a dataset to its sorted sequence directories."""
    root = Path(dataset_root)
    if not root.is_dir():
        raise SequenceError(f"Dataset directory not found: {root}")

    subjects: Dict[str, List[Path]] = {}
    for subject_dir in sorted(root.iterdir()):
        if not subject_dir.is_dir() or subject_dir.name.startswith('.'):
            continue
        subjects[subject_dir.name] = [
            sequence_dir
            for sequence_dir in sorted(subject_dir.iterdir())
            if sequence_dir.is_dir() and not sequence_dir.name.startswith('.')
        ]

    return subjects


def save_sequence(
    sequence: GaitSequence,
    directory: Union[str, Path],
    suffix: str = '.png',
) -> Path:
    """Write a sequence as zero-padded 8-bit frame images in a directory."""
    if suffix not in FRAME_SUFFIXES:
        raise ValueError(f"Unsupported frame format {suffix}")

    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    for index, frame in enumerate(sequence.frames):
        frame_path = directory / f"frame_{index:04d}{suffix}"
        if not cv2.imwrite(str(frame_path), frame.pixels * np.uint8(255)):
            raise OSError(f"Failed to write frame {frame_path}")

    return directory
