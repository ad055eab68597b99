"""
Synthetic walking silhouettes.

A walker is an elliptical torso under a circular head with two legs drawn as
quadrilaterals from the hip to the bottom row. The feet swing sinusoidally
in opposite phase, and the upper body bobs and sways with the stride.
Shapes are rasterized with OpenCV at sub-pixel precision so small parameter
changes move the silhouette edges.
"""
import logging
import math
from pathlib import Path
from typing import List, NamedTuple, Optional, Union

import cv2
import numpy as np
from numpy.typing import NDArray

from .silhouettes import (
    DEFAULT_HEIGHT,
    DEFAULT_WIDTH,
    GaitSequence,
    SilhouetteFrame,
    save_sequence,
)

LOGGER = logging.getLogger(__name__)

MAX_NOISE_RATE = 0.05
DEFAULT_NOISE_RATE = 0.0
DEFAULT_FRAMES = 40

# Fixed point bits used for sub-pixel drawing
_SHIFT = 4
_SCALE = 1 << _SHIFT


class SyntheticWalkerSpec(NamedTuple):
    """
    The parameters of a synthetic walker.

    Lengths are in pixels of a width x height frame.

    :param seed: The subject seed, with sequence_seed it seeds the pixel noise.
    :param swing_amplitude: Horizontal displacement of each foot from under its hip.
    :param stride_period: Frames per full gait cycle.
    :param torso_width: Full width of the torso ellipse.
    :param torso_height: Full height of the torso ellipse.
    :param head_radius: Radius of the head.
    :param leg_width: Width of each leg.
    :param noise_rate: Probability of flipping each pixel of each frame.
    :param phase: Gait phase of the first frame, in radians.
    :param sequence_seed: Distinguishes the noise of sequences of one subject.
    """

    seed: int
    swing_amplitude: float = 10.0
    stride_period: float = 18.0
    torso_width: float = 18.0
    torso_height: float = 40.0
    head_radius: float = 7.0
    leg_width: float = 7.0
    noise_rate: float = DEFAULT_NOISE_RATE
    phase: float = 0.0
    sequence_seed: int = 0
    width: int = DEFAULT_WIDTH
    height: int = DEFAULT_HEIGHT

    def validate(self) -> 'SyntheticWalkerSpec':
        """Check every parameter is in range, returning the spec unchanged."""
        if self.seed < 0 or self.sequence_seed < 0:
            raise ValueError("Seeds must be non-negative")
        if self.width < 16 or self.height < 32:
            raise ValueError(f"Frame must be at least 16x32, got {self.width}x{self.height}")
        if not 0 <= self.swing_amplitude <= self.width / 2:
            raise ValueError(
                f"Swing amplitude must be between 0 and {self.width / 2}, "
                f"got {self.swing_amplitude}")
        if self.stride_period < 2:
            raise ValueError(
                f"Stride period must be at least 2 frames, got {self.stride_period}")
        if not 0 < self.torso_width <= self.width:
            raise ValueError(
                f"Torso width must be in (0, {self.width}], got {self.torso_width}")
        if not 0 < self.leg_width <= self.torso_width:
            raise ValueError(f"Leg width must be in (0, torso width], got {self.leg_width}")
        if self.head_radius <= 0 or self.torso_height <= 0:
            raise ValueError("Head radius and torso height must be positive")
        body_height = 2 * self.head_radius + self.torso_height + self.swing_amplitude / 10
        if body_height + 12 > self.height:
            raise ValueError("Head and torso do not leave room for the legs")
        if not 0 <= self.noise_rate <= MAX_NOISE_RATE:
            raise ValueError(
                f"Noise rate must be between 0 and {MAX_NOISE_RATE}, got {self.noise_rate}")
        if not math.isfinite(self.phase):
            raise ValueError("Phase must be finite")
        return self


def walker_for_subject(
    subject_seed: int,
    noise_rate: float = DEFAULT_NOISE_RATE,
    width: int = DEFAULT_WIDTH,
    height: int = DEFAULT_HEIGHT,
) -> SyntheticWalkerSpec:
    """Draw the body and stride parameters of a subject from its seed."""
    rng = np.random.default_rng(subject_seed)
    x_scale, y_scale = width / DEFAULT_WIDTH, height / DEFAULT_HEIGHT
    torso_width = rng.uniform(14, 24) * x_scale

    return SyntheticWalkerSpec(
        seed=subject_seed,
        swing_amplitude=rng.uniform(5, 16) * x_scale,
        stride_period=rng.uniform(14, 24),
        torso_width=torso_width,
        torso_height=rng.uniform(32, 48) * y_scale,
        head_radius=rng.uniform(5.5, 9) * y_scale,
        leg_width=min(rng.uniform(4.5, 8.5) * x_scale, torso_width),
        noise_rate=noise_rate,
        width=width,
        height=height,
    ).validate()


def _fixed(*values: float) -> List[int]:
    return [int(round(value * _SCALE)) for value in values]


def render_walker(spec: SyntheticWalkerSpec, t: int) -> NDArray:
    """Rasterize the noise-free silhouette of frame t as a 0/1 uint8 array."""
    canvas = np.zeros((spec.height, spec.width), dtype=np.uint8)
    angle = spec.phase + 2 * math.pi * t / spec.stride_period
    swing = spec.swing_amplitude * math.sin(angle)

    bob = spec.swing_amplitude / 10 * abs(math.sin(angle))
    sway = spec.swing_amplitude / 20 * math.sin(angle)
    centre_x = (spec.width - 1) / 2 + sway

    head_y = 1 + spec.head_radius + bob
    cx, cy = _fixed(centre_x, head_y)
    cv2.circle(canvas, (cx, cy), _fixed(spec.head_radius)[0], 1, -1, cv2.LINE_8, _SHIFT)

    torso_y = 1 + 2 * spec.head_radius + spec.torso_height / 2 + bob
    cx, cy = _fixed(centre_x, torso_y)
    axes = _fixed(spec.torso_width / 2, spec.torso_height / 2)
    cv2.ellipse(canvas, (cx, cy), (axes[0], axes[1]), 0, 0, 360, 1, -1, cv2.LINE_8, _SHIFT)

    hip_y = torso_y + 0.35 * spec.torso_height
    foot_y = spec.height - 1
    half_leg = spec.leg_width / 2
    for side, direction in ((-1, 1), (1, -1)):
        hip_x = centre_x + side * spec.torso_width / 6
        foot_x = hip_x + direction * swing
        corners = np.array([
            _fixed(hip_x - half_leg, hip_y),
            _fixed(hip_x + half_leg, hip_y),
            _fixed(foot_x + half_leg, foot_y),
            _fixed(foot_x - half_leg, foot_y),
        ], dtype=np.int32)
        cv2.fillConvexPoly(canvas, corners, 1, cv2.LINE_8, _SHIFT)

    return canvas


def generate_synthetic(
    spec: SyntheticWalkerSpec,
    n_frames: int = DEFAULT_FRAMES,
    subject_id: Optional[str] = None,
    sequence_id: Optional[str] = None,
) -> GaitSequence:
    """
    Generate a deterministic silhouette sequence of a synthetic walker.

    Each pixel of each frame is flipped with probability spec.noise_rate,
    drawn from a generator seeded by (seed, sequence_seed).
    """
    spec.validate()
    if n_frames < 2:
        raise ValueError(f"A sequence needs at least 2 frames, got {n_frames}")

    frames = np.stack([render_walker(spec, t) for t in range(n_frames)])
    if spec.noise_rate > 0:
        rng = np.random.default_rng([spec.seed, spec.sequence_seed])
        frames ^= (rng.random(frames.shape) < spec.noise_rate).astype(np.uint8)

    return GaitSequence(
        subject_id=f"s{spec.seed:03d}" if subject_id is None else subject_id,
        sequence_id=f"q{spec.sequence_seed:03d}" if sequence_id is None else sequence_id,
        frames=[SilhouetteFrame(pixels=frame) for frame in frames],
    )


def generate_dataset(
    root: Union[str, Path],
    subjects: int,
    sequences: int,
    frames: int = DEFAULT_FRAMES,
    seed: int = 0,
    noise_rate: float = DEFAULT_NOISE_RATE,
    width: int = DEFAULT_WIDTH,
    height: int = DEFAULT_HEIGHT,
) -> List[GaitSequence]:
    """
    Write a dataset of synthetic walkers as <root>/<subject>/<sequence>/frame_NNNN.png.

    Subjects get their body from walker_for_subject, each of their sequences
    starts at a random gait phase with its own noise.
    """
    if subjects < 1 or sequences < 1:
        raise ValueError("Need at least one subject and one sequence")

    root = Path(root)
    generated = []
    for subject in range(subjects):
        subject_seed = int(np.random.default_rng([seed, subject]).integers(2**31))
        body = walker_for_subject(subject_seed, noise_rate, width, height)
        subject_id = f"subject{subject:03d}"

        for index in range(sequences):
            sequence_rng = np.random.default_rng([seed, subject, index])
            walker = body._replace(
                phase=float(sequence_rng.uniform(0, 2 * math.pi)),
                sequence_seed=int(sequence_rng.integers(2**31)),
            )
            sequence = generate_synthetic(walker, frames, subject_id, f"seq{index:02d}")
            save_sequence(sequence, root / subject_id / sequence.sequence_id)
            generated.append(sequence)

        LOGGER.debug(f"Generated {sequences} sequences of {subject_id}")

    LOGGER.info(f"Wrote {subjects} subjects x {sequences} sequences to {root}")
    return generated
