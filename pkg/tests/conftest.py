from typing import Callable

import numpy as np
import pytest

from gait_reid.silhouettes import GaitSequence
from gait_reid.synthetic import generate_synthetic, walker_for_subject

WalkerFactory = Callable[..., GaitSequence]


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(12345)


@pytest.fixture
def make_walker() -> WalkerFactory:
    """Build a synthetic sequence of subject p<subject>, sequence s<index>."""
    def walker(
        subject: int,
        index: int,
        width: int = 64,
        height: int = 128,
        frames: int = 20,
    ) -> GaitSequence:
        spec = walker_for_subject(subject, width=width, height=height)._replace(
            phase=0.7 * index, sequence_seed=index)
        return generate_synthetic(spec, frames, f"p{subject}", f"s{index}")

    return walker
