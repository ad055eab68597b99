"""Division of an energy image into horizontal strips."""
from typing import List, NamedTuple, Tuple

from numpy.typing import NDArray

from .energy_image import EnergyImage

RowRange = Tuple[int, int]


class SegmentedAEI(NamedTuple):
    """
    An energy image split into K horizontal strips, top to bottom.

    Each row range is a half-open (start_row, end_row) interval and
    segments[i] is the full-width sub-image covering row_ranges[i].
    """

    segments: List[NDArray]
    row_ranges: List[RowRange]

    @property
    def segment_count(self) -> int:
        """The number of segments, K."""
        return len(self.segments)


def segment_rows(height: int, k: int) -> List[RowRange]:
    """
    Partition the rows [0, height) into k contiguous balanced ranges.

    The first (height mod k) ranges get one extra row.
    """
    if not 1 <= k <= height:
        raise ValueError(f"Segment count must be between 1 and {height}, got {k}")

    base, remainder = divmod(height, k)
    ranges = []
    start = 0
    for index in range(k):
        end = start + base + (1 if index < remainder else 0)
        ranges.append((start, end))
        start = end

    return ranges


def segment_aei(aei: EnergyImage, k: int) -> SegmentedAEI:
    """Split an energy image into k horizontal strips of near-equal height."""
    row_ranges = segment_rows(aei.height, k)

    return SegmentedAEI(
        segments=[aei.values[start:end, :] for start, end in row_ranges],
        row_ranges=row_ranges,
    )
