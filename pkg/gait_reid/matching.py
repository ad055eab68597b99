"""
Per-segment distances, matching weights and nearest-neighbor classification.

Distances are held as an (n_sequences, K) array with one row per gallery
sequence; person_index maps each row to its person so persons may have
different numbers of sequences.
"""
from typing import Dict, List, NamedTuple, Optional, Sequence, Tuple

import numpy as np
from numpy.typing import NDArray

from .errors import GalleryError
from .whitening import WhitenedFeature


class SequenceKey(NamedTuple):
    """Identifies one enrolled sequence."""

    person_id: str
    sequence_id: str


class WhitenedGallery(NamedTuple):
    """
    Whitened gallery features ready for matching.

    :param keys: The sequence of each row, persons contiguous.
    :param person_index: (n,) index of each row's person, in order of appearance.
    :param features: (n, K, M) whitened features.
    :param degenerate: (n, K) flags for segments that were empty.
    """

    keys: List[SequenceKey]
    person_index: NDArray
    features: NDArray
    degenerate: NDArray


class DistanceTensor(NamedTuple):
    """
    Distances d[n, s, k] between a probe and every gallery sequence and segment.

    Entries flagged pending are segments where exactly one side was empty,
    they are resolved to the maximum distance by apply_matching_weights.
    """

    values: NDArray
    person_index: NDArray
    keys: List[SequenceKey]
    pending: NDArray

    @property
    def segment_count(self) -> int:
        """The number of segments, K."""
        return int(self.values.shape[1])


class MatchResult(NamedTuple):
    """The outcome of identifying one probe."""

    predicted_person: str
    predicted_key: SequenceKey
    total_distances: Dict[SequenceKey, float]
    per_segment_selected: Optional[NDArray] = None

    def ranked(self, count: Optional[int] = None) -> List[Tuple[SequenceKey, float]]:
        """Gallery sequences ordered by total distance, ties by key."""
        ranking = sorted(self.total_distances.items(), key=lambda item: (item[1], item[0]))
        return ranking if count is None else ranking[:count]


def person_indices(keys: Sequence[SequenceKey]) -> NDArray:
    """Number persons in order of first appearance."""
    lookup: Dict[str, int] = {}
    return np.array(
        [lookup.setdefault(key.person_id, len(lookup)) for key in keys],
        dtype=np.intp,
    )


def distance_tensor(
    probe: Sequence[WhitenedFeature],
    gallery: WhitenedGallery,
) -> DistanceTensor:
    """
    Euclidean distance between the probe and each gallery sequence, per segment.

    Segments empty on both sides have distance 0, segments empty on exactly
    one side are left pending.
    """
    segment_count = gallery.features.shape[1]
    if len(probe) != segment_count:
        raise ValueError(f"Probe has {len(probe)} segments, gallery has {segment_count}")

    probe_values = np.array([feature.values for feature in probe], dtype=np.float64)
    if probe_values.shape[1:] != gallery.features.shape[2:]:
        raise ValueError(
            f"Probe feature dimension {probe_values.shape[1:]} does not match "
            f"gallery dimension {gallery.features.shape[2:]}")
    probe_degenerate = np.array([feature.degenerate for feature in probe], dtype=bool)

    values = np.linalg.norm(gallery.features - probe_values[np.newaxis], axis=2)

    both_empty = gallery.degenerate & probe_degenerate[np.newaxis, :]
    pending = gallery.degenerate ^ probe_degenerate[np.newaxis, :]
    values[both_empty | pending] = 0.0

    return DistanceTensor(
        values=values,
        person_index=gallery.person_index,
        keys=list(gallery.keys),
        pending=pending,
    )


def apply_matching_weights(
    d: DistanceTensor,
    d_max: Optional[float] = None,
) -> Tuple[DistanceTensor, NDArray]:
    """
    Keep the distances of persons similar to the probe, raise the rest to d_max.

    For each segment, a sequence is selected when its distance is strictly
    below the smallest per-person mean distance. Every sequence of a person
    with at least one selected sequence keeps its distance, all others are
    replaced by d_max, the maximum distance over the whole tensor.

    :param d: The raw distance tensor.
    :param d_max: Override the replacement distance, defaults to the maximum of d.
    :return: The weighted tensor and the (n, K) mask of kept entries.
    """
    values = d.values.copy()
    if d_max is None:
        resolved = values[~d.pending]
        d_max = float(resolved.max()) if resolved.size else 0.0
    values[d.pending] = d_max

    person_count = int(d.person_index.max()) + 1 if len(d.keys) else 0
    sequences_per_person = np.bincount(d.person_index, minlength=person_count)

    selected = np.zeros(values.shape, dtype=bool)
    for k in range(values.shape[1]):
        column = values[:, k]
        person_means = (
            np.bincount(d.person_index, weights=column, minlength=person_count)
            / sequences_per_person
        )
        d_min = person_means.min()
        similar_persons = np.unique(d.person_index[column < d_min])
        selected[:, k] = np.isin(d.person_index, similar_persons)

    weighted = np.where(selected, values, d_max)

    return d._replace(values=weighted, pending=np.zeros_like(d.pending)), selected


def total_distances(d: DistanceTensor) -> Dict[SequenceKey, float]:
    """Sum the distances of each gallery sequence over all segments."""
    if d.pending.any():
        raise ValueError(
            "Distance tensor has unresolved entries, apply matching weights first")

    totals = np.zeros(d.values.shape[0])
    for k in range(d.values.shape[1]):
        totals += d.values[:, k]

    return {key: float(total) for key, total in zip(d.keys, totals)}


def classify(
    totals: Dict[SequenceKey, float],
    per_segment_selected: Optional[NDArray] = None,
) -> MatchResult:
    """
    Identify the probe by its nearest gallery sequence.

    Ties go to the lowest (person, sequence) key.
    """
    if not totals:
        raise GalleryError("Cannot classify against an empty gallery")

    best_key, _ = min(totals.items(), key=lambda item: (item[1], item[0]))

    return MatchResult(
        predicted_person=best_key.person_id,
        predicted_key=best_key,
        total_distances=dict(totals),
        per_segment_selected=per_segment_selected,
    )


def match(probe: Sequence[WhitenedFeature], gallery: WhitenedGallery) -> MatchResult:
    """Run distances, matching weights, totals and classification for one probe."""
    weighted, selected = apply_matching_weights(distance_tensor(probe, gallery))
    return classify(total_distances(weighted), selected)
