from typing import List

import numpy as np
import pytest

from gait_reid import (
    DistanceTensor,
    GalleryError,
    SequenceKey,
    apply_matching_weights,
    classify,
    distance_tensor,
    total_distances,
)
from gait_reid.matching import WhitenedGallery, match, person_indices
from gait_reid.whitening import WhitenedFeature

ORACLE_CASES = 1000


def make_tensor(nested: List[List[List[float]]]) -> DistanceTensor:
    """Build a tensor from d[person][sequence][segment] lists."""
    keys, rows = [], []
    for n, person in enumerate(nested):
        for s, segments in enumerate(person):
            keys.append(SequenceKey(f"p{n}", f"s{s}"))
            rows.append(segments)
    values = np.array(rows, dtype=np.float64)
    return DistanceTensor(
        values=values,
        person_index=person_indices(keys),
        keys=keys,
        pending=np.zeros(values.shape, dtype=bool),
    )


def make_gallery(features, degenerate=None) -> WhitenedGallery:
    """A gallery of one person per row, features shaped (n, K, M)."""
    features = np.asarray(features, dtype=np.float64)
    keys = [SequenceKey(f"p{n}", "s0") for n in range(features.shape[0])]
    if degenerate is None:
        degenerate = np.zeros(features.shape[:2], dtype=bool)
    return WhitenedGallery(
        keys=keys,
        person_index=person_indices(keys),
        features=features,
        degenerate=np.asarray(degenerate, dtype=bool),
    )


def make_probe(values, degenerate=None) -> List[WhitenedFeature]:
    degenerate = degenerate or [False] * len(values)
    return [
        WhitenedFeature(np.asarray(v, dtype=np.float64), segment_index=k, degenerate=flag)
        for k, (v, flag) in enumerate(zip(values, degenerate))
    ]


def literal_matching(d):
    """
    Weight, sum and classify d[n][s][k] one step at a time with plain loops.

    Returns the weighted nested lists, the totals in (n, s) order and the
    (n, s) of the nearest sequence.
    """
    persons = len(d)
    segments = len(d[0][0])

    d_max = 0.0
    for n in range(persons):
        for s in range(len(d[n])):
            for k in range(segments):
                if d[n][s][k] > d_max:
                    d_max = d[n][s][k]

    weighted = [[[d_max] * segments for _ in person] for person in d]
    for k in range(segments):
        means = []
        for n in range(persons):
            total = 0.0
            for s in range(len(d[n])):
                total += d[n][s][k]
            means.append(total / len(d[n]))
        d_min = min(means)

        for n in range(persons):
            person_selected = False
            for s in range(len(d[n])):
                if d[n][s][k] < d_min:
                    person_selected = True
            if person_selected:
                for s in range(len(d[n])):
                    weighted[n][s][k] = d[n][s][k]

    totals = []
    for n in range(persons):
        for s in range(len(d[n])):
            total = 0.0
            for k in range(segments):
                total += weighted[n][s][k]
            totals.append(((n, s), total))

    best = totals[0]
    for candidate in totals[1:]:
        if candidate[1] < best[1]:
            best = candidate

    return weighted, [total for _, total in totals], best[0]


def random_nested(rng: np.random.Generator) -> List[List[List[float]]]:
    persons = int(rng.integers(1, 6))
    segments = int(rng.integers(1, 5))
    # small integers produce ties and equal means
    ties = rng.random() < 0.3
    nested = []
    for _ in range(persons):
        shape = (int(rng.integers(1, 4)), segments)
        values = rng.integers(0, 4, shape) if ties else rng.uniform(0, 10, shape)
        nested.append(values.astype(float).tolist())
    return nested


def test_self_distance():
    gallery = make_gallery([[[1.0, 2.0], [3.0, 4.0]], [[0.0, 0.0], [1.0, 1.0]]])

    d = distance_tensor(make_probe([[1.0, 2.0], [3.0, 4.0]]), gallery)

    assert d.values[0].tolist() == [0.0, 0.0]
    assert (d.values[1] > 0).all()


def test_scalar_distance():
    d = distance_tensor(make_probe([[0.0]]), make_gallery([[[3.0]]]))

    assert d.values.tolist() == [[3.0]]


def test_three_four_five():
    d = distance_tensor(make_probe([[1.0, 2.0]]), make_gallery([[[4.0, 6.0]]]))

    assert d.values.tolist() == [[5.0]]


def test_distance_segment_mismatch():
    with pytest.raises(ValueError, match="segments"):
        distance_tensor(make_probe([[0.0]]), make_gallery([[[1.0], [2.0]]]))


def test_distance_dimension_mismatch():
    with pytest.raises(ValueError, match="dimension"):
        distance_tensor(make_probe([[0.0, 1.0]]), make_gallery([[[1.0]]]))


def test_degenerate_segments():
    gallery = make_gallery(
        [[[0.0], [0.0]], [[0.0], [4.0]]],
        degenerate=[[True, True], [False, False]],
    )

    d = distance_tensor(make_probe([[0.0], [1.0]], degenerate=[True, False]), gallery)

    assert d.values[0, 0] == 0, "Segments empty on both sides should match exactly"
    assert d.pending.tolist() == [[False, True], [True, False]]

    weighted, _ = apply_matching_weights(d)

    assert weighted.values[1, 0] == 3.0, "Pending entries should take the largest distance"
    assert weighted.values[0, 1] == 3.0
    assert not weighted.pending.any()


def test_worked_example():
    d = make_tensor([[[1.0], [3.0]], [[4.0], [6.0]]])

    weighted, selected = apply_matching_weights(d)

    assert weighted.values.tolist() == [[1.0], [3.0], [6.0], [6.0]]
    assert selected.tolist() == [[True], [True], [False], [False]], (
        "Selecting one sequence of a person should keep all of that person's sequences")

    totals = total_distances(weighted)
    assert totals == {
        SequenceKey("p0", "s0"): 1.0,
        SequenceKey("p0", "s1"): 3.0,
        SequenceKey("p1", "s0"): 6.0,
        SequenceKey("p1", "s1"): 6.0,
    }
    assert classify(totals).predicted_person == "p0"


def test_single_person_unchanged():
    d = make_tensor([[[1.0, 5.0], [3.0, 2.0], [2.0, 9.0]]])

    weighted, _ = apply_matching_weights(d)

    assert np.array_equal(weighted.values, d.values)


def test_all_equal_unchanged():
    d = make_tensor([[[2.0, 2.0], [2.0, 2.0]], [[2.0, 2.0]]])

    weighted, selected = apply_matching_weights(d)

    assert not selected.any(), "Strict comparison should select nothing when all are equal"
    assert np.array_equal(weighted.values, d.values)


def test_uneven_sequence_counts():
    # person means: p0 = 2, p1 = 4, so only p0's 1.0 is below the minimum
    d = make_tensor([[[1.0], [3.0]], [[4.0]]])

    weighted, _ = apply_matching_weights(d)

    assert weighted.values.ravel().tolist() == [1.0, 3.0, 4.0]


def test_explicit_d_max():
    d = make_tensor([[[1.0], [3.0]], [[4.0], [6.0]]])

    weighted, _ = apply_matching_weights(d, d_max=100.0)

    assert weighted.values.ravel().tolist() == [1.0, 3.0, 100.0, 100.0]


def test_totals_single_segment():
    d = make_tensor([[[1.5]], [[2.5]]])

    assert list(total_distances(d).values()) == [1.5, 2.5]


def test_totals_zero_tensor():
    d = make_tensor([[[0.0, 0.0]], [[0.0, 0.0]]])

    assert set(total_distances(d).values()) == {0.0}


def test_totals_reject_pending():
    d = make_tensor([[[1.0]], [[2.0]]])
    d = d._replace(pending=np.array([[True], [False]]))

    with pytest.raises(ValueError, match="unresolved"):
        total_distances(d)


def test_classify_single_sequence():
    result = classify({SequenceKey("only", "s1"): 42.0})

    assert result.predicted_person == "only"
    assert result.predicted_key == SequenceKey("only", "s1")


def test_classify_tie():
    totals = {
        SequenceKey("p2", "s1"): 3.0,
        SequenceKey("p1", "s2"): 3.0,
        SequenceKey("p1", "s1"): 3.0,
    }

    result = classify(totals)

    assert result.predicted_key == SequenceKey("p1", "s1"), (
        "Ties should go to the lowest person then the lowest sequence")


def test_classify_empty():
    with pytest.raises(GalleryError):
        classify({})


def test_ranked():
    result = classify({
        SequenceKey("b", "s1"): 2.0,
        SequenceKey("a", "s1"): 2.0,
        SequenceKey("c", "s1"): 1.0,
    })

    assert [key.person_id for key, _ in result.ranked()] == ["c", "a", "b"]
    assert len(result.ranked(2)) == 2


def test_match():
    keys = [SequenceKey("p0", "s0"), SequenceKey("p0", "s1"),
            SequenceKey("p1", "s0"), SequenceKey("p1", "s1")]
    gallery = WhitenedGallery(
        keys=keys,
        person_index=person_indices(keys),
        features=np.array([[[0.0], [0.0]], [[1.0], [1.0]], [[5.0], [5.0]], [[4.0], [6.0]]]),
        degenerate=np.zeros((4, 2), dtype=bool),
    )

    result = match(make_probe([[4.8], [5.5]]), gallery)

    assert result.predicted_key == SequenceKey("p1", "s0")
    assert result.per_segment_selected.tolist() == [
        [False, False], [False, False], [True, False], [True, False]]


def test_single_sequence_persons_never_selected():
    # each person mean is its only distance, so nothing is strictly below the minimum
    gallery = make_gallery([[[0.0]], [[5.0]], [[9.0]]])

    result = match(make_probe([[4.5]]), gallery)

    assert not result.per_segment_selected.any()
    assert set(result.total_distances.values()) == {4.5}


def test_matching_oracle():
    rng = np.random.default_rng(20240611)

    for case in range(ORACLE_CASES):
        nested = random_nested(rng)
        weighted, totals, (n, s) = literal_matching(nested)

        result, _ = apply_matching_weights(make_tensor(nested))
        computed_totals = total_distances(result)
        prediction = classify(computed_totals)

        flat_weighted = [segments for person in weighted for segments in person]
        assert result.values.tolist() == flat_weighted, f"Weighted tensors differ, case {case}"
        assert list(computed_totals.values()) == totals, f"Totals differ in case {case}"
        assert prediction.predicted_key == SequenceKey(f"p{n}", f"s{s}"), (
            f"Predictions differ in case {case}")


def test_weights_never_decrease(rng: np.random.Generator):
    for _ in range(200):
        d = make_tensor(random_nested(rng))

        weighted, _ = apply_matching_weights(d)

        assert (weighted.values >= d.values).all()


def test_weights_idempotent(rng: np.random.Generator):
    for _ in range(200):
        d = make_tensor(random_nested(rng))
        d_max = float(d.values.max())

        once, selected = apply_matching_weights(d)
        twice, selected_again = apply_matching_weights(once, d_max=d_max)

        assert np.array_equal(once.values, twice.values)
        assert np.array_equal(selected, selected_again)


@pytest.mark.parametrize("scale", [1e-6, 0.5, 3.0, 1e6])
def test_classify_scale_invariant(rng: np.random.Generator, scale: float):
    for _ in range(50):
        totals = total_distances(apply_matching_weights(make_tensor(random_nested(rng)))[0])

        scaled = {key: value * scale for key, value in totals.items()}

        assert classify(scaled).predicted_key == classify(totals).predicted_key
