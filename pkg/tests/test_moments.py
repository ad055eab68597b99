import math

import numpy as np
import pytest

from gait_reid import (
    AffineTransform,
    AmiVector,
    DegenerateImageError,
    ami_vector,
    apply_affine,
    central_moments,
    features_from_segmented,
    segment_aei,
)
from gait_reid.energy_image import ActiveEnergyImage
from gait_reid.moments import (
    AMI_COUNT,
    AMI_GRAPHS,
    SUBPIXEL_STEP,
    ami_polynomials,
    expand_graph,
    image_amis,
)

SIZE = 512
OUT_SIZE = 768
BLOB_COUNT = 10
TRANSFORM_COUNT = 100


def random_blob(rng: np.random.Generator, size: int = SIZE) -> np.ndarray:
    """A smooth asymmetric image: three anisotropic Gaussians of unequal weight."""
    ys, xs = np.mgrid[0:size, 0:size].astype(float)
    image = np.zeros((size, size))
    for _ in range(3):
        cx, cy = (size - 1) / 2 + rng.uniform(-40, 40, 2)
        sx, sy = rng.uniform(18, 30, 2)
        angle = rng.uniform(0, math.pi)
        dx, dy = xs - cx, ys - cy
        u = dx * math.cos(angle) + dy * math.sin(angle)
        v = -dx * math.sin(angle) + dy * math.cos(angle)
        image += rng.uniform(0.4, 1) * np.exp(-0.5 * ((u / sx) ** 2 + (v / sy) ** 2))
    return image


def random_transform(rng: np.random.Generator) -> AffineTransform:
    """Rotation, shear and scale with determinant in [0.5, 2], centred in the output."""
    angle = rng.uniform(0, 2 * math.pi)
    shear = rng.uniform(-0.5, 0.5)
    scale = math.sqrt(rng.uniform(0.5, 2))
    rotation = np.array([
        [math.cos(angle), -math.sin(angle)],
        [math.sin(angle), math.cos(angle)],
    ])
    linear = rotation @ np.array([[1, shear], [0, 1]]) * scale
    return AffineTransform.about_centre(
        linear,
        centre=((SIZE - 1) / 2, (SIZE - 1) / 2),
        out_centre=((OUT_SIZE - 1) / 2, (OUT_SIZE - 1) / 2),
    )


def rectangle(width: int, height: int, size: int = SIZE) -> np.ndarray:
    image = np.zeros((size, size))
    top, left = (size - height) // 2, (size - width) // 2
    image[top:top + height, left:left + width] = 1
    return image


def test_point_mass():
    image = np.zeros((8, 6))
    image[5, 3] = 1

    moments = central_moments(image)

    assert moments.centroid == (3, 5)
    assert moments.mass == 1
    assert all(value == 0 for order, value in moments.mu.items() if order != (0, 0))


def test_two_points():
    image = np.zeros((3, 3))
    image[0, 0] = image[0, 2] = 1

    moments = central_moments(image)

    assert moments.centroid == (1, 0)
    assert moments.mu[(2, 0)] == 2
    assert moments.mu[(0, 2)] == 0
    assert moments.mu[(4, 0)] == 2


def test_rectangle_moments():
    w, h = 200, 120

    moments = central_moments(rectangle(w, h))

    assert moments.mu[(1, 1)] == pytest.approx(0, abs=1e-3)
    assert moments.mu[(2, 0)] == pytest.approx(w ** 3 * h / 12, rel=0.005)
    assert moments.mu[(0, 2)] == pytest.approx(w * h ** 3 / 12, rel=0.005)


def test_rectangle_first_invariant():
    amis = image_amis(rectangle(200, 120))

    assert amis.values[0] == pytest.approx(1 / 144, rel=0.01), (
        "The first invariant of a rectangle should be 1/144")


def test_centralization(rng: np.random.Generator):
    moments = central_moments(random_blob(rng, 64))

    assert moments.mu[(1, 0)] == 0
    assert moments.mu[(0, 1)] == 0
    assert set(moments.mu) == {(a, b) for a in range(5) for b in range(5 - a)}


def test_zero_mass():
    with pytest.raises(DegenerateImageError, match="zero mass"):
        central_moments(np.zeros((4, 4)))


def test_negative_image():
    with pytest.raises(ValueError):
        central_moments(-np.ones((4, 4)))


def test_first_polynomial():
    assert expand_graph(AMI_GRAPHS[0]) == {
        ((0, 2), (2, 0)): 1,
        ((1, 1), (1, 1)): -1,
    }


def test_third_order_polynomial():
    expected = {
        ((0, 3), (2, 0), (2, 1)): 1,
        ((1, 2), (1, 2), (2, 0)): -1,
        ((0, 3), (1, 1), (3, 0)): -1,
        ((1, 1), (1, 2), (2, 1)): 1,
        ((0, 2), (1, 2), (3, 0)): 1,
        ((0, 2), (2, 1), (2, 1)): -1,
    }

    polynomial = expand_graph(AMI_GRAPHS[2])

    negated = {monomial: -coeff for monomial, coeff in expected.items()}
    assert polynomial in (expected, negated)


def test_polynomials_distinct():
    polynomials = ami_polynomials()

    assert len(polynomials) == AMI_COUNT
    assert len({tuple(sorted(p.items())) for p in polynomials}) == AMI_COUNT


def test_zero_graph():
    with pytest.raises(ValueError):
        # odd powers of one cross term vanish
        expand_graph(((0, 1), (0, 1), (0, 1)))


def test_amis_finite_and_nonzero(rng: np.random.Generator):
    amis = image_amis(random_blob(rng))

    assert amis.values.shape == (AMI_COUNT,)
    assert np.isfinite(amis.values).all()
    assert (amis.values != 0).all(), "An asymmetric blob should have no vanishing invariant"
    assert not amis.degenerate


def test_ami_vector_zero_mass():
    moments = central_moments(np.ones((3, 3)))._replace(mass=0.0)

    with pytest.raises(DegenerateImageError, match="undefined invariants"):
        ami_vector(moments)


def test_translation_invariance(rng: np.random.Generator):
    image = np.zeros((200, 200))
    image[50:150, 50:150] = random_blob(rng, 100)

    shifted = np.roll(image, (17, -23), axis=(0, 1))

    assert image_amis(shifted).values == pytest.approx(
        image_amis(image).values, rel=1e-9)


def test_quarter_turn_invariance():
    image = np.zeros((SIZE, SIZE))
    image[100:400, 150:220] = 1
    image[330:400, 220:360] = 1

    rotated = np.rot90(image)

    assert image_amis(rotated).values == pytest.approx(image_amis(image).values, rel=1e-9)


def test_affine_invariance():
    rng = np.random.default_rng(20240917)
    blobs = [random_blob(rng) for _ in range(BLOB_COUNT)]
    transforms = [random_transform(rng) for _ in range(TRANSFORM_COUNT)]

    failures = []
    for blob_index, blob in enumerate(blobs):
        reference = image_amis(blob).values
        for transform_index, transform in enumerate(transforms):
            warped = apply_affine(blob, transform, OUT_SIZE, OUT_SIZE)
            values = image_amis(warped).values
            relative = np.abs(values - reference) / np.abs(reference)
            if (relative > 0.02).any():
                failures.append((blob_index, transform_index, relative.max()))

    assert not failures, f"Invariants changed by more than 2%: {failures[:5]}"


def test_affine_identity():
    image = np.arange(12, dtype=float).reshape(3, 4)

    assert np.array_equal(apply_affine(image, AffineTransform.identity(), 4, 3), image)


def test_affine_translation():
    image = np.zeros((8, 8))
    image[2, 1] = 1

    shifted = apply_affine(image, AffineTransform(3, 1, 0, 2, 0, 1), 8, 8)

    expected = np.zeros((8, 8))
    expected[4, 4] = 1
    assert np.array_equal(shifted, expected)


@pytest.mark.parametrize("offset,tolerance", [(0.5, 1e-12), (0.3, SUBPIXEL_STEP)])
def test_affine_subpixel_shift(offset: float, tolerance: float):
    ramp = np.tile(np.arange(16, dtype=float), (4, 1))

    shifted = apply_affine(ramp, AffineTransform(offset, 1, 0, 0, 0, 1), 16, 4)

    assert shifted[:, 1:-1] == pytest.approx(ramp[:, 1:-1] - offset, abs=tolerance), (
        "A shift by a whole number of sub-pixel steps should be exact")


def test_affine_quarter_turn_l_shape():
    image = np.zeros((4, 4))
    # (x, y) = (1, 1), (1, 2), (2, 2)
    image[1, 1] = image[2, 1] = image[2, 2] = 1

    # u = 3 - y, v = x
    rotated = apply_affine(image, AffineTransform(3, 0, -1, 0, 1, 0), 4, 4)

    expected = np.zeros((4, 4))
    expected[1, 2] = expected[1, 1] = expected[2, 1] = 1
    assert np.array_equal(rotated, expected)


def test_affine_degenerate():
    with pytest.raises(ValueError):
        apply_affine(np.ones((4, 4)), AffineTransform(0, 1, 2, 0, 2, 4), 4, 4)


def test_about_centre():
    transform = AffineTransform.about_centre(
        np.array([[0.0, -2.0], [1.0, 0.5]]), centre=(10, 20), out_centre=(5, 7))

    u = transform.a0 + transform.a1 * 10 + transform.a2 * 20
    v = transform.b0 + transform.b1 * 10 + transform.b2 * 20
    assert (u, v) == pytest.approx((5, 7))
    assert transform.determinant == pytest.approx(2)


def test_features_single_segment(rng: np.random.Generator):
    values = random_blob(rng, 32)
    aei = ActiveEnergyImage(values=values / values.max(), source_frame_count=2)

    [feature] = features_from_segmented(segment_aei(aei, 1))

    assert np.array_equal(feature.values, ami_vector(central_moments(aei.values)).values)


def test_features_degenerate_segment():
    values = np.zeros((12, 10))
    values[6:, 2:8] = 0.5
    aei = ActiveEnergyImage(values=values, source_frame_count=2)

    features = features_from_segmented(segment_aei(aei, 2))

    assert features[0].degenerate, "The empty top half should be flagged"
    assert np.array_equal(features[0].values, AmiVector.zero().values)
    assert not features[1].degenerate
    assert features[1].values[0] == pytest.approx(
        (6 ** 2 - 1) * (6 ** 2 - 1) / (144 * 6 ** 2 * 6 ** 2) * 0.5 ** -2), (
        "A uniform 6x6 square of value 0.5 has the discrete rectangle invariant")
