"""
Image moments and affine moment invariants.

The invariants are generated with the graph method: an invariant is the
integral over r points of the image of a product of cross terms
C_ij = x_i*y_j - x_j*y_i, one per edge of a graph on the points. Expanding
the product gives a polynomial in central moments that transforms by a power
of the affine determinant, which normalization by a power of mu_00 cancels.
"""
import itertools
from functools import lru_cache, reduce
from math import gcd
from typing import Dict, List, NamedTuple, Tuple

import cv2
import numpy as np
from numpy.typing import NDArray

from .errors import DegenerateImageError
from .segmentation import SegmentedAEI

MAX_ORDER = 4
AMI_COUNT = 10
# Sample positions of apply_affine are rounded to this fraction of a pixel
SUBPIXEL_STEP = 1 / 32

Order = Tuple[int, int]
Graph = Tuple[Tuple[int, int], ...]
Monomial = Tuple[Order, ...]

# Edge lists of the generating graphs, points are numbered from 0.
# The first nine give the invariants conventionally tabulated as I1, I2, I3, I4,
# I6, I7, I8, I9 and I19, the last is a weight-six graph of orders (2, 2, 4, 4).
AMI_GRAPHS: Tuple[Graph, ...] = (
    ((0, 1), (0, 1)),
    ((0, 1), (0, 1), (0, 2), (1, 3), (2, 3), (2, 3)),
    ((0, 1), (0, 1), (0, 2), (1, 2)),
    ((0, 1), (0, 1), (0, 2), (1, 3), (2, 4), (3, 4)),
    ((0, 1), (0, 1), (0, 1), (0, 1)),
    ((0, 1), (0, 1), (0, 2), (0, 2), (1, 2), (1, 2)),
    ((0, 2), (0, 2), (1, 2), (1, 2)),
    ((0, 2), (0, 2), (1, 3), (1, 3), (2, 3), (2, 3)),
    ((0, 1), (0, 3), (1, 2), (1, 3), (2, 3), (2, 3)),
    ((0, 2), (0, 3), (1, 2), (1, 3), (2, 3), (2, 3)),
)


class CentralMoments(NamedTuple):
    """
    Central moments of an image up to order four.

    :param mu: Central moment mu_ab for each order pair (a, b) with a + b <= 4,
        a is the power of the column (x) offset and b of the row (y) offset.
    :param centroid: The (x, y) centroid in pixel units.
    :param mass: The zeroth moment m_00.
    """

    mu: Dict[Order, float]
    centroid: Tuple[float, float]
    mass: float


class AmiVector(NamedTuple):
    """The 10 affine moment invariants of an image, flagged when the image was empty."""

    values: NDArray
    degenerate: bool = False

    @classmethod
    def zero(cls) -> 'AmiVector':
        """The placeholder vector of an all-zero segment."""
        return cls(values=np.zeros(AMI_COUNT), degenerate=True)


class AffineTransform(NamedTuple):
    """The affine map u = a0 + a1*x + a2*y, v = b0 + b1*x + b2*y."""

    a0: float
    a1: float
    a2: float
    b0: float
    b1: float
    b2: float

    @property
    def determinant(self) -> float:
        """Determinant of the linear part."""
        return self.a1 * self.b2 - self.a2 * self.b1

    @property
    def matrix(self) -> NDArray:
        """The forward 2x3 matrix mapping (x, y, 1) to (u, v)."""
        return np.array([
            [self.a1, self.a2, self.a0],
            [self.b1, self.b2, self.b0],
        ], dtype=np.float64)

    @classmethod
    def identity(cls) -> 'AffineTransform':
        """The identity transform."""
        return cls(0.0, 1.0, 0.0, 0.0, 0.0, 1.0)

    @classmethod
    def about_centre(
        cls,
        linear: NDArray,
        centre: Tuple[float, float],
        out_centre: Tuple[float, float],
    ) -> 'AffineTransform':
        """Build the transform applying a 2x2 linear map about a point, moved to out_centre."""
        linear = np.asarray(linear, dtype=np.float64)
        offset = np.asarray(out_centre) - linear @ np.asarray(centre)
        return cls(
            float(offset[0]), float(linear[0, 0]), float(linear[0, 1]),
            float(offset[1]), float(linear[1, 0]), float(linear[1, 1]),
        )


def _validate_image(image: NDArray) -> NDArray:
    array = np.asarray(image, dtype=np.float64)
    if array.ndim != 2 or array.size == 0:
        raise ValueError(f"Expected a non-empty 2D image, got shape {array.shape}")
    if not np.isfinite(array).all():
        raise ValueError("Image contains non-finite values")
    if (array < 0).any():
        raise ValueError("Image contains negative values")
    return array


def central_moments(image: NDArray) -> CentralMoments:
    """
    Calculate the central moments of an image up to order four.

    x is the column index and y the row index. The offsets from the centroid
    are formed before raising them to powers.
    """
    array = _validate_image(image)
    height, width = array.shape

    mass = float(array.sum())
    if mass == 0:
        raise DegenerateImageError("Image has zero mass")

    xs = np.arange(width, dtype=np.float64)
    ys = np.arange(height, dtype=np.float64)
    x_cg = float(array.sum(axis=0) @ xs) / mass
    y_cg = float(array.sum(axis=1) @ ys) / mass

    powers = np.arange(MAX_ORDER + 1)
    x_powers = (xs - x_cg)[:, np.newaxis] ** powers
    y_powers = (ys - y_cg)[:, np.newaxis] ** powers
    # table[b, a] = sum over pixels of dy^b * dx^a * A(x, y)
    table = y_powers.T @ array @ x_powers

    mu = {
        (a, b): float(table[b, a])
        for a in range(MAX_ORDER + 1)
        for b in range(MAX_ORDER + 1 - a)
    }
    # zero by construction, the computed values are rounding noise
    mu[(1, 0)] = 0.0
    mu[(0, 1)] = 0.0
    mu[(0, 0)] = mass

    return CentralMoments(mu=mu, centroid=(x_cg, y_cg), mass=mass)


def expand_graph(graph: Graph) -> Dict[Monomial, int]:
    """
    Expand the product of cross terms of a graph into a moment polynomial.

    Each monomial is the sorted tuple of the (a, b) moment orders of its points.
    Coefficients are divided by their greatest common divisor.
    """
    point_count = max(max(edge) for edge in graph) + 1
    terms: Dict[Monomial, int] = {}

    for choice in itertools.product((False, True), repeat=len(graph)):
        exponents = [[0, 0] for _ in range(point_count)]
        sign = 1
        for (i, j), swapped in zip(graph, choice):
            if swapped:
                # -x_j * y_i
                i, j = j, i
                sign = -sign
            exponents[i][0] += 1
            exponents[j][1] += 1
        monomial = tuple(sorted((a, b) for a, b in exponents))
        terms[monomial] = terms.get(monomial, 0) + sign

    terms = {monomial: coeff for monomial, coeff in terms.items() if coeff != 0}
    if not terms:
        raise ValueError(f"Graph {graph} generates an identically zero invariant")

    divisor = reduce(gcd, (abs(coeff) for coeff in terms.values()))
    return {monomial: coeff // divisor for monomial, coeff in sorted(terms.items())}


@lru_cache(maxsize=None)
def ami_polynomials() -> Tuple[Dict[Monomial, int], ...]:
    """The expanded polynomials of the invariants in AMI_GRAPHS."""
    return tuple(expand_graph(graph) for graph in AMI_GRAPHS)


def ami_vector(moments: CentralMoments) -> AmiVector:
    """
    Evaluate the 10 affine moment invariants.

    Moments are normalized as eta_ab = mu_ab / mu_00^((a+b)/2 + 1), which
    divides each invariant by mu_00 to the power (edges + points) of its graph.
    For example the first invariant is (mu_20*mu_02 - mu_11^2) / mu_00^4.
    """
    if moments.mass <= 0:
        raise DegenerateImageError("Zero mass, undefined invariants")

    eta = {
        (a, b): value / moments.mass ** ((a + b) / 2 + 1)
        for (a, b), value in moments.mu.items()
    }

    values = np.array([
        sum(
            coeff * np.prod([eta[order] for order in monomial])
            for monomial, coeff in polynomial.items()
        )
        for polynomial in ami_polynomials()
    ], dtype=np.float64)

    return AmiVector(values=values)


def image_amis(image: NDArray) -> AmiVector:
    """Affine moment invariants of an image."""
    return ami_vector(central_moments(image))


def apply_affine(
    image: NDArray,
    t: AffineTransform,
    out_width: int,
    out_height: int,
) -> NDArray:
    """
    Resample an image under an affine transform.

    Each output pixel (u, v) samples the input at the inverse-mapped point with
    OpenCV's bilinear interpolation, samples outside the input are zero. OpenCV
    rounds the sample position to the nearest SUBPIXEL_STEP before weighting,
    so results match exact bilinear interpolation only to within that step.
    """
    if abs(t.determinant) < 1e-12:
        raise ValueError(f"Degenerate affine transform, determinant {t.determinant}")

    array = _validate_image(image)
    return np.asarray(cv2.warpAffine(
        array,
        t.matrix,
        (out_width, out_height),
        flags=cv2.INTER_LINEAR,
        borderMode=cv2.BORDER_CONSTANT,
        borderValue=0,
    ))


def features_from_segmented(seg: SegmentedAEI) -> List[AmiVector]:
    """
    Affine moment invariants of each segment, top to bottom.

    All-zero segments give a zero vector flagged as degenerate.
    """
    features = []
    for segment in seg.segments:
        if not np.any(segment):
            features.append(AmiVector.zero())
        else:
            features.append(image_amis(segment))
    return features
