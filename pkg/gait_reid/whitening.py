"""PCA whitening of per-segment affine moment invariant vectors."""
from typing import NamedTuple, Sequence, Union

import numpy as np
from numpy.typing import NDArray

from .errors import InsufficientVarianceError
from .moments import AMI_COUNT, AmiVector

# Eigenvalues of the standardized covariance at or below this are unavailable components
EIGENVALUE_FLOOR = 1e-12
# A coordinate whose spread is at or below this fraction of its magnitude is constant
NOISE_FLOOR = 1e-12


class WhiteningModel(NamedTuple):
    """
    A PCA whitening model for one segment.

    :param segment_index: The segment the model was fitted on.
    :param mean: Mean of the fitted samples.
    :param basis: (M, D) array, rows are orthonormal principal directions.
    :param eigenvalues: The M eigenvalues matching the basis rows, descending.
    """

    segment_index: int
    mean: NDArray
    basis: NDArray
    eigenvalues: NDArray

    @property
    def output_dim(self) -> int:
        """The number of retained components, M."""
        return int(self.basis.shape[0])


class WhitenedFeature(NamedTuple):
    """A feature vector projected and scaled by a whitening model."""

    values: NDArray
    segment_index: int
    degenerate: bool = False


def _as_matrix(samples: Union[Sequence[AmiVector], Sequence[NDArray], NDArray]) -> NDArray:
    rows = [
        sample.values if isinstance(sample, AmiVector) else sample
        for sample in samples
    ]
    if not rows:
        return np.zeros((0, 0))
    return np.asarray(rows, dtype=np.float64)


def standardized_rank(samples: NDArray, centred: NDArray) -> int:
    """Count the eigenvalues of the standardized sample covariance above the floor."""
    count = samples.shape[0]
    spread = np.sqrt(np.sum(centred ** 2, axis=0) / (count - 1))
    magnitude = np.sqrt(np.mean(samples ** 2, axis=0))
    varying = spread > NOISE_FLOOR * magnitude
    if not varying.any():
        return 0

    standardized = centred[:, varying] / spread[varying]
    eigenvalues = np.linalg.svd(standardized, compute_uv=False) ** 2 / (count - 1)
    return int(np.count_nonzero(eigenvalues > EIGENVALUE_FLOOR))


def identity_model(segment_index: int, m: int) -> WhiteningModel:
    """
    A model that keeps the first m invariants unchanged.

    Used for segments that are empty in too many gallery sequences to fit.
    """
    if not 1 <= m <= AMI_COUNT:
        raise ValueError(f"Output dimension must be between 1 and {AMI_COUNT}, got {m}")
    return WhiteningModel(
        segment_index=segment_index,
        mean=np.zeros(AMI_COUNT),
        basis=np.eye(m, AMI_COUNT),
        eigenvalues=np.ones(m),
    )


def fit_whitening(
    gallery_features: Union[Sequence[AmiVector], Sequence[NDArray], NDArray],
    m: int,
    segment_index: int = 0,
) -> WhiteningModel:
    """
    Fit a whitening model keeping the top m principal components.

    Covariance uses 1/(count-1) normalization. The principal directions are
    the right singular vectors of the centred samples, which keeps the small
    components accurate when invariants differ in scale by many orders of
    magnitude. The available rank is counted on the covariance of the
    standardized coordinates, so the floor does not depend on those scales.
    Each basis row is signed so that its largest-magnitude entry is positive.

    :param gallery_features: The samples of one segment, one row per sequence.
    :param m: The number of components to keep.
    :param segment_index: The segment these samples belong to.
    """
    samples = _as_matrix(gallery_features)
    count = samples.shape[0]
    if count < 2:
        raise InsufficientVarianceError(
            f"Segment {segment_index}: whitening needs at least 2 samples, got {count}")

    dims = samples.shape[1]
    if not 1 <= m <= dims:
        raise ValueError(f"Output dimension must be between 1 and {dims}, got {m}")

    mean = samples.mean(axis=0)
    centred = samples - mean

    rank = standardized_rank(samples, centred)
    if m > rank:
        raise InsufficientVarianceError(
            f"Segment {segment_index}: insufficient variance rank, "
            f"{rank} component(s) available, {m} requested")

    _, _, directions = np.linalg.svd(centred, full_matrices=False)
    basis = directions[:m].copy()
    for row in basis:
        if row[np.argmax(np.abs(row))] < 0:
            row *= -1

    # Rayleigh quotients of the kept directions, the sample variance along each
    variances = np.sum((centred @ basis.T) ** 2, axis=0) / (count - 1)
    if not (variances > 0).all():
        raise InsufficientVarianceError(
            f"Segment {segment_index}: insufficient variance rank, "
            f"component {int(np.argmin(variances)) + 1} has no variance")

    return WhiteningModel(
        segment_index=segment_index,
        mean=mean,
        basis=basis,
        eigenvalues=variances,
    )


def whiten_matrix(model: WhiteningModel, features: NDArray) -> NDArray:
    """Whiten each row of an (n, D) array, returning an (n, M) array."""
    projected = (np.asarray(features, dtype=np.float64) - model.mean) @ model.basis.T
    return projected / np.sqrt(model.eigenvalues)


def whiten(model: WhiteningModel, feature: Union[AmiVector, NDArray]) -> WhitenedFeature:
    """Project a feature on the model's basis and scale each component to unit variance."""
    if isinstance(feature, AmiVector):
        values, degenerate = feature.values, feature.degenerate
    else:
        values, degenerate = np.asarray(feature), False

    return WhitenedFeature(
        values=whiten_matrix(model, values[np.newaxis, :])[0],
        segment_index=model.segment_index,
        degenerate=degenerate,
    )
