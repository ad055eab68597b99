"""Gait-based person re-identification from active energy images and moment invariants."""
from ._version import __version__
from .energy_image import (
    ActiveEnergyImage,
    DifferenceImage,
    GaitEnergyImage,
    active_energy_image,
    difference_images,
    energy_image,
    gait_energy_image,
)
from .errors import (
    DegenerateImageError,
    GaitError,
    GalleryError,
    GalleryFormatError,
    GalleryVersionError,
    InsufficientVarianceError,
    SequenceError,
)
from .evaluation import EvaluationReport, FailedSetting, evaluate, sweep
from .gallery import Gallery, GalleryConfig
from .matching import (
    DistanceTensor,
    MatchResult,
    SequenceKey,
    apply_matching_weights,
    classify,
    distance_tensor,
    total_distances,
)
from .moments import (
    AffineTransform,
    AmiVector,
    CentralMoments,
    ami_vector,
    apply_affine,
    central_moments,
    features_from_segmented,
)
from .segmentation import SegmentedAEI, segment_aei
from .silhouettes import (
    GaitSequence,
    SilhouetteFrame,
    binarize,
    load_sequence,
    resize_binary,
)
from .synthetic import SyntheticWalkerSpec, generate_synthetic
from .whitening import WhitenedFeature, WhiteningModel, fit_whitening, whiten

__all__ = [
    'ActiveEnergyImage',
    'AffineTransform',
    'AmiVector',
    'CentralMoments',
    'DegenerateImageError',
    'DifferenceImage',
    'DistanceTensor',
    'EvaluationReport',
    'FailedSetting',
    'GaitEnergyImage',
    'GaitError',
    'GaitSequence',
    'Gallery',
    'GalleryConfig',
    'GalleryError',
    'GalleryFormatError',
    'GalleryVersionError',
    'InsufficientVarianceError',
    'MatchResult',
    'SegmentedAEI',
    'SequenceError',
    'SequenceKey',
    'SilhouetteFrame',
    'SyntheticWalkerSpec',
    'WhitenedFeature',
    'WhiteningModel',
    '__version__',
    'active_energy_image',
    'ami_vector',
    'apply_affine',
    'apply_matching_weights',
    'binarize',
    'central_moments',
    'classify',
    'difference_images',
    'distance_tensor',
    'energy_image',
    'evaluate',
    'features_from_segmented',
    'fit_whitening',
    'gait_energy_image',
    'generate_synthetic',
    'load_sequence',
    'resize_binary',
    'segment_aei',
    'sweep',
    'total_distances',
    'whiten',
]
