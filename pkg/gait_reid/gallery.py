"""
Enrolled galleries of gait features, their whitening models and persistence.

A gallery file is line-oriented UTF-8 text:

    GAITGALLERY v1
    config <width> <height> <K> <M> <threshold> [<template>]
    model <k> <mean: 10 reals> <eigenvalues: M reals> <basis: M rows of 10 reals>
    seq <person_id> <sequence_id>
    ami <k> <flag> <10 reals>
    end <model count> <sequence count>

There are K model lines when the gallery is finalized and none otherwise.
Each seq line is followed by K ami lines. Segments are numbered from 0 and
reals are written as the shortest decimal that round-trips.
"""
import logging
from pathlib import Path
from typing import Dict, Iterator, List, NamedTuple, Optional, Sequence, Union

import numpy as np
from numpy.typing import NDArray

from .energy_image import TEMPLATES, energy_image
from .errors import (
    GalleryError,
    GalleryFormatError,
    GalleryVersionError,
    InsufficientVarianceError,
)
from .matching import (
    MatchResult,
    SequenceKey,
    WhitenedGallery,
    match,
    person_indices,
)
from .moments import AMI_COUNT, AmiVector, features_from_segmented
from .segmentation import segment_aei
from .silhouettes import DEFAULT_HEIGHT, DEFAULT_THRESHOLD, DEFAULT_WIDTH, GaitSequence
from .whitening import (
    WhitenedFeature,
    WhiteningModel,
    fit_whitening,
    identity_model,
    whiten,
    whiten_matrix,
)

LOGGER = logging.getLogger(__name__)

FORMAT_VERSION = 1
MAGIC = 'GAITGALLERY'


class GalleryConfig(NamedTuple):
    """
    Pipeline settings shared by every sequence of a gallery.

    :param width: Width silhouettes are resized to.
    :param height: Height silhouettes are resized to.
    :param k_segments: Number of horizontal segments, K.
    :param m_dims: Number of whitened dimensions kept per segment, M.
    :param threshold_fraction: Binarization threshold as a fraction of full scale.
    :param template: The energy template, 'aei' or 'gei'.
    :param format_version: Gallery file format version.
    """

    width: int = DEFAULT_WIDTH
    height: int = DEFAULT_HEIGHT
    k_segments: int = 23
    m_dims: int = 5
    threshold_fraction: float = DEFAULT_THRESHOLD
    template: str = 'aei'
    format_version: int = FORMAT_VERSION

    def validate(self) -> 'GalleryConfig':
        """Check the settings are consistent, returning the config unchanged."""
        if self.width <= 0 or self.height <= 0:
            raise ValueError(f"Dimensions must be positive, got {self.width}x{self.height}")
        if not 1 <= self.k_segments <= self.height:
            raise ValueError(
                f"Segment count must be between 1 and {self.height}, got {self.k_segments}")
        if not 1 <= self.m_dims <= AMI_COUNT:
            raise ValueError(
                f"Whitened dimensions must be between 1 and {AMI_COUNT}, got {self.m_dims}")
        if not 0 < self.threshold_fraction < 1:
            raise ValueError(
                f"threshold_fraction must be in (0, 1), got {self.threshold_fraction}")
        if self.template not in TEMPLATES:
            raise ValueError(
                f"Unknown template {self.template!r}, expected one of {TEMPLATES}")
        if self.format_version != FORMAT_VERSION:
            raise ValueError(f"Unsupported gallery format version {self.format_version}")
        return self


class EnrolledSequence(NamedTuple):
    """The raw per-segment features of one enrolled sequence."""

    key: SequenceKey
    features: NDArray  # (K, 10)
    degenerate: NDArray  # (K,) bool

    def ami_vectors(self) -> List[AmiVector]:
        """The features as one AmiVector per segment."""
        return [
            AmiVector(values=values, degenerate=bool(flag))
            for values, flag in zip(self.features, self.degenerate)
        ]


def sequence_features(sequence: GaitSequence, config: GalleryConfig) -> List[AmiVector]:
    """Extract the per-segment invariants of a sequence: template, segments, moments."""
    if (sequence.width, sequence.height) != (config.width, config.height):
        raise GalleryError(
            f"Sequence {sequence.subject_id}/{sequence.sequence_id} is "
            f"{sequence.width}x{sequence.height}, gallery expects "
            f"{config.width}x{config.height}")

    template = energy_image(sequence, config.template)
    return features_from_segmented(segment_aei(template, config.k_segments))


def _check_label(label: str, kind: str) -> None:
    if not label or label.split() != [label]:
        raise GalleryError(
            f"Invalid {kind} {label!r}, ids must be non-empty without whitespace")


class Gallery:
    """
    A database of enrolled gait sequences.

    Sequences are enrolled with their raw invariants. finalize() fits one
    whitening model per segment over the enrolled set, after which the
    gallery can identify probes. Enrolling again marks the models stale
    until the next finalize().
    """

    def __init__(self, config: Optional[GalleryConfig] = None) -> None:
        self.config = (config or GalleryConfig()).validate()
        self._sequences: Dict[SequenceKey, EnrolledSequence] = {}
        self._models: Optional[List[WhiteningModel]] = None
        self._whitened: Optional[WhitenedGallery] = None

    def __repr__(self) -> str:
        return (
            f"Gallery(persons={len(self.persons)}, sequences={len(self._sequences)}, "
            f"finalized={self.is_finalized})"
        )

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Gallery):
            return NotImplemented
        if self.config != other.config or sorted(self._sequences) != sorted(other._sequences):
            return False
        if not all(
            np.array_equal(a.features, b.features)
            and np.array_equal(a.degenerate, b.degenerate)
            for a, b in zip(self.sequences, other.sequences)
        ):
            return False
        if (self._models is None) != (other._models is None):
            return False
        return self._models is None or all(
            a.segment_index == b.segment_index
            and np.array_equal(a.mean, b.mean)
            and np.array_equal(a.basis, b.basis)
            and np.array_equal(a.eigenvalues, b.eigenvalues)
            for a, b in zip(self.models, other.models)
        )

    @property
    def sequences(self) -> List[EnrolledSequence]:
        """Enrolled sequences in canonical (person_id, sequence_id) order."""
        return [self._sequences[key] for key in sorted(self._sequences)]

    @property
    def persons(self) -> Dict[str, List[str]]:
        """Map each person to their sequence ids, both sorted."""
        persons: Dict[str, List[str]] = {}
        for key in sorted(self._sequences):
            persons.setdefault(key.person_id, []).append(key.sequence_id)
        return persons

    @property
    def is_finalized(self) -> bool:
        """Whether the whitening models are fitted and current."""
        return self._models is not None

    @property
    def models(self) -> List[WhiteningModel]:
        """The per-segment whitening models."""
        if self._models is None:
            raise GalleryError("Gallery is not finalized")
        return list(self._models)

    def enroll(self, sequence: GaitSequence) -> 'Gallery':
        """Extract the features of a sequence and add them under its subject id."""
        _check_label(sequence.subject_id, 'subject id')
        _check_label(sequence.sequence_id, 'sequence id')
        key = SequenceKey(sequence.subject_id, sequence.sequence_id)
        if key in self._sequences:
            raise GalleryError(
                f"Sequence {key.person_id}/{key.sequence_id} is already enrolled")

        return self.enroll_features(key.person_id, key.sequence_id,
                                    sequence_features(sequence, self.config))

    def enroll_features(
        self,
        person_id: str,
        sequence_id: str,
        features: Sequence[AmiVector],
    ) -> 'Gallery':
        """Add precomputed per-segment invariants for a sequence."""
        _check_label(person_id, 'subject id')
        _check_label(sequence_id, 'sequence id')
        key = SequenceKey(person_id, sequence_id)
        if key in self._sequences:
            raise GalleryError(f"Sequence {person_id}/{sequence_id} is already enrolled")
        if len(features) != self.config.k_segments:
            raise GalleryError(
                f"Sequence {person_id}/{sequence_id} has {len(features)} segments, "
                f"gallery expects {self.config.k_segments}")

        values = np.array([feature.values for feature in features], dtype=np.float64)
        if values.shape != (self.config.k_segments, AMI_COUNT):
            raise GalleryError(
                f"Features must have shape (K, {AMI_COUNT}), got {values.shape}")

        self._sequences[key] = EnrolledSequence(
            key=key,
            features=values,
            degenerate=np.array([feature.degenerate for feature in features], dtype=bool),
        )
        self._models = None
        self._whitened = None
        LOGGER.debug(f"Enrolled {person_id}/{sequence_id}")
        return self

    def finalize(self) -> 'Gallery':
        """
        Fit a whitening model for each segment over the enrolled sequences.

        Samples are taken in canonical order and degenerate segments are left
        out of the fit of their segment. A segment whose remaining samples are
        too few to fit gets the identity model, a segment that is empty in no
        sequence must support M components.
        """
        sequences = self.sequences
        if len(sequences) < 2:
            raise InsufficientVarianceError(
                f"Finalize needs at least 2 enrolled sequences, got {len(sequences)}")

        models = []
        for k in range(self.config.k_segments):
            samples = [seq.features[k] for seq in sequences if not seq.degenerate[k]]
            try:
                model = fit_whitening(samples, self.config.m_dims, segment_index=k)
            except InsufficientVarianceError as e:
                if len(samples) == len(sequences):
                    raise
                LOGGER.warning(
                    f"Segment {k} is empty in {len(sequences) - len(samples)} of "
                    f"{len(sequences)} sequences, keeping its invariants unwhitened: {e}")
                model = identity_model(k, self.config.m_dims)
            models.append(model)

        self._set_models(models)
        LOGGER.info(
            f"Finalized gallery of {len(self.persons)} persons, {len(sequences)} sequences, "
            f"K={self.config.k_segments}, M={self.config.m_dims}")
        return self

    def _set_models(self, models: List[WhiteningModel]) -> None:
        sequences = self.sequences
        keys = [seq.key for seq in sequences]
        count, k_segments, m_dims = len(sequences), self.config.k_segments, self.config.m_dims

        features = np.zeros((count, k_segments, m_dims))
        degenerate = np.zeros((count, k_segments), dtype=bool)
        for k, model in enumerate(models):
            if count:
                raw = np.array([seq.features[k] for seq in sequences])
                degenerate[:, k] = [seq.degenerate[k] for seq in sequences]
                features[:, k] = whiten_matrix(model, raw)
        features[degenerate] = 0.0

        self._models = models
        self._whitened = WhitenedGallery(
            keys=keys,
            person_index=person_indices(keys),
            features=features,
            degenerate=degenerate,
        )

    def whitened(self) -> WhitenedGallery:
        """The whitened features of every enrolled sequence, in canonical order."""
        if self._whitened is None:
            raise GalleryError("Gallery is not finalized, call finalize() before querying")
        return self._whitened

    def whiten_probe(self, features: Sequence[AmiVector]) -> List[WhitenedFeature]:
        """Whiten probe invariants with the model of each segment."""
        models = self.models
        if len(features) != len(models):
            raise GalleryError(
                f"Probe has {len(features)} segments, gallery expects {len(models)}")
        empty = [k for k, feature in enumerate(features) if feature.degenerate]
        if empty:
            LOGGER.warning(f"Probe has empty segments {empty}")
        return [whiten(model, feature) for model, feature in zip(models, features)]

    def identify_features(self, features: Sequence[AmiVector]) -> MatchResult:
        """Identify a probe from its per-segment invariants."""
        whitened_gallery = self.whitened()
        return match(self.whiten_probe(features), whitened_gallery)

    def identify(self, sequence: GaitSequence) -> MatchResult:
        """Identify the person walking in a probe sequence."""
        result = self.identify_features(sequence_features(sequence, self.config))
        LOGGER.debug(
            f"Probe {sequence.subject_id}/{sequence.sequence_id} "
            f"identified as {result.predicted_person}")
        return result

    def dumps(self) -> str:
        """Serialize the gallery to text."""
        return ''.join(line + '\n' for line in self._lines())

    def _lines(self) -> Iterator[str]:
        config = self.config
        yield f"{MAGIC} v{config.format_version}"
        config_fields = [
            'config', str(config.width), str(config.height), str(config.k_segments),
            str(config.m_dims), _real(config.threshold_fraction),
        ]
        if config.template != 'aei':
            config_fields.append(config.template)
        yield ' '.join(config_fields)

        models = self._models or []
        for model in models:
            yield ' '.join(
                ['model', str(model.segment_index)]
                + [_real(value) for value in model.mean]
                + [_real(value) for value in model.eigenvalues]
                + [_real(value) for value in model.basis.ravel()]
            )

        sequences = self.sequences
        for seq in sequences:
            yield f"seq {seq.key.person_id} {seq.key.sequence_id}"
            for k, (values, flag) in enumerate(zip(seq.features, seq.degenerate)):
                yield ' '.join(
                    ['ami', str(k), '1' if flag else '0']
                    + [_real(value) for value in values]
                )

        yield f"end {len(models)} {len(sequences)}"

    def save(self, path: Union[str, Path]) -> None:
        """Write the gallery to a file."""
        Path(path).write_text(self.dumps(), encoding='utf-8')
        LOGGER.info(f"Saved gallery of {len(self._sequences)} sequences to {path}")

    @classmethod
    def loads(cls, text: str) -> 'Gallery':
        """Parse a gallery from text, models are restored without refitting."""
        return _GalleryParser(text.splitlines()).parse()

    @classmethod
    def load(cls, path: Union[str, Path]) -> 'Gallery':
        """Read a gallery file."""
        try:
            text = Path(path).read_text(encoding='utf-8')
        except UnicodeDecodeError as e:
            raise GalleryFormatError(f"{path} is not a UTF-8 text file") from e
        gallery = cls.loads(text)
        LOGGER.debug(f"Loaded {gallery!r} from {path}")
        return gallery


def _real(value: float) -> str:
    return repr(float(value))


class _GalleryParser:
    def __init__(self, lines: List[str]) -> None:
        self.lines = lines
        self.line_number = 0

    def error(self, message: str) -> GalleryFormatError:
        return GalleryFormatError(message, self.line_number)

    def next_fields(self, expected: str) -> List[str]:
        if self.line_number >= len(self.lines):
            self.line_number += 1
            raise self.error(f"unexpected end of file, expected '{expected}' record")
        self.line_number += 1
        fields = self.lines[self.line_number - 1].split()
        if not fields:
            raise self.error(f"blank line, expected '{expected}' record")
        return fields

    def peek_tag(self) -> Optional[str]:
        if self.line_number >= len(self.lines):
            return None
        fields = self.lines[self.line_number].split()
        return fields[0] if fields else ''

    def expect(self, expected: str, field_count: int) -> List[str]:
        fields = self.next_fields(expected)
        if fields[0] != expected:
            raise self.error(f"expected '{expected}' record, found '{fields[0]}'")
        if len(fields) != field_count:
            raise self.error(
                f"'{expected}' record has {len(fields)} fields, expected {field_count}")
        return fields

    def integer(self, field: str, name: str) -> int:
        try:
            return int(field)
        except ValueError:
            raise self.error(f"invalid {name} {field!r}") from None

    def reals(self, fields: Sequence[str], name: str) -> NDArray:
        try:
            values = np.array([float(field) for field in fields], dtype=np.float64)
        except ValueError:
            raise self.error(f"invalid real number in {name}") from None
        if not np.isfinite(values).all():
            raise self.error(f"non-finite value in {name}")
        return values

    def parse(self) -> Gallery:
        config = self.parse_header()
        gallery = Gallery(config)
        k_segments, m_dims = config.k_segments, config.m_dims

        models = []
        while self.peek_tag() == 'model':
            fields = self.expect('model', 2 + AMI_COUNT + m_dims + m_dims * AMI_COUNT)
            k = self.integer(fields[1], 'segment index')
            if k != len(models):
                raise self.error(f"model for segment {k} out of order, expected {len(models)}")
            values = self.reals(fields[2:], 'model')
            models.append(WhiteningModel(
                segment_index=k,
                mean=values[:AMI_COUNT],
                eigenvalues=values[AMI_COUNT:AMI_COUNT + m_dims],
                basis=values[AMI_COUNT + m_dims:].reshape(m_dims, AMI_COUNT),
            ))
        if models and len(models) != k_segments:
            raise self.error(f"found {len(models)} models, expected {k_segments}")

        sequence_count = 0
        while self.peek_tag() == 'seq':
            fields = self.expect('seq', 3)
            person_id, sequence_id = fields[1], fields[2]
            features = []
            for k in range(k_segments):
                ami = self.expect('ami', 3 + AMI_COUNT)
                if self.integer(ami[1], 'segment index') != k:
                    raise self.error(f"ami record for segment {ami[1]}, expected {k}")
                if ami[2] not in ('0', '1'):
                    raise self.error(f"invalid degenerate flag {ami[2]!r}")
                features.append(AmiVector(
                    values=self.reals(ami[3:], 'ami'),
                    degenerate=ami[2] == '1',
                ))
            try:
                gallery.enroll_features(person_id, sequence_id, features)
            except GalleryError as e:
                raise self.error(str(e)) from None
            sequence_count += 1

        fields = self.expect('end', 3)
        counts = (
            self.integer(fields[1], 'model count'),
            self.integer(fields[2], 'sequence count'),
        )
        if counts != (len(models), sequence_count):
            raise self.error(
                f"trailer counts {counts[0]} models, {counts[1]} sequences, "
                f"file has {len(models)} models, {sequence_count} sequences")
        if self.line_number < len(self.lines) and any(
                line.strip() for line in self.lines[self.line_number:]):
            self.line_number += 1
            raise self.error("unexpected content after 'end' record")

        if models:
            gallery._set_models(models)
        return gallery

    def parse_header(self) -> GalleryConfig:
        if not self.lines:
            self.line_number = 1
            raise GalleryVersionError("empty file, not a gallery", 1)
        self.line_number = 1
        magic = self.lines[0].split()
        if len(magic) != 2 or magic[0] != MAGIC or not magic[1].startswith('v'):
            raise GalleryVersionError(
                f"bad magic line {self.lines[0]!r}, expected '{MAGIC} v{FORMAT_VERSION}'", 1)
        if magic[1] != f"v{FORMAT_VERSION}":
            raise GalleryVersionError(
                f"unsupported gallery format version {magic[1]}, "
                f"expected v{FORMAT_VERSION}", 1)

        fields = self.next_fields('config')
        if fields[0] != 'config' or len(fields) not in (6, 7):
            raise self.error(
                "expected 'config <width> <height> <K> <M> <threshold> [<template>]'")
        try:
            threshold = float(fields[5])
        except ValueError:
            raise self.error(f"invalid threshold {fields[5]!r}") from None
        config = GalleryConfig(
            width=self.integer(fields[1], 'width'),
            height=self.integer(fields[2], 'height'),
            k_segments=self.integer(fields[3], 'segment count'),
            m_dims=self.integer(fields[4], 'dimension count'),
            threshold_fraction=threshold,
            template=fields[6] if len(fields) == 7 else 'aei',
        )
        try:
            return config.validate()
        except ValueError as e:
            raise self.error(str(e)) from None

