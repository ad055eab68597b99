"""
Train/test evaluation of identification accuracy over a silhouette dataset.

The dataset layout is <root>/<subject_id>/<sequence_id>/<frames>. Each
subject's sequences are split into gallery (train) and probe (test) sets with
a seeded shuffle, the gallery is enrolled and finalized, and every probe is
identified. The correct classification rate (CCR) is the fraction of probes
whose predicted subject is their own.
"""
import csv
import io
import logging
import math
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path
from typing import Dict, List, NamedTuple, Optional, Sequence, Tuple, TypeVar, Union

import numpy as np
from tabulate import tabulate

from .energy_image import EnergyImage, energy_image
from .errors import GaitError, InsufficientVarianceError
from .gallery import Gallery, GalleryConfig
from .matching import SequenceKey
from .moments import AmiVector, features_from_segmented
from .segmentation import segment_aei
from .silhouettes import GaitSequence, find_sequences, load_sequence

LOGGER = logging.getLogger(__name__)

T = TypeVar('T')


class ProbeOutcome(NamedTuple):
    """The identification of one probe sequence under one parameter setting."""

    train_fraction: float
    k_segments: int
    m_dims: int
    subject_id: str
    sequence_id: str
    predicted_person: str

    @property
    def correct(self) -> bool:
        """Whether the probe was identified as its own subject."""
        return self.predicted_person == self.subject_id


class ReportRow(NamedTuple):
    """Accuracy of one parameter setting."""

    train_fraction: float
    k_segments: int
    m_dims: int
    ccr: float
    correct: int
    total: int

    @classmethod
    def from_outcomes(
        cls,
        train_fraction: float,
        k_segments: int,
        m_dims: int,
        outcomes: Sequence[ProbeOutcome],
    ) -> 'ReportRow':
        """Count the correct probes of a setting."""
        correct = sum(outcome.correct for outcome in outcomes)
        return cls(
            train_fraction=train_fraction,
            k_segments=k_segments,
            m_dims=m_dims,
            ccr=correct / len(outcomes),
            correct=correct,
            total=len(outcomes),
        )


class FailedSetting(NamedTuple):
    """A parameter setting whose gallery could not be finalized."""

    train_fraction: float
    k_segments: int
    m_dims: int
    reason: str


class EvaluationReport(NamedTuple):
    """
    Results of an evaluation or sweep.

    :param rows: One row per (train_fraction, K, M) setting, in that order.
    :param rng_seed: The seed of the train/test split.
    :param skipped_subjects: Subjects left out for having fewer than 2 sequences.
    :param probes: Every probe identification, in row then probe order.
    :param failures: Settings with no row because their gallery could not be finalized.
    """

    rows: List[ReportRow]
    rng_seed: int
    skipped_subjects: List[str]
    probes: List[ProbeOutcome]
    failures: List[FailedSetting]

    def to_table(self) -> str:
        """Render the rows as an aligned plain-text table."""
        table = tabulate(
            [
                (row.train_fraction, row.k_segments, row.m_dims,
                 f"{row.ccr:.2%}", row.correct, row.total)
                for row in self.rows
            ],
            headers=['split', 'K', 'M', 'CCR', 'correct', 'total'],
            numalign="right",
        )
        footer = f"seed {self.rng_seed}, {len(self.skipped_subjects)} subject(s) skipped\n"
        for failure in self.failures:
            footer += (
                f"split={failure.train_fraction} K={failure.k_segments} "
                f"M={failure.m_dims} failed: {failure.reason}\n")
        return f"{table}\n{footer}"

    def to_csv(self) -> str:
        """Render the rows as CSV with a header line."""
        buffer = io.StringIO()
        writer = csv.writer(buffer, lineterminator='\n')
        writer.writerow(ReportRow._fields)
        for row in self.rows:
            writer.writerow([
                repr(row.train_fraction), row.k_segments, row.m_dims,
                repr(row.ccr), row.correct, row.total,
            ])
        return buffer.getvalue()

    def probes_to_csv(self) -> str:
        """Render the per-probe outcomes as CSV with a header line."""
        buffer = io.StringIO()
        writer = csv.writer(buffer, lineterminator='\n')
        writer.writerow(ProbeOutcome._fields + ('correct',))
        for probe in self.probes:
            writer.writerow([repr(probe.train_fraction), *probe[1:], int(probe.correct)])
        return buffer.getvalue()


def train_count(train_fraction: float, sequence_count: int) -> int:
    """
    The number of gallery sequences for a subject.

    train_fraction * sequence_count rounded half up, clamped to leave at
    least one sequence on each side.
    """
    if not 0 < train_fraction < 1:
        raise ValueError(f"Train fraction must be in (0, 1), got {train_fraction}")
    if sequence_count < 2:
        raise ValueError(f"A subject needs at least 2 sequences, got {sequence_count}")
    count = math.floor(train_fraction * sequence_count + 0.5)
    return min(max(count, 1), sequence_count - 1)


def split_sequences(
    subjects: Dict[str, List[T]],
    train_fraction: float,
    seed: int,
) -> Tuple[Dict[str, List[T]], Dict[str, List[T]]]:
    """
    Split each subject's sequences into train and test sets.

    Each subject is shuffled by its own generator seeded with (seed, index),
    index being its position in sorted subject order. Both halves keep the
    original sequence order.
    """
    train: Dict[str, List[T]] = {}
    test: Dict[str, List[T]] = {}
    for index, subject in enumerate(sorted(subjects)):
        items = subjects[subject]
        order = np.random.default_rng([seed, index]).permutation(len(items))
        chosen = set(order[:train_count(train_fraction, len(items))].tolist())
        train[subject] = [item for i, item in enumerate(items) if i in chosen]
        test[subject] = [item for i, item in enumerate(items) if i not in chosen]
    return train, test


def load_dataset(
    dataset_root: Union[str, Path],
    config: GalleryConfig,
) -> Tuple[Dict[str, List[GaitSequence]], List[str]]:
    """
    Load every sequence of a dataset, setting aside subjects with fewer than 2 sequences.

    :return: The sequences of each usable subject, and the skipped subjects.
    """
    subjects: Dict[str, List[GaitSequence]] = {}
    skipped = []
    for subject, sequence_dirs in find_sequences(dataset_root).items():
        if len(sequence_dirs) < 2:
            LOGGER.warning(
                f"Skipping subject {subject}: {len(sequence_dirs)} sequence(s), "
                f"need at least 2")
            skipped.append(subject)
            continue
        subjects[subject] = [
            load_sequence(
                sequence_dir,
                config.width,
                config.height,
                config.threshold_fraction,
                subject_id=subject,
            )
            for sequence_dir in sequence_dirs
        ]

    if not subjects:
        raise GaitError(f"No subject in {dataset_root} has at least 2 sequences")

    LOGGER.info(
        f"Loaded {sum(len(seqs) for seqs in subjects.values())} sequences "
        f"of {len(subjects)} subjects from {dataset_root}")
    return subjects, skipped


class _FeatureCache:
    """Energy templates per sequence and invariants per (sequence, K), computed once."""

    def __init__(self, subjects: Dict[str, List[GaitSequence]], template: str) -> None:
        self.templates: Dict[SequenceKey, EnergyImage] = {
            SequenceKey(sequence.subject_id, sequence.sequence_id):
                energy_image(sequence, template)
            for sequences in subjects.values()
            for sequence in sequences
        }
        self._features: Dict[int, Dict[SequenceKey, List[AmiVector]]] = {}

    def features(self, k_segments: int) -> Dict[SequenceKey, List[AmiVector]]:
        if k_segments not in self._features:
            self._features[k_segments] = {
                key: features_from_segmented(segment_aei(template, k_segments))
                for key, template in self.templates.items()
            }
        return self._features[k_segments]


def _identify_all(
    gallery: Gallery,
    probes: List[Tuple[SequenceKey, List[AmiVector]]],
    workers: Optional[int],
) -> List[str]:
    def identify(probe: Tuple[SequenceKey, List[AmiVector]]) -> str:
        return gallery.identify_features(probe[1]).predicted_person

    if workers is None or workers <= 1:
        return [identify(probe) for probe in probes]

    with ThreadPoolExecutor(max_workers=workers) as executor:
        return list(executor.map(identify, probes))


def sweep(
    dataset_root: Union[str, Path],
    splits: Sequence[float],
    k_values: Sequence[int],
    m_values: Sequence[int],
    seed: int = 0,
    config: Optional[GalleryConfig] = None,
    workers: Optional[int] = None,
) -> EvaluationReport:
    """
    Evaluate every combination of train fraction, segment count and dimension count.

    Rows are ordered by split, then K, then M, each list sorted ascending with
    duplicates removed. Probes of one setting are identified in parallel when
    workers is above 1, outcomes are collected in probe order. A setting
    whose gallery cannot be finalized is logged and listed in the failures
    of the report instead of a row.

    :param dataset_root: Root of the silhouette dataset.
    :param splits: Train fractions, each in (0, 1).
    :param k_values: Segment counts.
    :param m_values: Whitened dimension counts.
    :param seed: Seed of the per-subject train/test shuffle.
    :param config: Image size, threshold and template, K and M are taken from the lists.
    :param workers: Threads used to identify probes.
    """
    if not splits or not k_values or not m_values:
        raise ValueError("Sweep needs at least one split, K and M value")
    base = (config or GalleryConfig())._replace(
        k_segments=min(k_values), m_dims=min(m_values)).validate()
    for k_segments in k_values:
        base._replace(k_segments=k_segments).validate()
    for m_dims in m_values:
        base._replace(m_dims=m_dims).validate()
    for train_fraction in splits:
        train_count(train_fraction, 2)

    subjects, skipped = load_dataset(dataset_root, base)
    cache = _FeatureCache(subjects, base.template)
    keys_by_subject = {
        subject: [SequenceKey(subject, sequence.sequence_id) for sequence in sequences]
        for subject, sequences in subjects.items()
    }

    rows: List[ReportRow] = []
    probe_log: List[ProbeOutcome] = []
    failures: List[FailedSetting] = []
    for train_fraction in sorted(set(splits)):
        train, test = split_sequences(keys_by_subject, train_fraction, seed)
        train_keys = [key for subject in sorted(train) for key in train[subject]]
        test_keys = [key for subject in sorted(test) for key in test[subject]]

        for k_segments in sorted(set(k_values)):
            features = cache.features(k_segments)
            probes = [(key, features[key]) for key in test_keys]

            for m_dims in sorted(set(m_values)):
                gallery = Gallery(base._replace(k_segments=k_segments, m_dims=m_dims))
                for key in train_keys:
                    gallery.enroll_features(key.person_id, key.sequence_id, features[key])
                try:
                    gallery.finalize()
                except InsufficientVarianceError as e:
                    LOGGER.warning(
                        f"split={train_fraction} K={k_segments} M={m_dims}: "
                        f"skipped, {e}")
                    failures.append(
                        FailedSetting(train_fraction, k_segments, m_dims, str(e)))
                    continue

                predictions = _identify_all(gallery, probes, workers)
                outcomes = [
                    ProbeOutcome(
                        train_fraction, k_segments, m_dims,
                        key.person_id, key.sequence_id, predicted,
                    )
                    for (key, _), predicted in zip(probes, predictions)
                ]
                row = ReportRow.from_outcomes(train_fraction, k_segments, m_dims, outcomes)
                LOGGER.info(
                    f"split={train_fraction} K={k_segments} M={m_dims}: "
                    f"CCR {row.ccr:.2%} ({row.correct}/{row.total})")
                rows.append(row)
                probe_log.extend(outcomes)

    return EvaluationReport(
        rows=rows,
        rng_seed=seed,
        skipped_subjects=skipped,
        probes=probe_log,
        failures=failures,
    )


def evaluate(
    dataset_root: Union[str, Path],
    split: float = 0.5,
    k_segments: int = 23,
    m_dims: int = 5,
    seed: int = 0,
    config: Optional[GalleryConfig] = None,
    workers: Optional[int] = None,
) -> EvaluationReport:
    """
    Evaluate a single parameter setting, giving a one row report.

    Unlike sweep, a setting whose gallery cannot be finalized raises
    InsufficientVarianceError.
    """
    report = sweep(dataset_root, [split], [k_segments], [m_dims], seed, config, workers)
    if report.failures:
        raise InsufficientVarianceError(report.failures[0].reason)
    return report
