"""Dataset handle and epoch iteration over a foasim manifest.

``DatasetHandle.open`` validates the whole dataset up front: manifest
schema, every label document, and the existence of every audio file, so a
broken dataset fails at open time with the utterance id in the message,
never mid-epoch. Audio itself stays on disk until iteration touches it.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterator

import numpy as np

from foadata.formats import LabelDoc, read_labels, read_manifest
from foadata.masks import DEFAULT_SPAN, DEFAULT_START_FRACTION, derive_seed, mask_indices
from foadata.wavio import read_wav


@dataclass
class Example:
    """One training example, tensors exactly as the dataset stores them."""

    utt_id: str
    audio: np.ndarray
    sample_rate_hz: int
    doa: np.ndarray
    spatial_classes: np.ndarray
    mask: np.ndarray
    epoch: int
    acoustic_classes: np.ndarray | None = None

    @property
    def num_frames(self) -> int:
        return self.spatial_classes.shape[0]


@dataclass
class DatasetHandle:
    """An opened dataset: validated records plus iteration settings.

    Iteration order is a pure function of (seed, epoch); the mask of each
    example is a pure function of (seed, epoch, utterance id). ``batch_size``
    only groups the same deterministic stream into lists.
    """

    manifest_path: Path
    seed: int
    batch_size: int | None
    root: Path
    records: list[dict]
    labels: dict[str, LabelDoc]
    sample_rate_hz: int
    mask_span: int
    mask_start_fraction: float
    header: dict = field(repr=False, default_factory=dict)

    @classmethod
    def open(cls, manifest_path, seed: int,
             batch_size: int | None = None) -> "DatasetHandle":
        """Open and fully validate a dataset manifest."""
        manifest_path = Path(manifest_path)
        header, all_records = read_manifest(manifest_path)
        root = manifest_path.parent
        config = header.get("config", {})
        records = [r for r in all_records if r["status"] == "ok"]
        labels: dict[str, LabelDoc] = {}
        for rec in records:
            utt_id = rec["utt_id"]
            audio_path = root / rec["audio"]
            if not audio_path.is_file():
                raise FileNotFoundError(
                    f"utterance {utt_id}: missing audio file {audio_path}")
            label_path = root / rec["labels"]
            if not label_path.is_file():
                raise FileNotFoundError(
                    f"utterance {utt_id}: missing label file {label_path}")
            try:
                labels[utt_id] = read_labels(label_path)
            except ValueError as exc:
                raise ValueError(f"utterance {utt_id}: {exc}") from exc
        if batch_size is not None and batch_size < 1:
            raise ValueError("batch_size must be at least 1")
        return cls(manifest_path=manifest_path, seed=seed,
                   batch_size=batch_size, root=root, records=records,
                   labels=labels,
                   sample_rate_hz=int(config.get("sample_rate_hz", 16000)),
                   mask_span=int(config.get("mask_span", DEFAULT_SPAN)),
                   mask_start_fraction=float(
                       config.get("mask_start_fraction",
                                  DEFAULT_START_FRACTION)),
                   header=header)

    def __len__(self) -> int:
        return len(self.records)

    def order(self, epoch: int) -> np.ndarray:
        """Deterministic shuffled record order for one epoch."""
        rng = np.random.default_rng(derive_seed(self.seed,
                                                f"shuffle:{epoch}", ""))
        return rng.permutation(len(self.records))

    def example(self, index: int, epoch: int = 0) -> Example:
        """Load one record (by manifest position) as a training example."""
        rec = self.records[index]
        utt_id = rec["utt_id"]
        rate, audio = read_wav(self.root / rec["audio"])
        if audio.shape[0] != 4:
            raise ValueError(f"utterance {utt_id}: expected 4 channels, "
                             f"found {audio.shape[0]}")
        if rate != self.sample_rate_hz:
            raise ValueError(f"utterance {utt_id}: expected "
                             f"{self.sample_rate_hz} Hz, found {rate}")
        doc = self.labels[utt_id]
        mask = mask_indices(self.seed, epoch, utt_id, doc.frame_count,
                            span=self.mask_span,
                            start_fraction=self.mask_start_fraction)
        return Example(utt_id=utt_id, audio=audio, sample_rate_hz=rate,
                       doa=doc.doa, spatial_classes=doc.spatial_classes,
                       mask=mask, epoch=epoch,
                       acoustic_classes=doc.acoustic_classes)

    def iterate(self, epoch: int = 0) -> Iterator[Example]:
        """Yield every example once, in the epoch's deterministic order."""
        for index in self.order(epoch):
            yield self.example(int(index), epoch)

    def iterate_batches(self, epoch: int = 0) -> Iterator[list[Example]]:
        """Group ``iterate`` into lists of ``batch_size`` (last may be short)."""
        if self.batch_size is None:
            raise ValueError("handle was opened without a batch_size")
        batch: list[Example] = []
        for example in self.iterate(epoch):
            batch.append(example)
            if len(batch) == self.batch_size:
                yield batch
                batch = []
        if batch:
            yield batch
