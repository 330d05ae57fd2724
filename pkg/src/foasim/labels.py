"""Frame-level training targets: DOA quantisation, frame geometry, masking.

The convolutional front end that consumes the audio fixes how samples map
to frames (320-sample hop, 400-sample receptive field), so label extraction
must reproduce that geometry exactly. Directions quantise onto an
elevation/azimuth grid; span masking follows the usual
start-plus-fixed-span recipe with clipping at the sequence end.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class FrameGeometry:
    """Sample-to-frame geometry of the 7-layer convolutional front end."""

    kernels: tuple[int, ...] = (10, 3, 3, 3, 3, 2, 2)
    strides: tuple[int, ...] = (5, 2, 2, 2, 2, 2, 2)

    def __post_init__(self):
        if len(self.kernels) != len(self.strides):
            raise ValueError("kernels and strides must pair up")
        if any(k < 1 for k in self.kernels) or any(s < 1 for s in self.strides):
            raise ValueError("kernels and strides must be positive")

    @property
    def hop_samples(self) -> int:
        """Input samples between consecutive output frames."""
        hop = 1
        for s in self.strides:
            hop *= s
        return hop

    @property
    def receptive_field_samples(self) -> int:
        """Input samples one output frame depends on."""
        rf = 1
        for k, s in zip(reversed(self.kernels), reversed(self.strides)):
            rf = (rf - 1) * s + k
        return rf


DEFAULT_FRAME_GEOMETRY = FrameGeometry()


@dataclass(frozen=True)
class QuantizerConfig:
    """Elevation/azimuth grid for direction classes."""

    num_elevation: int = 16
    num_azimuth: int = 32

    def __post_init__(self):
        if self.num_elevation < 1 or self.num_azimuth < 1:
            raise ValueError("grid sizes must be at least 1")

    @property
    def num_classes(self) -> int:
        return self.num_elevation * self.num_azimuth


DEFAULT_QUANTIZER = QuantizerConfig()


@dataclass(frozen=True)
class MaskConfig:
    """Span-masking parameters: span length and the fraction of start frames."""

    span: int = 10
    start_fraction: float = 0.08

    def __post_init__(self):
        if self.span < 1:
            raise ValueError("span must be at least 1")
        if not 0.0 <= self.start_fraction <= 1.0:
            raise ValueError("start_fraction must lie in [0, 1]")


@dataclass
class FrameLabelSeq:
    """Per-frame training targets for one utterance.

    ``doa`` holds unit vectors with shape (num_frames, 3),
    ``spatial_classes`` the quantised direction ids. Acoustic class ids are
    produced elsewhere and attach here when available. ``mask`` is filled at
    training time, not at label-generation time.
    """

    doa: np.ndarray
    spatial_classes: np.ndarray
    quantizer: QuantizerConfig = DEFAULT_QUANTIZER
    acoustic_classes: np.ndarray | None = None
    mask: np.ndarray | None = None

    def __post_init__(self):
        self.doa = np.asarray(self.doa, dtype=np.float64)
        self.spatial_classes = np.asarray(self.spatial_classes, dtype=np.int64)
        if self.doa.ndim != 2 or self.doa.shape[1] != 3:
            raise ValueError("doa must have shape (num_frames, 3)")
        if self.spatial_classes.shape != (self.doa.shape[0],):
            raise ValueError("spatial_classes length must match doa")
        if self.spatial_classes.size and (
                self.spatial_classes.min() < 0
                or self.spatial_classes.max() >= self.quantizer.num_classes):
            raise ValueError("spatial class id outside the quantizer range")
        if self.acoustic_classes is not None:
            self.acoustic_classes = np.asarray(self.acoustic_classes, dtype=np.int64)
            if self.acoustic_classes.shape != (self.doa.shape[0],):
                raise ValueError("acoustic_classes length must match doa")

    @property
    def num_frames(self) -> int:
        return self.doa.shape[0]


def frame_count(num_samples: int,
                geometry: FrameGeometry = DEFAULT_FRAME_GEOMETRY) -> int:
    """Number of frames the front end produces for an input length.

    Applies the per-layer length recurrence T <- floor((T - k) / s) + 1.
    Inputs shorter than the receptive field produce no frames and are
    rejected.
    """
    rf = geometry.receptive_field_samples
    if num_samples < rf:
        raise ValueError(f"need at least {rf} samples, got {num_samples}")
    t = int(num_samples)
    for k, s in zip(geometry.kernels, geometry.strides):
        t = (t - k) // s + 1
    return t


def frame_center_sample(t: int,
                        geometry: FrameGeometry = DEFAULT_FRAME_GEOMETRY) -> int:
    """Sample index at the centre of frame ``t``'s receptive field."""
    if t < 0:
        raise ValueError("frame index must be non-negative")
    return geometry.hop_samples * t + geometry.receptive_field_samples // 2


def quantize_doa_batch(directions,
                       cfg: QuantizerConfig = DEFAULT_QUANTIZER) -> np.ndarray:
    """Quantise unit directions onto the elevation/azimuth grid.

    Inclination theta = arccos(z) in [0, pi] and azimuth
    phi = atan2(y, x) + pi in [0, 2*pi] index a grid of
    ``num_elevation * num_azimuth`` cells: class = elevation_index +
    num_elevation * azimuth_index. Indices at the far boundary (theta = pi
    or phi = 2*pi) clamp to the last cell so the class count stays exact.
    At the poles atan2(0, 0) = 0 puts the azimuth mid-range; any azimuth is
    equally valid there.
    """
    l = np.asarray(directions, dtype=np.float64)
    if l.ndim != 2 or l.shape[1] != 3:
        raise ValueError("directions must have shape (count, 3)")
    norms = np.linalg.norm(l, axis=1)
    if np.any(np.abs(norms - 1.0) > 1e-6):
        raise ValueError("directions must be unit vectors")
    n, m = cfg.num_elevation, cfg.num_azimuth
    theta = np.arccos(np.clip(l[:, 2], -1.0, 1.0))
    phi = np.arctan2(l[:, 1], l[:, 0]) + np.pi
    elev = np.minimum((n * theta / np.pi).astype(np.int64), n - 1)
    azim = np.minimum((m * phi / (2.0 * np.pi)).astype(np.int64), m - 1)
    return elev + n * azim


def quantize_doa(direction, cfg: QuantizerConfig = DEFAULT_QUANTIZER) -> int:
    """Class id for a single unit direction."""
    return int(quantize_doa_batch(np.asarray(direction, dtype=np.float64)[None, :],
                                  cfg)[0])


def class_center_direction(class_id: int,
                           cfg: QuantizerConfig = DEFAULT_QUANTIZER) -> np.ndarray:
    """Unit vector at the angular centre of a quantiser cell."""
    if not 0 <= class_id < cfg.num_classes:
        raise ValueError(f"class id {class_id} outside [0, {cfg.num_classes})")
    n, m = cfg.num_elevation, cfg.num_azimuth
    elev = class_id % n
    azim = class_id // n
    theta = (elev + 0.5) * math.pi / n
    phi = (azim + 0.5) * 2.0 * math.pi / m - math.pi
    return np.array([math.sin(theta) * math.cos(phi),
                     math.sin(theta) * math.sin(phi),
                     math.cos(theta)])


def frame_labels(sample_doa, cfg: QuantizerConfig = DEFAULT_QUANTIZER,
                 geometry: FrameGeometry = DEFAULT_FRAME_GEOMETRY) -> FrameLabelSeq:
    """Reduce per-sample direction labels to per-frame targets.

    Frame t takes the label at the centre sample of its receptive field;
    within one 25 ms frame a source moving at walking speed drifts by well
    under the quantiser cell width, so the centre sample is representative.
    """
    sample_doa = np.asarray(sample_doa, dtype=np.float64)
    if sample_doa.ndim != 2 or sample_doa.shape[1] != 3:
        raise ValueError("sample labels must have shape (num_samples, 3)")
    t_count = frame_count(sample_doa.shape[0], geometry)
    centers = (geometry.hop_samples * np.arange(t_count)
               + geometry.receptive_field_samples // 2)
    doa = sample_doa[centers]
    classes = quantize_doa_batch(doa, cfg)
    return FrameLabelSeq(doa=doa, spatial_classes=classes, quantizer=cfg)


def span_mask(num_frames: int, cfg: MaskConfig,
              rng: np.random.Generator) -> np.ndarray:
    """Sample masked frame indices as fixed-length spans at random starts.

    Draws round(start_fraction * num_frames) distinct start frames without
    replacement; each start masks ``cfg.span`` consecutive frames. Spans
    may overlap and are clipped at the sequence end. Returns the sorted
    masked indices.
    """
    if num_frames < 1:
        raise ValueError("num_frames must be at least 1")
    num_starts = int(round(cfg.start_fraction * num_frames))
    if num_starts == 0:
        return np.empty(0, dtype=np.int64)
    starts = rng.choice(num_frames, size=num_starts, replace=False)
    masked = np.zeros(num_frames, dtype=bool)
    for s in starts:
        masked[s:s + cfg.span] = True
    return np.nonzero(masked)[0].astype(np.int64)


def angular_error(pred, truth) -> float:
    """Great-circle angle between two directions, in degrees.

    Both arguments are normalized first, so the metric is scale-invariant;
    zero vectors are rejected.
    """
    p = np.asarray(pred, dtype=np.float64)
    t = np.asarray(truth, dtype=np.float64)
    pn = float(np.linalg.norm(p))
    tn = float(np.linalg.norm(t))
    if pn == 0.0 or tn == 0.0:
        raise ValueError("angular error needs nonzero vectors")
    cos = float(np.clip(p @ t / (pn * tn), -1.0, 1.0))
    return math.degrees(math.acos(cos))
