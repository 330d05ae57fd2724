"""First-order ambisonics encoding of mono sources in the free field.

Channel order is (W, X, Y, Z) with plain directional gains
(1, l_x, l_y, l_z) for a source in unit direction l. No SN3D or N3D channel
weighting is applied; consumers that need another convention can rescale.
A consequence of the unit-vector gains is the per-sample energy identity
X^2 + Y^2 + Z^2 = W^2, which the tests lean on heavily.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from foasim.geometry import Trajectory, trajectory_positions

DEFAULT_SAMPLE_RATE_HZ = 16000


@dataclass
class MonoSignal:
    """Single-channel audio held as float64.

    Parameters
    ----------
    samples : array_like
        One-dimensional amplitude sequence.
    sample_rate_hz : int
        Sampling rate; the pipeline runs at 16 kHz throughout.
    """

    samples: np.ndarray
    sample_rate_hz: int = DEFAULT_SAMPLE_RATE_HZ

    def __post_init__(self):
        self.samples = np.asarray(self.samples, dtype=np.float64)
        if self.samples.ndim != 1:
            raise ValueError("mono samples must be one-dimensional")
        if not np.all(np.isfinite(self.samples)):
            raise ValueError("mono samples must be finite")

    @property
    def num_samples(self) -> int:
        return self.samples.shape[0]

    def __len__(self) -> int:
        return self.num_samples


@dataclass
class FoaSignal:
    """Four-channel ambisonics audio with channels ordered (W, X, Y, Z).

    ``channels`` has shape (4, num_samples) and is held as float64; disk
    serialization narrows to float32 (see dataio).
    """

    channels: np.ndarray
    sample_rate_hz: int = DEFAULT_SAMPLE_RATE_HZ

    def __post_init__(self):
        self.channels = np.asarray(self.channels, dtype=np.float64)
        if self.channels.ndim != 2 or self.channels.shape[0] != 4:
            raise ValueError("FOA audio must have shape (4, num_samples)")
        if not np.all(np.isfinite(self.channels)):
            raise ValueError("FOA samples must be finite")

    @property
    def w(self) -> np.ndarray:
        return self.channels[0]

    @property
    def x(self) -> np.ndarray:
        return self.channels[1]

    @property
    def y(self) -> np.ndarray:
        return self.channels[2]

    @property
    def z(self) -> np.ndarray:
        return self.channels[3]

    @property
    def num_samples(self) -> int:
        return self.channels.shape[1]

    def copy(self) -> "FoaSignal":
        return FoaSignal(self.channels.copy(), self.sample_rate_hz)


def doa_from_position(position_xyz) -> np.ndarray:
    """Unit direction-of-arrival vector for a position in the array frame."""
    g = np.asarray(position_xyz, dtype=np.float64)
    norm = float(np.linalg.norm(g))
    if norm == 0.0:
        raise ValueError("cannot derive a direction from the array position itself")
    return g / norm


def encode_moving(mono: MonoSignal, traj: Trajectory) -> tuple[FoaSignal, np.ndarray]:
    """Encode a mono source that moves along a straight free-field path.

    Per sample i the source sits at position g_i. The dry sample is scaled
    by d_min / ||g_i||, where d_min is the closest approach over the whole
    clip, so the gain peaks at exactly 1 at the closest point. The scaled
    sample is then panned with gains (1, l_x, l_y, l_z) for the unit
    direction l_i = g_i / ||g_i||.

    Returns
    -------
    (FoaSignal, ndarray)
        The encoded audio and the per-sample unit direction labels with
        shape (num_samples, 3). Labels come from the geometry alone, so
        silent samples still carry a valid direction.
    """
    if len(mono) != traj.num_samples:
        raise ValueError(
            f"mono length {len(mono)} != trajectory samples {traj.num_samples}")
    if mono.sample_rate_hz != traj.sample_rate_hz:
        raise ValueError("mono and trajectory sample rates differ")
    positions = trajectory_positions(traj)
    dists = np.linalg.norm(positions, axis=1)
    if np.any(dists == 0.0):
        raise ValueError("trajectory passes through the array position")
    labels = positions / dists[:, None]
    d_min = float(dists.min())
    scaled = mono.samples * (d_min / dists)
    channels = np.empty((4, len(mono)), dtype=np.float64)
    channels[0] = scaled
    channels[1:] = labels.T * scaled
    return FoaSignal(channels, mono.sample_rate_hz), labels


def encode_stationary_direction(mono: MonoSignal, direction) -> FoaSignal:
    """Encode a static free-field source at a fixed unit direction.

    W carries the dry signal; X, Y, Z are the dry signal scaled by the
    direction components.
    """
    l = np.asarray(direction, dtype=np.float64)
    if l.shape != (3,):
        raise ValueError("direction must be a 3-vector")
    if abs(float(np.linalg.norm(l)) - 1.0) > 1e-9:
        raise ValueError("direction must be a unit vector")
    channels = np.empty((4, len(mono)), dtype=np.float64)
    channels[0] = mono.samples
    channels[1:] = l[:, None] * mono.samples
    return FoaSignal(channels, mono.sample_rate_hz)
