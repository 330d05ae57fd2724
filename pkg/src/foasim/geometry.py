"""Sampling of rooms, source positions, and moving-source trajectories.

Rooms are shoeboxes holding one static source and one microphone array,
consumed by the impulse-response generator. Moving sources live in an
array-centred free-field frame and travel along straight lines at bounded
speed. Every sampler takes an explicit ``numpy.random.Generator`` so that a
fixed seed reproduces the exact same draws.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

# Retry budget for all rejection loops. A degenerate configuration (say an
# rt60 band far outside the prior) would otherwise spin forever.
MAX_REJECTION_TRIES = 10_000


class RejectionLimitError(RuntimeError):
    """A rejection-sampling loop exceeded its retry budget."""


@dataclass(frozen=True)
class RoomSpec:
    """Shoebox room with a source position and a microphone array.

    Coordinates are metres in the room frame with the origin at one corner,
    so valid positions lie in [0, length] x [0, width] x [0, height].
    """

    length_m: float
    width_m: float
    height_m: float
    source_xyz: tuple[float, float, float]
    rt60_s: float
    mic_xyz: tuple[float, float, float]

    @property
    def volume_m3(self) -> float:
        return self.length_m * self.width_m * self.height_m

    def source_rel_mic(self) -> np.ndarray:
        """Source position relative to the array, metres, shape (3,)."""
        src = np.asarray(self.source_xyz, dtype=np.float64)
        mic = np.asarray(self.mic_xyz, dtype=np.float64)
        return src - mic


@dataclass(frozen=True)
class TrajectoryLimits:
    """Bounds for moving-source sampling, metres and metres per second.

    ``max_start_*`` bound the coordinates of the start point, ``min_dist_m``
    is an exclusion radius around the array that no trajectory may enter,
    and ``max_speed_m_s`` caps the average source speed over a clip.
    """

    max_start_x_m: float = 5.0
    max_start_y_m: float = 5.0
    max_start_z_m: float = 2.0
    min_dist_m: float = 0.5
    max_speed_m_s: float = 2.0

    def __post_init__(self):
        vals = (self.max_start_x_m, self.max_start_y_m, self.max_start_z_m,
                self.min_dist_m, self.max_speed_m_s)
        if any(v <= 0.0 for v in vals):
            raise ValueError("trajectory limits must all be strictly positive")
        if self.min_dist_m >= min(self.max_start_x_m, self.max_start_y_m,
                                  self.max_start_z_m):
            raise ValueError("min_dist_m must be below every start-coordinate bound")


@dataclass(frozen=True)
class Trajectory:
    """Straight-line source path in the array-centred frame.

    The path is sampled once per audio sample: sample 1 sits at
    ``start_xyz`` and sample ``num_samples`` at ``end_xyz``.
    """

    start_xyz: tuple[float, float, float]
    end_xyz: tuple[float, float, float]
    num_samples: int
    sample_rate_hz: int

    def __post_init__(self):
        if self.num_samples < 2:
            raise ValueError("a trajectory needs at least two samples")
        if self.sample_rate_hz <= 0:
            raise ValueError("sample rate must be positive")

    def displacement_m(self) -> float:
        return float(np.linalg.norm(np.subtract(self.end_xyz, self.start_xyz)))

    def speed_m_s(self) -> float:
        """Average speed: displacement over the clip duration."""
        return self.displacement_m() * self.sample_rate_hz / self.num_samples


def sample_room(rng: np.random.Generator,
                rt60_band: tuple[float, float] = (0.1, 1.2),
                mic_xyz: tuple[float, float, float] | None = None,
                max_tries: int = MAX_REJECTION_TRIES) -> RoomSpec:
    """Draw a room, a source position inside it, and a reverberation time.

    Dimensions are uniform: length in [3, 6], width in [2, 5], height in
    [3, 4] metres. Each source coordinate is uniform in [0.5, dim], which
    keeps half a metre of clearance from three walls but lets the source
    touch the far ones. RT60 is normal with mean 0.45 s and standard
    deviation 0.18 s, redrawn until it lands inside ``rt60_band``. The
    array defaults to the room centre.

    Draw order is fixed (length, width, height, source x/y/z, then the
    rt60 loop) so a seeded generator reproduces the same room.
    """
    lo, hi = float(rt60_band[0]), float(rt60_band[1])
    if not (0.0 < lo <= hi):
        raise ValueError(f"rt60_band must be positive with lo <= hi, got {rt60_band}")
    length = float(rng.uniform(3.0, 6.0))
    width = float(rng.uniform(2.0, 5.0))
    height = float(rng.uniform(3.0, 4.0))
    source = (float(rng.uniform(0.5, length)),
              float(rng.uniform(0.5, width)),
              float(rng.uniform(0.5, height)))
    for _ in range(max_tries):
        rt60 = float(rng.normal(0.45, 0.18))
        if lo <= rt60 <= hi:
            break
    else:
        raise RejectionLimitError(
            f"no rt60 draw landed in {rt60_band} after {max_tries} tries")
    if mic_xyz is None:
        mic = (length / 2.0, width / 2.0, height / 2.0)
    else:
        mic = (float(mic_xyz[0]), float(mic_xyz[1]), float(mic_xyz[2]))
        inside = (0.0 < mic[0] < length and 0.0 < mic[1] < width
                  and 0.0 < mic[2] < height)
        if not inside:
            raise ValueError("mic_xyz must lie strictly inside the room")
    return RoomSpec(length, width, height, source, rt60, mic)


def sample_trajectory(num_samples: int, sample_rate_hz: int,
                      limits: TrajectoryLimits, rng: np.random.Generator,
                      max_tries: int = MAX_REJECTION_TRIES) -> Trajectory:
    """Draw a straight trajectory that stays outside the exclusion radius.

    The start point is uniform over the box given by the start-coordinate
    bounds, redrawn until it lies further than ``min_dist_m`` from the
    array. Travel distance is uniform in [0, num_samples * v_max / f_s],
    so the average speed never exceeds ``max_speed_m_s``. The travel
    direction is uniform on the sphere (unit-ball rejection) and is redrawn
    while the resulting segment would pass within ``min_dist_m`` of the
    array.
    """
    if num_samples < 2:
        raise ValueError("num_samples must be at least 2")
    if sample_rate_hz <= 0:
        raise ValueError("sample rate must be positive")
    for _ in range(max_tries):
        start = np.array([
            rng.uniform(-limits.max_start_x_m, limits.max_start_x_m),
            rng.uniform(-limits.max_start_y_m, limits.max_start_y_m),
            rng.uniform(-limits.max_start_z_m, limits.max_start_z_m),
        ])
        if float(np.linalg.norm(start)) > limits.min_dist_m:
            break
    else:
        raise RejectionLimitError(
            f"no start point cleared min_dist after {max_tries} tries")
    distance = float(rng.uniform(0.0, num_samples * limits.max_speed_m_s
                                 / sample_rate_hz))
    for _ in range(max_tries):
        direction = _sample_unit_direction(rng, max_tries)
        end = start + distance * direction
        if segment_min_distance(start, end) >= limits.min_dist_m:
            return Trajectory(tuple(start.tolist()), tuple(end.tolist()),
                              int(num_samples), int(sample_rate_hz))
    raise RejectionLimitError(
        f"no direction kept the path outside min_dist after {max_tries} tries")


def _sample_unit_direction(rng, max_tries):
    """Uniform direction on the sphere by rejection from the unit ball."""
    for _ in range(max_tries):
        v = rng.uniform(-1.0, 1.0, size=3)
        norm = float(np.linalg.norm(v))
        if 0.0 < norm <= 1.0:
            return v / norm
    raise RejectionLimitError(
        f"no draw landed inside the unit ball after {max_tries} tries")


def trajectory_position(traj: Trajectory, i: int) -> np.ndarray:
    """Source position at 1-based sample index ``i``, metres, shape (3,).

    Linear interpolation with the endpoints pinned exactly: index 1 returns
    the start point and index ``num_samples`` the end point.
    """
    n = traj.num_samples
    if not 1 <= i <= n:
        raise IndexError(f"sample index {i} outside 1..{n}")
    s = np.asarray(traj.start_xyz, dtype=np.float64)
    e = np.asarray(traj.end_xyz, dtype=np.float64)
    return (e * (i - 1.0) + s * (n - i)) / (n - 1.0)


def trajectory_positions(traj: Trajectory) -> np.ndarray:
    """All per-sample source positions, shape (num_samples, 3)."""
    s = np.asarray(traj.start_xyz, dtype=np.float64)
    e = np.asarray(traj.end_xyz, dtype=np.float64)
    n = traj.num_samples
    i = np.arange(1, n + 1, dtype=np.float64)[:, None]
    return (e * (i - 1.0) + s * (n - i)) / (n - 1.0)


def segment_min_distance(start_xyz, end_xyz) -> float:
    """Minimum distance from the origin to the segment between two points.

    The perpendicular-foot parameter is clamped to [0, 1], so the result is
    the true distance to the finite segment rather than to the infinite
    line through it.
    """
    s = np.asarray(start_xyz, dtype=np.float64)
    e = np.asarray(end_xyz, dtype=np.float64)
    d = e - s
    dd = float(d @ d)
    if dd == 0.0:
        return float(np.linalg.norm(s))
    t = float(np.clip(-(s @ d) / dd, 0.0, 1.0))
    return float(np.linalg.norm(s + t * d))
