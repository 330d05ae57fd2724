"""Spatialisation selection and utterance mixing.

Each utterance is spatialised through one of two branches: convolution with
a drawn room impulse response (static source, constant label) or free-field
encoding along a sampled trajectory (moving source, per-sample labels).
Mixing optionally adds one interferer, either spatialised noise spanning
the whole utterance or a truncated sibling utterance from the same batch,
scaled to hit a requested SNR on the W channel over the overlap.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from foasim.foa import FoaSignal, MonoSignal, encode_moving
from foasim.geometry import TrajectoryLimits, sample_trajectory
from foasim.ir import convolve_foa


@dataclass(frozen=True)
class AugmentConfig:
    """Branch probabilities and the mixing SNR range.

    ``stationary_prob`` picks the reverberant static-source branch over the
    moving free-field one; ``mix_prob`` gates whether an interferer is
    added at all; ``noise_prob`` picks noise over sibling speech for the
    interferer.
    """

    stationary_prob: float = 0.5
    mix_prob: float = 0.3
    noise_prob: float = 0.5
    snr_range_db: tuple[float, float] = (0.0, 20.0)

    def __post_init__(self):
        for name in ("stationary_prob", "mix_prob", "noise_prob"):
            p = getattr(self, name)
            if not 0.0 <= p <= 1.0:
                raise ValueError(f"{name} must lie in [0, 1], got {p}")
        lo, hi = self.snr_range_db
        if not (math.isfinite(lo) and math.isfinite(hi) and lo <= hi):
            raise ValueError(f"snr_range_db must be finite with lo <= hi, "
                             f"got {self.snr_range_db}")


class NoisePool:
    """Named mono noise recordings available to the mixer.

    Entries keep their construction order, so building the pool from a
    sorted listing makes draws reproducible.
    """

    def __init__(self, entries: Sequence[tuple[str, MonoSignal]]):
        self.entries = list(entries)
        for _, clip in self.entries:
            if clip.num_samples == 0:
                raise ValueError("noise clips must be non-empty")

    def __len__(self) -> int:
        return len(self.entries)

    def draw(self, rng: np.random.Generator) -> tuple[str, MonoSignal]:
        if not self.entries:
            raise ValueError("noise pool is empty")
        return self.entries[int(rng.integers(len(self.entries)))]


@dataclass
class MixRecord:
    """Provenance of one mixing decision, serialized into the manifest."""

    kind: str
    source_id: str
    offset: int
    length: int
    snr_db: float
    interferer_spatialisation: dict | None = None


def measure_level_db(sig: FoaSignal, start: int, stop: int) -> float:
    """W-channel RMS level in dB over the span [start, stop).

    Returns -inf for an all-zero span; an empty or out-of-range span is an
    error.
    """
    if not (0 <= start < stop <= sig.num_samples):
        raise ValueError(f"span [{start}, {stop}) invalid for "
                         f"{sig.num_samples} samples")
    seg = sig.w[start:stop]
    rms = math.sqrt(float(np.mean(seg ** 2)))
    if rms == 0.0:
        return float("-inf")
    return 20.0 * math.log10(rms)


def mix_at_snr(primary: FoaSignal, interferer: FoaSignal, snr_db: float,
               offset: int) -> FoaSignal:
    """Add a scaled interferer so the overlap SNR equals ``snr_db``.

    One scalar scales all four interferer channels, preserving its spatial
    image; the scalar is chosen so the W-channel RMS ratio of primary to
    interferer over the overlap region matches the requested SNR. A silent
    primary overlap yields scale 0, returning the primary unchanged.
    """
    if primary.sample_rate_hz != interferer.sample_rate_hz:
        raise ValueError("primary and interferer sample rates differ")
    m = interferer.num_samples
    if m == 0:
        raise ValueError("interferer is empty")
    if offset < 0 or offset + m > primary.num_samples:
        raise ValueError(f"interferer of {m} samples does not fit at offset "
                         f"{offset} in {primary.num_samples}")
    p_rms = math.sqrt(float(np.mean(primary.w[offset:offset + m] ** 2)))
    i_rms = math.sqrt(float(np.mean(interferer.w ** 2)))
    if i_rms == 0.0:
        raise ValueError("interferer has no energy on the W channel")
    scale = (p_rms / i_rms) * 10.0 ** (-snr_db / 20.0)
    out = primary.channels.copy()
    out[:, offset:offset + m] += scale * interferer.channels
    return FoaSignal(out, primary.sample_rate_hz)


def spatialise_utterance(mono: MonoSignal, cfg: AugmentConfig, ir_source,
                         limits: TrajectoryLimits,
                         rng: np.random.Generator
                         ) -> tuple[FoaSignal, np.ndarray, dict]:
    """Spatialise one mono utterance through a randomly selected branch.

    With probability ``stationary_prob`` the utterance is convolved with an
    impulse response drawn from ``ir_source`` (any object with a
    ``draw(rng) -> (ir_id, FoaImpulseResponse)`` method); otherwise it is
    encoded along a sampled free-field trajectory. Returns the FOA audio,
    per-sample direction labels, and a provenance dict sufficient to
    regenerate the labels without the audio.
    """
    if rng.random() < cfg.stationary_prob:
        if ir_source is None:
            raise ValueError("stationary branch selected but no IR source given")
        ir_id, ir = ir_source.draw(rng)
        foa, labels = convolve_foa(mono, ir)
        provenance = {
            "branch": "stationary",
            "ir_id": ir_id,
            "direction": [float(v) for v in ir.direction_label],
            "num_samples": mono.num_samples,
        }
        return foa, labels, provenance
    traj = sample_trajectory(mono.num_samples, mono.sample_rate_hz, limits, rng)
    foa, labels = encode_moving(mono, traj)
    provenance = {
        "branch": "moving",
        "start_xyz": [float(v) for v in traj.start_xyz],
        "end_xyz": [float(v) for v in traj.end_xyz],
        "num_samples": traj.num_samples,
    }
    return foa, labels, provenance


def _fit_clip_length(samples: np.ndarray, target_len: int,
                     rng: np.random.Generator) -> np.ndarray:
    """Tile a clip if needed, then take a random crop of exactly target_len."""
    if samples.shape[0] < target_len:
        reps = int(math.ceil(target_len / samples.shape[0]))
        samples = np.tile(samples, reps)
    slack = samples.shape[0] - target_len
    start = int(rng.integers(0, slack + 1))
    return samples[start:start + target_len]


def choose_and_build_interferer(batch: Sequence[FoaSignal],
                                noise_pool: NoisePool | None,
                                primary_len: int, cfg: AugmentConfig,
                                spatialise: Callable[[MonoSignal,
                                                      np.random.Generator],
                                                     tuple[FoaSignal,
                                                           np.ndarray, dict]],
                                rng: np.random.Generator,
                                batch_ids: Sequence[str] | None = None
                                ) -> tuple[FoaSignal, MixRecord] | None:
    """Decide whether and how to mix, and build the interferer.

    With probability 1 - mix_prob returns None. Otherwise a noise clip is
    drawn with probability ``noise_prob``: it is tiled/cropped to the full
    primary length, spatialised through ``spatialise`` (the same branch
    machinery as primary utterances), and placed at offset 0. The
    alternative is a sibling utterance from ``batch``: already spatialised,
    truncated to a uniform random length of at most half the primary, and
    placed at a uniform random offset.

    The decision sequence consumes the generator in a fixed order (mix
    gate, kind gate, source draw, fitting draws, SNR), so a seeded
    generator reproduces the whole record.
    """
    if rng.random() >= cfg.mix_prob:
        return None
    lo, hi = cfg.snr_range_db
    if rng.random() < cfg.noise_prob:
        if noise_pool is None or len(noise_pool) == 0:
            raise ValueError("noise interferer required but the pool is empty")
        idx = int(rng.integers(len(noise_pool)))
        noise_id, clip = noise_pool.entries[idx]
        fitted = _fit_clip_length(clip.samples, primary_len, rng)
        foa, _, prov = spatialise(MonoSignal(fitted, clip.sample_rate_hz), rng)
        snr_db = float(rng.uniform(lo, hi))
        return foa, MixRecord(kind="noise", source_id=noise_id, offset=0,
                              length=primary_len, snr_db=snr_db,
                              interferer_spatialisation=prov)
    if len(batch) == 0:
        raise ValueError("speech interferer required but the batch is empty")
    half = primary_len // 2
    if half < 1:
        raise ValueError("primary too short to take a half-length interferer")
    idx = int(rng.integers(len(batch)))
    sibling = batch[idx]
    sib_id = batch_ids[idx] if batch_ids is not None else str(idx)
    max_len = min(half, sibling.num_samples)
    length = int(rng.integers(1, max_len + 1))
    offset = int(rng.integers(0, primary_len - length + 1))
    segment = FoaSignal(sibling.channels[:, :length], sibling.sample_rate_hz)
    snr_db = float(rng.uniform(lo, hi))
    return segment, MixRecord(kind="speech", source_id=sib_id, offset=offset,
                              length=length, snr_db=snr_db)
