"""Statistical FOA room impulse responses and convolution.

The generator builds each response from two parts: a direct-path impulse
with free-field FOA gains toward the source, and a diffuse tail of
decorrelated Gaussian noise under an exponential decay envelope. This is a
deliberately simple stand-in for geometric acoustics: it reproduces the
requested RT60 and a distance-dependent direct-to-reverberant balance
without modelling individual reflections.

Convolution runs through an FFT overlap-add kernel whose output matches
direct convolution to floating-point rounding.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from foasim.foa import DEFAULT_SAMPLE_RATE_HZ, FoaSignal, MonoSignal
from foasim.geometry import RoomSpec

SPEED_OF_SOUND_M_S = 343.0
# Amplitude gain is 1/distance with the distance clamped below, so a source
# nearly on top of the array cannot produce an unbounded impulse.
MIN_AMPLITUDE_DIST_M = 0.1
# Silence between the direct impulse and the diffuse tail onset.
TAIL_ONSET_GAP_S = 0.002
# ln(1e6): energy decays by 60 dB over one RT60.
ENERGY_DECAY_LN = 13.815510557964274


@dataclass
class FoaImpulseResponse:
    """Four-channel impulse response plus the source direction label.

    ``rt60_s`` and ``room`` describe how the response was generated and are
    optional so that externally recorded responses can serve as drop-ins;
    only the channels and the direction label are required to convolve.
    """

    channels: np.ndarray
    direction_label: np.ndarray
    sample_rate_hz: int = DEFAULT_SAMPLE_RATE_HZ
    rt60_s: float | None = None
    room: RoomSpec | None = None

    def __post_init__(self):
        self.channels = np.asarray(self.channels, dtype=np.float64)
        if self.channels.ndim != 2 or self.channels.shape[0] != 4:
            raise ValueError("impulse response must have shape (4, length)")
        if not np.all(np.isfinite(self.channels)):
            raise ValueError("impulse response samples must be finite")
        self.direction_label = np.asarray(self.direction_label, dtype=np.float64)
        if self.direction_label.shape != (3,):
            raise ValueError("direction label must be a 3-vector")
        if abs(float(np.linalg.norm(self.direction_label)) - 1.0) > 1e-9:
            raise ValueError("direction label must be a unit vector")

    @property
    def length_samples(self) -> int:
        return self.channels.shape[1]


def generate_ir(room: RoomSpec, rng: np.random.Generator,
                sample_rate_hz: int = DEFAULT_SAMPLE_RATE_HZ) -> FoaImpulseResponse:
    """Generate a statistical FOA impulse response for a sampled room.

    The direct path lands at round(f_s * r / c) samples with amplitude
    1 / max(r, 0.1) and unit-vector FOA gains toward the source, where r is
    the source-array distance. The diffuse tail starts 2 ms later: white
    Gaussian noise per channel under the amplitude envelope
    exp(-ln(1e6)/2 * t / rt60), X/Y/Z scaled by 1/sqrt(3) relative to W for
    an isotropic energy split. Total tail energy is calibrated to
    (r / r_c)^2 times the direct-path energy with the critical distance
    r_c = 0.057 * sqrt(volume / rt60). Total length is the direct delay
    plus the gap plus ceil(1.5 * rt60 * f_s) tail samples.

    The tail consumes a single (4, tail_len) standard-normal draw, so the
    response is reproducible from (room, seed).
    """
    rel = room.source_rel_mic()
    r = float(np.linalg.norm(rel))
    if r == 0.0:
        raise ValueError("source coincides with the array position")
    direction = rel / r
    amp = 1.0 / max(r, MIN_AMPLITUDE_DIST_M)
    delay = int(round(sample_rate_hz * r / SPEED_OF_SOUND_M_S))
    gap = int(round(TAIL_ONSET_GAP_S * sample_rate_hz))
    tail_len = int(math.ceil(1.5 * room.rt60_s * sample_rate_hz))
    total_len = delay + gap + tail_len

    channels = np.zeros((4, total_len), dtype=np.float64)
    channels[0, delay] = amp
    channels[1:, delay] = amp * direction

    t = np.arange(tail_len, dtype=np.float64) / sample_rate_hz
    envelope = np.exp(-0.5 * ENERGY_DECAY_LN * t / room.rt60_s)
    # Calibrate the W tail's expected energy against the direct impulse.
    crit_dist = 0.057 * math.sqrt(room.volume_m3 / room.rt60_s)
    tail_scale = amp * (r / crit_dist) / math.sqrt(float(np.sum(envelope ** 2)))
    noise = rng.standard_normal((4, tail_len))
    tail = noise * envelope * tail_scale
    tail[1:] /= math.sqrt(3.0)
    channels[:, delay + gap:] = tail
    return FoaImpulseResponse(channels, direction, sample_rate_hz,
                              rt60_s=room.rt60_s, room=room)


def estimate_t60_schroeder(ir_channel, sample_rate_hz: int,
                           fit_range_db: tuple[float, float] = (-5.0, -35.0)) -> float:
    """Estimate the decay time of one IR channel by backward integration.

    The energy decay curve is the reversed cumulative sum of squared
    samples, normalized to its initial value. A least-squares line is
    fitted to the curve's dB form over the samples lying between the two
    ``fit_range_db`` levels and extrapolated to a 60 dB decay time.
    """
    energy = np.asarray(ir_channel, dtype=np.float64) ** 2
    if energy.ndim != 1 or energy.size == 0 or not np.any(energy > 0.0):
        raise ValueError("need a non-empty channel with some energy")
    edc = np.cumsum(energy[::-1])[::-1]
    edc /= edc[0]
    with np.errstate(divide="ignore"):
        edc_db = 10.0 * np.log10(edc)
    hi, lo = fit_range_db
    idx = np.nonzero((edc_db <= hi) & (edc_db >= lo))[0]
    if idx.size < 2:
        raise ValueError("decay range too short to fit a slope")
    times = idx / float(sample_rate_hz)
    slope, _ = np.polyfit(times, edc_db[idx], 1)
    if slope >= 0.0:
        raise ValueError("energy decay curve is not decreasing over the fit range")
    return float(-60.0 / slope)


def convolve_foa(mono: MonoSignal, ir: FoaImpulseResponse) -> tuple[FoaSignal, np.ndarray]:
    """Convolve mono audio with a 4-channel impulse response.

    Each output channel is the full linear convolution of the mono signal
    with the matching IR channel, truncated to the mono length so audio and
    labels stay aligned. The direction label is constant for a static
    source, so the label sequence repeats ``ir.direction_label`` per sample.
    """
    if mono.sample_rate_hz != ir.sample_rate_hz:
        raise ValueError("mono and impulse response sample rates differ")
    n = len(mono)
    channels = np.empty((4, n), dtype=np.float64)
    for c in range(4):
        channels[c] = fast_convolve(mono.samples, ir.channels[c])[:n]
    labels = np.tile(ir.direction_label, (n, 1))
    return FoaSignal(channels, mono.sample_rate_hz), labels


def fast_convolve(signal, kernel) -> np.ndarray:
    """Full linear convolution via FFT overlap-add.

    Semantics match ``np.convolve(signal, kernel)``: the output has length
    len(signal) + len(kernel) - 1. The shorter input is treated as the
    kernel and the block length is a power of two near four kernel lengths,
    so each FFT amortises over several kernel lengths of fresh input.
    """
    x = np.asarray(signal, dtype=np.float64)
    h = np.asarray(kernel, dtype=np.float64)
    if x.ndim != 1 or h.ndim != 1:
        raise ValueError("convolution inputs must be one-dimensional")
    if x.size == 0 or h.size == 0:
        raise ValueError("convolution inputs must be non-empty")
    if h.size > x.size:
        x, h = h, x
    m = h.size
    out_len = x.size + m - 1
    fft_len = 1 << max(int(math.ceil(math.log2(4 * m))), 4)
    step = fft_len - (m - 1)
    h_f = np.fft.rfft(h, fft_len)
    # One block of slack so the final segment can be added without clipping.
    out = np.zeros(out_len + fft_len, dtype=np.float64)
    for start in range(0, x.size, step):
        block = x[start:start + step]
        seg = np.fft.irfft(np.fft.rfft(block, fft_len) * h_f, fft_len)
        out[start:start + fft_len] += seg
    return out[:out_len]
