"""File formats and configuration.

Audio is stored as 4-channel IEEE-float-32 RIFF/WAVE with channels
interleaved in (W, X, Y, Z) order; float32 keeps the encoder's energy
identities testable on disk, which 16-bit quantisation would destroy.
Labels and impulse-response metadata are versioned JSON documents, and a
dataset manifest is JSON-lines with a header record up front. All writers
are deterministic: identical inputs produce identical bytes, so reruns can
be compared with a plain byte diff.
"""

from __future__ import annotations

import dataclasses
import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from scipy.io import wavfile

from foasim.foa import DEFAULT_SAMPLE_RATE_HZ, FoaSignal, MonoSignal
from foasim.geometry import RoomSpec, TrajectoryLimits
from foasim.ir import FoaImpulseResponse
from foasim.labels import FrameLabelSeq, MaskConfig, QuantizerConfig
from foasim.augment import AugmentConfig, NoisePool

LABEL_FORMAT = "foasim-labels-v1"
MANIFEST_FORMAT = "foasim-manifest-v1"
IR_META_FORMAT = "foasim-ir-v1"
IR_ARCHIVE_FORMAT = "foasim-ir-archive-v1"

# Integer WAV data is rescaled to [-1, 1) on read so third-party recordings
# can be dropped in next to our float files.
_INT_SCALES = {np.dtype(np.int16): 2.0 ** 15, np.dtype(np.int32): 2.0 ** 31}


def _read_wav_channels(path) -> tuple[int, np.ndarray]:
    """Read any WAV as float64 with shape (channels, samples)."""
    rate, data = wavfile.read(str(path))
    if data.ndim == 1:
        data = data[:, None]
    if data.dtype in _INT_SCALES:
        data = data.astype(np.float64) / _INT_SCALES[data.dtype]
    elif data.dtype in (np.float32, np.float64):
        data = data.astype(np.float64)
    else:
        raise ValueError(f"unsupported WAV sample format {data.dtype} in {path}")
    return int(rate), data.T


def write_foa_wav(sig: FoaSignal, path) -> None:
    """Write FOA audio as a 4-channel float32 WAV."""
    data = sig.channels.T.astype(np.float32)
    wavfile.write(str(path), sig.sample_rate_hz, data)


def read_foa_wav(path, expect_rate_hz: int = DEFAULT_SAMPLE_RATE_HZ) -> FoaSignal:
    """Read a 4-channel WAV back into an FoaSignal.

    Rejects files whose channel count or sample rate do not match; pass
    ``expect_rate_hz=None`` to accept any rate.
    """
    rate, channels = _read_wav_channels(path)
    if channels.shape[0] != 4:
        raise ValueError(f"expected 4 channels, found {channels.shape[0]} in {path}")
    if expect_rate_hz is not None and rate != expect_rate_hz:
        raise ValueError(f"expected {expect_rate_hz} Hz, found {rate} in {path}")
    return FoaSignal(channels, rate)


def read_mono_wav(path, expect_rate_hz: int = DEFAULT_SAMPLE_RATE_HZ) -> MonoSignal:
    """Read a single-channel WAV into a MonoSignal."""
    rate, channels = _read_wav_channels(path)
    if channels.shape[0] != 1:
        raise ValueError(f"expected 1 channel, found {channels.shape[0]} in {path}")
    if expect_rate_hz is not None and rate != expect_rate_hz:
        raise ValueError(f"expected {expect_rate_hz} Hz, found {rate} in {path}")
    return MonoSignal(channels[0], rate)


def write_mono_wav(sig: MonoSignal, path) -> None:
    wavfile.write(str(path), sig.sample_rate_hz, sig.samples.astype(np.float32))


def _dump_json(payload: dict, path) -> None:
    # sort_keys plus a fixed indent keeps writer output byte-stable.
    Path(path).write_text(json.dumps(payload, sort_keys=True, indent=1) + "\n",
                          encoding="utf-8")


def write_labels(labels: FrameLabelSeq, path) -> None:
    """Write frame labels as a versioned JSON document."""
    payload = {
        "format": LABEL_FORMAT,
        "frame_count": labels.num_frames,
        "quantizer": {"num_elevation": labels.quantizer.num_elevation,
                      "num_azimuth": labels.quantizer.num_azimuth},
        "spatial_classes": [int(c) for c in labels.spatial_classes],
        "doa": [[float(v) for v in row] for row in labels.doa],
        "acoustic_classes": (None if labels.acoustic_classes is None
                             else [int(c) for c in labels.acoustic_classes]),
    }
    _dump_json(payload, path)


def read_labels(path) -> FrameLabelSeq:
    """Read and validate a frame-label document."""
    raw = json.loads(Path(path).read_text(encoding="utf-8"))
    if raw.get("format") != LABEL_FORMAT:
        raise ValueError(f"unsupported label format {raw.get('format')!r} in {path}")
    t = int(raw["frame_count"])
    quant = QuantizerConfig(int(raw["quantizer"]["num_elevation"]),
                            int(raw["quantizer"]["num_azimuth"]))
    doa = np.asarray(raw["doa"], dtype=np.float64).reshape(t, 3) if t else \
        np.zeros((0, 3))
    classes = np.asarray(raw["spatial_classes"], dtype=np.int64)
    if classes.shape[0] != t or len(raw["doa"]) != t:
        raise ValueError(f"label arrays disagree with frame_count in {path}")
    acoustic = raw.get("acoustic_classes")
    if acoustic is not None:
        acoustic = np.asarray(acoustic, dtype=np.int64)
        if acoustic.shape[0] != t:
            raise ValueError(f"acoustic_classes length mismatch in {path}")
    return FrameLabelSeq(doa=doa, spatial_classes=classes, quantizer=quant,
                         acoustic_classes=acoustic)


def _room_to_dict(room: RoomSpec) -> dict:
    return {
        "length_m": room.length_m, "width_m": room.width_m,
        "height_m": room.height_m, "rt60_s": room.rt60_s,
        "source_xyz": list(room.source_xyz), "mic_xyz": list(room.mic_xyz),
    }


def _room_from_dict(raw: dict) -> RoomSpec:
    return RoomSpec(float(raw["length_m"]), float(raw["width_m"]),
                    float(raw["height_m"]), tuple(raw["source_xyz"]),
                    float(raw["rt60_s"]), tuple(raw["mic_xyz"]))


def write_ir(ir: FoaImpulseResponse, wav_path, meta_path) -> None:
    """Write one impulse response as a WAV plus a JSON sidecar."""
    write_foa_wav(FoaSignal(ir.channels, ir.sample_rate_hz), wav_path)
    payload = {
        "format": IR_META_FORMAT,
        "direction_label": [float(v) for v in ir.direction_label],
        "rt60_s": ir.rt60_s,
        "room": None if ir.room is None else _room_to_dict(ir.room),
    }
    _dump_json(payload, meta_path)


def read_ir(wav_path, meta_path) -> FoaImpulseResponse:
    """Read an impulse response and its sidecar metadata.

    Only the direction label is mandatory in the sidecar, so externally
    produced responses can be consumed by writing a minimal JSON next to
    each WAV.
    """
    sig = read_foa_wav(wav_path, expect_rate_hz=None)
    raw = json.loads(Path(meta_path).read_text(encoding="utf-8"))
    if raw.get("format") != IR_META_FORMAT:
        raise ValueError(f"unsupported IR metadata format in {meta_path}")
    rt60 = raw.get("rt60_s")
    room = raw.get("room")
    return FoaImpulseResponse(
        sig.channels, np.asarray(raw["direction_label"], dtype=np.float64),
        sig.sample_rate_hz, rt60_s=None if rt60 is None else float(rt60),
        room=None if room is None else _room_from_dict(room))


def load_noise_dir(path, expect_rate_hz: int = DEFAULT_SAMPLE_RATE_HZ) -> NoisePool:
    """Load a directory of mono noise WAVs into a NoisePool.

    Files are taken in sorted order and keyed by stem, so the pool draws
    the same clip for the same seed on every run.
    """
    paths = sorted(Path(path).glob("*.wav"))
    if not paths:
        raise ValueError(f"no noise clips under {path}")
    return NoisePool([(p.stem, read_mono_wav(p, expect_rate_hz))
                      for p in paths])


class IrArchive:
    """Directory of impulse responses with a JSON index.

    Layout: ``<dir>/archive.json`` listing ids, plus ``<id>.wav`` and
    ``<id>.json`` per response. Responses load lazily on draw.
    """

    def __init__(self, root: Path, ids: list[str]):
        self.root = Path(root)
        self.ids = list(ids)
        if not self.ids:
            raise ValueError(f"IR archive at {root} lists no responses")

    def __len__(self) -> int:
        return len(self.ids)

    @classmethod
    def open(cls, root) -> "IrArchive":
        root = Path(root)
        index_path = root / "archive.json"
        if not index_path.exists():
            raise FileNotFoundError(f"no archive.json under {root}")
        raw = json.loads(index_path.read_text(encoding="utf-8"))
        if raw.get("format") != IR_ARCHIVE_FORMAT:
            raise ValueError(f"unsupported IR archive format in {index_path}")
        return cls(root, [str(i) for i in raw["ids"]])

    def load(self, ir_id: str) -> FoaImpulseResponse:
        return read_ir(self.root / f"{ir_id}.wav", self.root / f"{ir_id}.json")

    def draw(self, rng: np.random.Generator) -> tuple[str, FoaImpulseResponse]:
        ir_id = self.ids[int(rng.integers(len(self.ids)))]
        return ir_id, self.load(ir_id)


def write_ir_archive_index(root, ids: list[str], extra: dict | None = None) -> None:
    payload = {"format": IR_ARCHIVE_FORMAT, "ids": list(ids)}
    if extra:
        payload.update(extra)
    _dump_json(payload, Path(root) / "archive.json")


@dataclass
class PipelineConfig:
    """Every tunable the generation pipeline consumes.

    The whole record lands in each manifest header, so a dataset names the
    exact settings that produced it.
    """

    sample_rate_hz: int = 16000
    stationary_prob: float = 0.5
    mix_prob: float = 0.3
    noise_prob: float = 0.5
    snr_min_db: float = 0.0
    snr_max_db: float = 20.0
    num_elevation: int = 16
    num_azimuth: int = 32
    mask_span: int = 10
    mask_start_fraction: float = 0.08
    spatial_weight: float = 0.25
    temperature: float = 0.1
    rt60_min_s: float = 0.1
    rt60_max_s: float = 1.2
    max_start_x_m: float = 5.0
    max_start_y_m: float = 5.0
    max_start_z_m: float = 2.0
    min_dist_m: float = 0.5
    max_speed_m_s: float = 2.0
    group_size: int = 32

    def augment_config(self) -> AugmentConfig:
        return AugmentConfig(self.stationary_prob, self.mix_prob,
                             self.noise_prob, (self.snr_min_db, self.snr_max_db))

    def quantizer_config(self) -> QuantizerConfig:
        return QuantizerConfig(self.num_elevation, self.num_azimuth)

    def mask_config(self) -> MaskConfig:
        return MaskConfig(self.mask_span, self.mask_start_fraction)

    def trajectory_limits(self) -> TrajectoryLimits:
        return TrajectoryLimits(self.max_start_x_m, self.max_start_y_m,
                                self.max_start_z_m, self.min_dist_m,
                                self.max_speed_m_s)

    def rt60_band(self) -> tuple[float, float]:
        return (self.rt60_min_s, self.rt60_max_s)

    def to_dict(self) -> dict:
        return dataclasses.asdict(self)

    @classmethod
    def from_dict(cls, raw: dict) -> "PipelineConfig":
        known = {f.name for f in dataclasses.fields(cls)}
        unknown = set(raw) - known
        if unknown:
            raise ValueError(f"unknown config keys: {sorted(unknown)}")
        return cls(**raw)

    @classmethod
    def from_file(cls, path) -> "PipelineConfig":
        return cls.from_dict(json.loads(Path(path).read_text(encoding="utf-8")))


def write_manifest(path, header: dict, records: list[dict]) -> None:
    """Write a manifest: one header line, then one JSON line per item."""
    lines = [json.dumps({"format": MANIFEST_FORMAT, **header}, sort_keys=True)]
    lines += [json.dumps(rec, sort_keys=True) for rec in records]
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def read_manifest(path) -> tuple[dict, list[dict]]:
    """Read a manifest into its header and item records."""
    text = Path(path).read_text(encoding="utf-8")
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if not lines:
        raise ValueError(f"empty manifest at {path}")
    header = json.loads(lines[0])
    if header.get("format") != MANIFEST_FORMAT:
        raise ValueError(f"unsupported manifest format {header.get('format')!r} "
                         f"in {path}")
    records = [json.loads(ln) for ln in lines[1:]]
    ids = [r["utt_id"] for r in records]
    if len(set(ids)) != len(ids):
        raise ValueError(f"duplicate utterance ids in {path}")
    return header, records
