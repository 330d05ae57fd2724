"""WAV, label, manifest, and configuration round-trips."""

import json

import numpy as np
import pytest
from scipy.io import wavfile

from foasim.dataio import (IrArchive, PipelineConfig, load_noise_dir,
                           read_foa_wav, read_ir, read_labels, read_manifest,
                           read_mono_wav, write_foa_wav, write_ir,
                           write_ir_archive_index, write_labels,
                           write_manifest, write_mono_wav)
from foasim.foa import FoaSignal, MonoSignal
from foasim.geometry import RoomSpec
from foasim.ir import FoaImpulseResponse, generate_ir
from foasim.labels import FrameLabelSeq, QuantizerConfig, quantize_doa_batch

FS = 16000


def random_labels(rng, frames):
    doa = rng.standard_normal((frames, 3))
    doa /= np.linalg.norm(doa, axis=1, keepdims=True)
    return FrameLabelSeq(doa=doa, spatial_classes=quantize_doa_batch(doa))


def test_foa_wav_roundtrip_is_exact_float32(tmp_path):
    rng = np.random.default_rng(401)
    sig = FoaSignal(rng.standard_normal((4, 1234)), FS)
    path = tmp_path / "sig.wav"
    write_foa_wav(sig, path)
    back = read_foa_wav(path)
    assert back.sample_rate_hz == FS
    np.testing.assert_array_equal(back.channels,
                                  sig.channels.astype(np.float32))


def test_foa_wav_write_is_byte_deterministic(tmp_path):
    rng = np.random.default_rng(403)
    sig = FoaSignal(rng.standard_normal((4, 500)), FS)
    write_foa_wav(sig, tmp_path / "a.wav")
    write_foa_wav(sig, tmp_path / "b.wav")
    assert (tmp_path / "a.wav").read_bytes() == (tmp_path / "b.wav").read_bytes()


def test_empty_foa_wav_roundtrip(tmp_path):
    sig = FoaSignal(np.zeros((4, 0)), FS)
    write_foa_wav(sig, tmp_path / "empty.wav")
    assert read_foa_wav(tmp_path / "empty.wav").num_samples == 0


def test_mono_wav_roundtrip_and_validation(tmp_path):
    rng = np.random.default_rng(407)
    sig = MonoSignal(rng.standard_normal(777), FS)
    path = tmp_path / "mono.wav"
    write_mono_wav(sig, path)
    back = read_mono_wav(path)
    np.testing.assert_array_equal(back.samples, sig.samples.astype(np.float32))
    with pytest.raises(ValueError):
        read_foa_wav(path)
    with pytest.raises(ValueError):
        read_mono_wav(path, expect_rate_hz=8000)
    assert read_mono_wav(path, expect_rate_hz=None).sample_rate_hz == FS


def test_int16_wav_reads_rescaled(tmp_path):
    data = np.array([-32768, 0, 16384, 32767], dtype=np.int16)
    wavfile.write(str(tmp_path / "int.wav"), FS, data)
    back = read_mono_wav(tmp_path / "int.wav")
    np.testing.assert_allclose(back.samples,
                               [-1.0, 0.0, 0.5, 32767 / 32768], atol=0)


def test_labels_roundtrip_exact(tmp_path):
    rng = np.random.default_rng(409)
    labels = random_labels(rng, 49)
    path = tmp_path / "labels.json"
    write_labels(labels, path)
    back = read_labels(path)
    np.testing.assert_array_equal(back.doa, labels.doa)
    np.testing.assert_array_equal(back.spatial_classes, labels.spatial_classes)
    assert back.quantizer == labels.quantizer
    assert back.acoustic_classes is None
    # repr round-trip keeps float64 exact, so a rewrite is byte-identical.
    write_labels(back, tmp_path / "again.json")
    assert (tmp_path / "again.json").read_bytes() == path.read_bytes()


def test_labels_roundtrip_with_acoustic_classes(tmp_path):
    rng = np.random.default_rng(411)
    labels = random_labels(rng, 10)
    labels.acoustic_classes = rng.integers(0, 100, 10)
    write_labels(labels, tmp_path / "l.json")
    back = read_labels(tmp_path / "l.json")
    np.testing.assert_array_equal(back.acoustic_classes,
                                  labels.acoustic_classes)


def test_labels_reject_bad_documents(tmp_path):
    path = tmp_path / "bad.json"
    path.write_text(json.dumps({"format": "something-else"}))
    with pytest.raises(ValueError):
        read_labels(path)
    good = {"format": "foasim-labels-v1", "frame_count": 2,
            "quantizer": {"num_elevation": 16, "num_azimuth": 32},
            "spatial_classes": [0], "doa": [[1, 0, 0], [1, 0, 0]],
            "acoustic_classes": None}
    path.write_text(json.dumps(good))
    with pytest.raises(ValueError):
        read_labels(path)


def test_ir_roundtrip(tmp_path):
    rng = np.random.default_rng(413)
    room = RoomSpec(4.0, 3.0, 3.0, (1.0, 1.0, 1.0), 0.4, (2.0, 1.5, 1.5))
    ir = generate_ir(room, rng, FS)
    write_ir(ir, tmp_path / "ir.wav", tmp_path / "ir.json")
    back = read_ir(tmp_path / "ir.wav", tmp_path / "ir.json")
    np.testing.assert_array_equal(back.channels,
                                  ir.channels.astype(np.float32))
    np.testing.assert_array_equal(back.direction_label, ir.direction_label)
    assert back.rt60_s == ir.rt60_s
    assert back.room == room


def test_ir_minimal_sidecar(tmp_path):
    channels = np.zeros((4, 8))
    channels[:, 0] = [1.0, 1.0, 0.0, 0.0]
    ir = FoaImpulseResponse(channels, np.array([1.0, 0.0, 0.0]), FS)
    write_ir(ir, tmp_path / "x.wav", tmp_path / "x.json")
    back = read_ir(tmp_path / "x.wav", tmp_path / "x.json")
    assert back.rt60_s is None
    assert back.room is None


def test_ir_archive_open_load_draw(tmp_path):
    rng = np.random.default_rng(417)
    ids = []
    for i in range(4):
        room = RoomSpec(4.0, 3.0, 3.0, (1.0, 1.0, 1.0), 0.3, (2.0, 1.5, 1.5))
        ir = generate_ir(room, rng, FS)
        ir_id = f"ir_{i:06d}"
        write_ir(ir, tmp_path / f"{ir_id}.wav", tmp_path / f"{ir_id}.json")
        ids.append(ir_id)
    write_ir_archive_index(tmp_path, ids)
    archive = IrArchive.open(tmp_path)
    assert archive.ids == ids
    assert len(archive) == 4
    drawn_a = archive.draw(np.random.default_rng(5))
    drawn_b = archive.draw(np.random.default_rng(5))
    assert drawn_a[0] == drawn_b[0]
    np.testing.assert_array_equal(drawn_a[1].channels, drawn_b[1].channels)
    with pytest.raises(FileNotFoundError):
        IrArchive.open(tmp_path / "missing")


def test_noise_dir_sorted_ids(tmp_path, noise_dir):
    pool = load_noise_dir(noise_dir)
    names = [name for name, _ in pool.entries]
    assert names == sorted(names)
    assert len(pool) == 3
    with pytest.raises(ValueError):
        load_noise_dir(tmp_path)


def test_pipeline_config_defaults_frozen():
    cfg = PipelineConfig()
    assert cfg.sample_rate_hz == 16000
    assert cfg.stationary_prob == 0.5
    assert cfg.mix_prob == 0.3
    assert cfg.noise_prob == 0.5
    assert (cfg.snr_min_db, cfg.snr_max_db) == (0.0, 20.0)
    assert (cfg.num_elevation, cfg.num_azimuth) == (16, 32)
    assert (cfg.mask_span, cfg.mask_start_fraction) == (10, 0.08)
    assert cfg.spatial_weight == 0.25
    assert cfg.temperature == 0.1
    assert (cfg.rt60_min_s, cfg.rt60_max_s) == (0.1, 1.2)
    assert cfg.min_dist_m == 0.5
    assert cfg.max_speed_m_s == 2.0
    assert cfg.group_size == 32


def test_pipeline_config_roundtrip_and_unknown_keys(tmp_path):
    cfg = PipelineConfig(mix_prob=0.9, group_size=4)
    assert PipelineConfig.from_dict(cfg.to_dict()) == cfg
    with pytest.raises(ValueError):
        PipelineConfig.from_dict({"mix_prob": 0.9, "nonsense": 1})
    path = tmp_path / "config.json"
    path.write_text(json.dumps(cfg.to_dict()))
    assert PipelineConfig.from_file(path) == cfg
    sub = cfg.augment_config()
    assert sub.mix_prob == 0.9
    assert sub.snr_range_db == (0.0, 20.0)
    assert cfg.quantizer_config() == QuantizerConfig(16, 32)
    assert cfg.trajectory_limits().min_dist_m == 0.5
    assert cfg.mask_config().span == 10
    assert cfg.rt60_band() == (0.1, 1.2)


def test_manifest_roundtrip(tmp_path):
    path = tmp_path / "manifest.jsonl"
    header = {"stage": "spatialise", "master_seed": 7}
    records = [{"utt_id": "a", "status": "ok"},
               {"utt_id": "b", "status": "failed"}]
    write_manifest(path, header, records)
    back_header, back_records = read_manifest(path)
    assert back_header["stage"] == "spatialise"
    assert back_header["master_seed"] == 7
    assert back_records == records
    write_manifest(tmp_path / "again.jsonl", header, records)
    assert (tmp_path / "again.jsonl").read_bytes() == path.read_bytes()


def test_manifest_rejects_duplicates_and_bad_format(tmp_path):
    path = tmp_path / "manifest.jsonl"
    write_manifest(path, {"stage": "mix"}, [{"utt_id": "a"}, {"utt_id": "a"}])
    with pytest.raises(ValueError):
        read_manifest(path)
    path.write_text(json.dumps({"format": "other"}) + "\n")
    with pytest.raises(ValueError):
        read_manifest(path)
    path.write_text("\n")
    with pytest.raises(ValueError):
        read_manifest(path)
