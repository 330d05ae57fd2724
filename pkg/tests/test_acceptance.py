"""Release gate: one test per headline guarantee, each printing PASS or FAIL.

Every test here re-checks a user-facing contract end to end, at the
tolerance we promise in the README, and reports a single line of the form

    [acceptance] <name>: PASS

so the gate status is readable straight from the pytest log.
"""

import hashlib
import math
import time
from pathlib import Path

import numpy as np
import pytest

from foasim import FoaSignal, MonoSignal
from foasim.augment import (AugmentConfig, NoisePool, choose_and_build_interferer,
                            mix_at_snr, spatialise_utterance)
from foasim.foa import encode_moving, encode_stationary_direction
from foasim.geometry import (TrajectoryLimits, sample_room, sample_trajectory,
                             trajectory_positions)
from foasim.ir import estimate_t60_schroeder, fast_convolve, generate_ir
from foasim.labels import (DEFAULT_FRAME_GEOMETRY, DEFAULT_QUANTIZER,
                           class_center_direction, frame_count, quantize_doa_batch)
from foasim.loss import (DEFAULT_SPATIAL_WEIGHT, LossBundle, class_distribution,
                         loss_gradients, masked_ce, total_loss)
from foasim.pipeline import run_mix, run_spatialise

from test_augment import FakeIrSource
from test_loss import finite_difference, random_instance, worst_relative_error

FS = 16000


def report(capsys, name, check):
    """Run ``check`` and print one pass/fail line visible in the pytest log."""
    try:
        check()
    except Exception:
        with capsys.disabled():
            print(f"[acceptance] {name}: FAIL")
        raise
    with capsys.disabled():
        print(f"[acceptance] {name}: PASS")


def test_acceptance_frame_geometry(capsys):
    def check():
        assert DEFAULT_FRAME_GEOMETRY.hop_samples == 320
        assert DEFAULT_FRAME_GEOMETRY.receptive_field_samples == 400
        assert frame_count(16000) == 49
        rng = np.random.default_rng(501)
        for n in rng.integers(400, 1_000_000, size=1000):
            assert frame_count(int(n) + 320) == frame_count(int(n)) + 1

    report(capsys, "frame geometry", check)


def test_acceptance_doa_quantizer(capsys):
    def check():
        cfg = DEFAULT_QUANTIZER
        num_classes = cfg.num_elevation * cfg.num_azimuth
        assert num_classes == 512
        assert math.degrees(math.pi / cfg.num_elevation) == 11.25
        assert math.degrees(2.0 * math.pi / cfg.num_azimuth) == 11.25

        rng = np.random.default_rng(503)
        dirs = rng.standard_normal((1_000_000, 3))
        dirs /= np.linalg.norm(dirs, axis=1, keepdims=True)
        classes = quantize_doa_batch(dirs)
        assert classes.min() >= 0 and classes.max() < num_classes

        for cls in range(num_classes):
            center = class_center_direction(cls)
            assert quantize_doa_batch(center[None, :])[0] == cls

    report(capsys, "doa quantizer", check)


def test_acceptance_foa_energy_identity(capsys):
    def check():
        rng = np.random.default_rng(509)
        limits = TrajectoryLimits()
        for _ in range(100):
            n = int(rng.integers(2, 4000))
            mono = MonoSignal(rng.standard_normal(n), FS)
            traj = sample_trajectory(n, FS, limits, rng)
            foa, _ = encode_moving(mono, traj)
            w, x, y, z = foa.channels
            lhs = x * x + y * y + z * z
            np.testing.assert_allclose(lhs, w * w, rtol=1e-9,
                                       atol=1e-9 * max(float(np.max(w * w)), 1e-30))
            # At the closest-approach sample the gain is exactly one, so the
            # omni channel reproduces the dry signal there.
            dists = np.linalg.norm(trajectory_positions(traj), axis=1)
            i_min = int(np.argmin(dists))
            assert w[i_min] == pytest.approx(mono.samples[i_min], rel=1e-9,
                                             abs=1e-15)

    report(capsys, "foa energy identity", check)


def test_acceptance_fft_convolution(capsys):
    def check():
        rng = np.random.default_rng(521)
        pairs = [(100_000, 10_000)]
        while len(pairs) < 500:
            n = int(np.exp(rng.uniform(0.0, math.log(100_000))))
            m = int(np.exp(rng.uniform(0.0, math.log(10_000))))
            pairs.append((max(n, 1), max(m, 1)))
        for n, m in pairs:
            sig = rng.standard_normal(n)
            ker = rng.standard_normal(m)
            got = fast_convolve(sig, ker)
            ref = np.convolve(sig, ker)
            scale = max(float(np.max(np.abs(ref))), 1e-30)
            assert float(np.max(np.abs(got - ref))) <= 1e-9 * scale

    report(capsys, "fft convolution", check)


def test_acceptance_ir_reverberation_time(capsys):
    def check():
        for seed in range(100):
            rng = np.random.default_rng(1000 + seed)
            room = sample_room(rng)
            ir = generate_ir(room, rng)
            est = estimate_t60_schroeder(ir.channels[0], ir.sample_rate_hz)
            assert abs(est - room.rt60_s) <= 0.20 * room.rt60_s

    report(capsys, "ir reverberation time", check)


def test_acceptance_snr_mixing(capsys):
    def check():
        rng = np.random.default_rng(523)

        def spat(mono, r):
            foa = encode_stationary_direction(mono, (0.0, 1.0, 0.0))
            lab = np.tile([0.0, 1.0, 0.0], (mono.num_samples, 1))
            return foa, lab, {"branch": "stationary"}

        noise = NoisePool(
            [(f"n{i}", MonoSignal(0.05 * rng.standard_normal(12000), FS))
             for i in range(3)])
        cfg = AugmentConfig(mix_prob=1.0, snr_range_db=(0.0, 20.0))
        for _ in range(1000):
            n = int(rng.integers(4000, 20000))
            primary = FoaSignal(0.2 * rng.standard_normal((4, n)), FS)
            batch = [FoaSignal(
                0.2 * rng.standard_normal((4, int(rng.integers(2000, 30000)))),
                FS) for _ in range(3)]
            intf, rec = choose_and_build_interferer(batch, noise, n, cfg,
                                                    spat, rng)
            assert 0.0 <= rec.snr_db <= 20.0
            if rec.kind == "speech":
                assert rec.length <= n // 2
            mixed = mix_at_snr(primary, intf, rec.snr_db, rec.offset)
            sl = slice(rec.offset, rec.offset + rec.length)
            added = mixed.channels[0, sl] - primary.channels[0, sl]
            p_rms = math.sqrt(float(np.mean(primary.channels[0, sl] ** 2)))
            a_rms = math.sqrt(float(np.mean(added ** 2)))
            measured = 20.0 * math.log10(p_rms / a_rms)
            assert abs(measured - rec.snr_db) <= 0.01

    report(capsys, "snr mixing", check)


def test_acceptance_loss_kernel(capsys):
    def check():
        assert DEFAULT_SPATIAL_WEIGHT == 0.25
        assert total_loss(2.0, 4.0) == pytest.approx(3.0, abs=1e-15)

        rng = np.random.default_rng(541)
        for _ in range(200):
            bundle = LossBundle(rng.standard_normal((4, 8)),
                                rng.standard_normal((12, 4)), 0.1)
            rep = rng.standard_normal(8)
            p = class_distribution(rep, bundle)
            assert abs(float(p.sum()) - 1.0) <= 1e-12
            scaled = class_distribution(3.7 * rep, bundle)
            np.testing.assert_allclose(scaled, p, atol=1e-12)

        for _ in range(100):
            reps, acoustic, ac_t, spatial, sp_t = random_instance(rng)
            grads = loss_gradients(reps, acoustic, ac_t, spatial, sp_t)
            la = masked_ce(reps, acoustic, ac_t)
            ls = masked_ce(reps, spatial, sp_t)
            assert grads.loss_total == pytest.approx(la + 0.25 * ls, rel=1e-12)

            def value():
                return total_loss(masked_ce(reps, acoustic, ac_t),
                                  masked_ce(reps, spatial, sp_t))

            for analytic, array in ((grads.reps, reps),
                                    (grads.acoustic_projection,
                                     acoustic.projection),
                                    (grads.spatial_projection,
                                     spatial.projection),
                                    (grads.acoustic_embeddings,
                                     acoustic.class_embeddings),
                                    (grads.spatial_embeddings,
                                     spatial.class_embeddings)):
                probed = finite_difference(value, array)
                assert worst_relative_error(analytic, probed) < 1e-5

    report(capsys, "loss kernel", check)


def test_acceptance_trajectory_sampling(capsys):
    def check():
        rng = np.random.default_rng(547)
        limits = TrajectoryLimits()
        ts = np.linspace(0.0, 1.0, 256)[:, None]
        for _ in range(10_000):
            n = int(rng.integers(2, 48_000))
            traj = sample_trajectory(n, FS, limits, rng)
            start = np.asarray(traj.start_xyz)
            end = np.asarray(traj.end_xyz)
            dense = start[None, :] * (1.0 - ts) + end[None, :] * ts
            assert float(np.min(np.linalg.norm(dense, axis=1))) \
                >= limits.min_dist_m - 1e-9
            speed = float(np.linalg.norm(end - start)) * FS / n
            assert speed <= limits.max_speed_m_s + 1e-12

        rng = np.random.default_rng(557)
        ir_source = FakeIrSource()
        cfg = AugmentConfig()
        stationary = 0
        for _ in range(10_000):
            mono = MonoSignal(0.1 * rng.standard_normal(400), FS)
            _, _, prov = spatialise_utterance(mono, cfg, ir_source, limits, rng)
            stationary += prov["branch"] == "stationary"
        assert abs(stationary / 10_000 - 0.5) <= 0.02

    report(capsys, "trajectory sampling", check)


def tree_digest(root):
    """Map of relative path to content hash for every file under ``root``."""
    out = {}
    for path in sorted(Path(root).rglob("*")):
        if path.is_file():
            out[str(path.relative_to(root))] = hashlib.sha256(
                path.read_bytes()).hexdigest()
    return out


def test_acceptance_end_to_end_determinism(capsys, big_corpus, noise_dir,
                                           ir_dir, tmp_path):
    def check():
        start = time.perf_counter()
        digests = {}
        for run, workers in (("runA", 1), ("runB", 1), ("runC", 8)):
            spat = tmp_path / run / "spat"
            mix = tmp_path / run / "mix"
            summary = run_spatialise(big_corpus, spat, master_seed=2024,
                                     ir_dir=ir_dir, num_workers=workers)
            assert summary.num_failed == 0
            summary = run_mix(spat / "manifest.jsonl", mix, master_seed=2024,
                              noise_dir=noise_dir, ir_dir=ir_dir,
                              num_workers=workers)
            assert summary.num_failed == 0
            digests[run] = {**{f"spat/{k}": v
                               for k, v in tree_digest(spat).items()},
                            **{f"mix/{k}": v
                               for k, v in tree_digest(mix).items()}}
        assert len(digests["runA"]) == 402
        assert digests["runA"] == digests["runB"]
        assert digests["runA"] == digests["runC"]
        assert time.perf_counter() - start < 300.0

    report(capsys, "end to end determinism", check)
