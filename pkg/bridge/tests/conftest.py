"""Fixture datasets generated with the foasim pipeline.

foasim is a test-only dependency here: the package under test must read
these datasets through the documented formats alone, and the tests compare
its reads against foasim's to prove both sides agree.
"""

import numpy as np
import pytest

from foasim import MonoSignal, dataio
from foasim.pipeline import generate_ir_archive, run_mix, run_spatialise


def write_corpus(root, count, seed, min_len=2000, max_len=24000):
    root.mkdir(parents=True, exist_ok=True)
    rng = np.random.default_rng(seed)
    for i in range(count):
        n = int(rng.integers(min_len, max_len + 1))
        sig = MonoSignal(0.1 * rng.standard_normal(n), 16000)
        dataio.write_mono_wav(sig, root / f"utt{i:04d}.wav")
    return root


@pytest.fixture(scope="session")
def dataset100(tmp_path_factory):
    """100 utterances through both pipeline stages; returns the mix dir."""
    base = tmp_path_factory.mktemp("ds100")
    corpus = write_corpus(base / "corpus", 100, seed=71,
                          min_len=8000, max_len=20000)
    noise = base / "noise"
    noise.mkdir()
    rng = np.random.default_rng(72)
    for i in range(3):
        n = int(rng.integers(16000, 48000))
        dataio.write_mono_wav(MonoSignal(0.05 * rng.standard_normal(n), 16000),
                              noise / f"ambience{i}.wav")
    irs = base / "irs"
    generate_ir_archive(irs, count=8, master_seed=73)
    summary = run_spatialise(corpus, base / "spat", master_seed=4242,
                             ir_dir=irs, num_workers=4)
    assert summary.num_failed == 0
    summary = run_mix(base / "spat" / "manifest.jsonl", base / "mix",
                      master_seed=4242, noise_dir=noise, ir_dir=irs,
                      num_workers=4)
    assert summary.num_failed == 0
    return base / "mix"


@pytest.fixture(scope="session")
def moving_dataset(tmp_path_factory):
    """Small all-moving dataset whose first utterance is exactly 1 s long."""
    base = tmp_path_factory.mktemp("dsmove")
    corpus = base / "corpus"
    corpus.mkdir()
    rng = np.random.default_rng(81)
    for i, n in enumerate((16000, 7000, 12000, 24000)):
        dataio.write_mono_wav(MonoSignal(0.1 * rng.standard_normal(n), 16000),
                              corpus / f"utt{i:04d}.wav")
    config = dataio.PipelineConfig(stationary_prob=0.0, mix_prob=0.0)
    summary = run_spatialise(corpus, base / "spat", master_seed=55,
                             config=config)
    assert summary.num_failed == 0
    return base / "spat"
