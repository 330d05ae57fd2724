"""Shared on-disk fixtures: mono corpora, noise clips, and IR archives."""

import numpy as np
import pytest

from foasim import MonoSignal, dataio
from foasim.pipeline import generate_ir_archive


def write_corpus(root, count, seed, min_len=2000, max_len=24000,
                 sample_rate_hz=16000):
    """Write ``count`` random mono clips named utt0000.wav, utt0001.wav, ..."""
    root.mkdir(parents=True, exist_ok=True)
    rng = np.random.default_rng(seed)
    for i in range(count):
        n = int(rng.integers(min_len, max_len + 1))
        sig = MonoSignal(0.1 * rng.standard_normal(n), sample_rate_hz)
        dataio.write_mono_wav(sig, root / f"utt{i:04d}.wav")
    return root


@pytest.fixture(scope="session")
def small_corpus(tmp_path_factory):
    return write_corpus(tmp_path_factory.mktemp("corpus_small"), 6, seed=11)


@pytest.fixture(scope="session")
def noise_dir(tmp_path_factory):
    root = tmp_path_factory.mktemp("noise")
    rng = np.random.default_rng(23)
    for i in range(3):
        n = int(rng.integers(16000, 48000))
        sig = MonoSignal(0.05 * rng.standard_normal(n), 16000)
        dataio.write_mono_wav(sig, root / f"ambience{i}.wav")
    return root


@pytest.fixture(scope="session")
def ir_dir(tmp_path_factory):
    root = tmp_path_factory.mktemp("irs")
    generate_ir_archive(root, count=8, master_seed=37)
    return root


@pytest.fixture(scope="session")
def big_corpus(tmp_path_factory):
    """100 utterances, used by the end-to-end determinism checks."""
    return write_corpus(tmp_path_factory.mktemp("corpus_big"), 100, seed=101,
                        min_len=8000, max_len=24000)
