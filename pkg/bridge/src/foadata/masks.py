"""Per-epoch span-mask regeneration.

Masks are never stored with a dataset; training-side readers re-derive
them from (shuffle seed, epoch, utterance id) with the hash contract the
dataset documents, so every reader process agrees bit for bit while the
masking still varies from epoch to epoch.
"""

from __future__ import annotations

import hashlib

import numpy as np

DEFAULT_SPAN = 10
DEFAULT_START_FRACTION = 0.08


def derive_seed(master_seed: int, stage: str, utt_id: str) -> int:
    """First 8 bytes, little-endian, of sha256("{master_seed}|{stage}|{utt_id}")."""
    text = f"{master_seed}|{stage}|{utt_id}"
    digest = hashlib.sha256(text.encode("utf-8")).digest()
    return int.from_bytes(digest[:8], "little")


def mask_indices(seed: int, epoch: int, utt_id: str, num_frames: int,
                 span: int = DEFAULT_SPAN,
                 start_fraction: float = DEFAULT_START_FRACTION) -> np.ndarray:
    """Sorted masked frame indices for one utterance at one epoch.

    Draws round(start_fraction * num_frames) distinct start frames without
    replacement from a generator seeded with stage "mask:{epoch}", then
    masks ``span`` consecutive frames per start, clipped at the end.
    """
    if num_frames < 1:
        raise ValueError("num_frames must be at least 1")
    rng = np.random.default_rng(derive_seed(seed, f"mask:{epoch}", utt_id))
    num_starts = int(round(start_fraction * num_frames))
    if num_starts == 0:
        return np.empty(0, dtype=np.int64)
    starts = rng.choice(num_frames, size=num_starts, replace=False)
    masked = np.zeros(num_frames, dtype=bool)
    for s in starts:
        masked[s:s + span] = True
    return np.nonzero(masked)[0].astype(np.int64)
