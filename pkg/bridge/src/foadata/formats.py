"""Readers for the versioned JSON formats a foasim dataset ships.

Only the documented schemas are consumed here; anything off-schema raises
``ValueError`` with the offending path (and utterance id where known).
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

LABEL_FORMAT = "foasim-labels-v1"
MANIFEST_FORMAT = "foasim-manifest-v1"

_RECORD_KEYS = ("utt_id", "status", "audio", "labels")


@dataclass
class LabelDoc:
    """Per-frame targets for one utterance, as stored on disk."""

    frame_count: int
    doa: np.ndarray
    spatial_classes: np.ndarray
    num_elevation: int
    num_azimuth: int
    acoustic_classes: np.ndarray | None = None


def read_labels(path) -> LabelDoc:
    """Read and validate one frame-label document."""
    raw = json.loads(Path(path).read_text(encoding="utf-8"))
    if raw.get("format") != LABEL_FORMAT:
        raise ValueError(f"unsupported label format {raw.get('format')!r} in {path}")
    t = int(raw["frame_count"])
    doa = np.asarray(raw["doa"], dtype=np.float64).reshape(t, 3) if t else \
        np.zeros((0, 3))
    classes = np.asarray(raw["spatial_classes"], dtype=np.int64)
    if classes.shape[0] != t or len(raw["doa"]) != t:
        raise ValueError(f"label arrays disagree with frame_count in {path}")
    quant = raw["quantizer"]
    acoustic = raw.get("acoustic_classes")
    if acoustic is not None:
        acoustic = np.asarray(acoustic, dtype=np.int64)
        if acoustic.shape[0] != t:
            raise ValueError(f"acoustic_classes length mismatch in {path}")
    return LabelDoc(frame_count=t, doa=doa, spatial_classes=classes,
                    num_elevation=int(quant["num_elevation"]),
                    num_azimuth=int(quant["num_azimuth"]),
                    acoustic_classes=acoustic)


def read_manifest(path) -> tuple[dict, list[dict]]:
    """Read a manifest into (header, records), validating the schema.

    Checks the format version, that every record carries the documented
    keys, and that utterance ids are unique, so problems surface when the
    dataset is opened rather than mid-epoch.
    """
    lines = [ln for ln in Path(path).read_text(encoding="utf-8").splitlines()
             if ln.strip()]
    if not lines:
        raise ValueError(f"empty manifest at {path}")
    header = json.loads(lines[0])
    if header.get("format") != MANIFEST_FORMAT:
        raise ValueError(
            f"unsupported manifest format {header.get('format')!r} in {path}")
    records = [json.loads(ln) for ln in lines[1:]]
    seen = set()
    for rec in records:
        missing = [k for k in _RECORD_KEYS if k not in rec]
        utt_id = rec.get("utt_id", "<missing utt_id>")
        if missing:
            raise ValueError(f"utterance {utt_id}: record lacks keys {missing}")
        if utt_id in seen:
            raise ValueError(f"duplicate utterance id {utt_id} in {path}")
        seen.add(utt_id)
    return header, records
