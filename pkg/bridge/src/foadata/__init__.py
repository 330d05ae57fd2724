"""Training-side bindings for foasim-format FOA datasets."""

from foadata.dataset import DatasetHandle, Example
from foadata.formats import LabelDoc, read_labels, read_manifest
from foadata.masks import derive_seed, mask_indices
from foadata.wavio import read_wav

__all__ = [
    "DatasetHandle",
    "Example",
    "LabelDoc",
    "read_labels",
    "read_manifest",
    "derive_seed",
    "mask_indices",
    "read_wav",
]
