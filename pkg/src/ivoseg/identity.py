"""ID channels: one label plane <-> (M+1) stacked confidence channels.

Channel k holds evidence for id k; channel 0 is background.  Keeping every
object in one tensor is what lets a single attention pass move all objects
at once, and it makes relabeling a pure channel permutation, which the
equivariance tests lean on.
"""

from __future__ import annotations

import numpy as np

from .domain import UNLABELED


def id_channels(num_objects: int) -> int:
    if num_objects < 1:
        raise ValueError("need at least one object")
    return num_objects + 1


def id_embed(labels: np.ndarray, num_objects: int, confidence: float = 1.0) -> np.ndarray:
    """One-hot embed a label plane into ... x (M+1) channels.

    UNLABELED pixels embed to all-zero rows: no evidence rather than
    background evidence.  ``confidence`` scales the hot entry.
    """
    labels = np.asarray(labels)
    c = id_channels(num_objects)
    if labels.max() > num_objects:
        raise ValueError(f"label {labels.max()} exceeds num_objects={num_objects}")
    out = np.zeros(labels.shape + (c,), np.float32)
    known = labels != UNLABELED
    idx = np.nonzero(known)
    out[idx + (labels[known],)] = np.float32(confidence)
    return out


def id_decode(channels: np.ndarray) -> np.ndarray:
    """Argmax over the trailing ID axis; first index wins exact ties."""
    channels = np.asarray(channels)
    if channels.ndim < 1 or channels.shape[-1] < 2:
        raise ValueError("need a trailing axis of at least 2 ID channels")
    return np.argmax(channels, axis=-1).astype(np.int32)


def permute_channels(channels: np.ndarray, perm: dict[int, int]) -> np.ndarray:
    """Reorder ID channels under an object-id permutation (channel 0 fixed)."""
    order = np.arange(channels.shape[-1])
    for src, dst in perm.items():
        order[dst] = src
    return channels[..., order]
