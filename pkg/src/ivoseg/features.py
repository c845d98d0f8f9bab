"""Hand-built cell descriptors and label pooling for the attention stages.

Frames are carved into stride x stride cells (edge-padded up to a stride
multiple, so extents are ceil(H/s) x ceil(W/s)).  Each cell gets one
unit-length descriptor assembled from local color, gradient, contrast and
position statistics.  The same builder serves every pyramid level and the
memory keys; only the stride changes.
"""

from __future__ import annotations

import numpy as np
from scipy import ndimage

from .domain import UNLABELED

DESCRIPTOR_CHANNELS = 20
_EPS = 1e-8


def grid_shape(h: int, w: int, stride: int) -> tuple[int, int]:
    return -(-h // stride), -(-w // stride)


def pad_to_multiple(arr: np.ndarray, stride: int) -> np.ndarray:
    """Edge-replicate the first two axes up to the next stride multiple."""
    h, w = arr.shape[:2]
    ph = (-h) % stride
    pw = (-w) % stride
    if ph == 0 and pw == 0:
        return arr
    widths = [(0, ph), (0, pw)] + [(0, 0)] * (arr.ndim - 2)
    return np.pad(arr, widths, mode="edge")


def _cell_view(arr: np.ndarray, stride: int) -> np.ndarray:
    """(Hs, stride, Ws, stride, ...) view of an edge-padded array."""
    arr = pad_to_multiple(arr, stride)
    h, w = arr.shape[:2]
    rest = arr.shape[2:]
    return arr.reshape(h // stride, stride, w // stride, stride, *rest)


def build_descriptors(
    rgb: np.ndarray, stride: int, position_weight: float = 0.15
) -> np.ndarray:
    """Hs x Ws x 20 unit-normalized cell descriptors.

    Channels: mean RGB (3), std RGB (3), gradient-orientation histogram over
    4 bins (4), mean grad-x (1), mean grad-y (1), center-surround RGB
    contrast (3), 3x3 neighborhood mean RGB (3), and cell-center position
    (2) scaled by ``position_weight``.

    The first half is pure cell appearance, the second half neighborhood
    context; a two-head split lands exactly on that boundary.
    """
    rgb = np.asarray(rgb, dtype=np.float32)
    if rgb.ndim != 3 or rgb.shape[2] != 3:
        raise ValueError(f"expected H x W x 3 rgb, got {rgb.shape}")
    if stride < 1:
        raise ValueError("stride must be >= 1")

    cells = _cell_view(rgb, stride).astype(np.float64)
    mean_rgb = cells.mean(axis=(1, 3))  # Hs x Ws x 3
    std_rgb = cells.std(axis=(1, 3))

    gray = rgb @ np.array([0.299, 0.587, 0.114], np.float64)
    gy, gx = np.gradient(gray)
    mag = np.hypot(gx, gy)
    # orientation mod pi so opposite-signed edges share a bin
    orient = np.mod(np.arctan2(gy, gx), np.pi)
    bins = np.minimum((orient / (np.pi / 4.0)).astype(np.int64), 3)
    hist = np.zeros(mag.shape + (4,), np.float64)
    np.put_along_axis(hist, bins[..., None], mag[..., None], axis=-1)
    hist_cells = _cell_view(hist, stride).mean(axis=(1, 3))  # Hs x Ws x 4
    gx_cells = _cell_view(gx, stride).mean(axis=(1, 3))[..., None]
    gy_cells = _cell_view(gy, stride).mean(axis=(1, 3))[..., None]

    neighbor = np.stack(
        [ndimage.uniform_filter(mean_rgb[..., c], size=3, mode="nearest") for c in range(3)],
        axis=-1,
    )
    contrast = mean_rgb - neighbor

    hs, ws = mean_rgb.shape[:2]
    cy, cx = np.mgrid[0:hs, 0:ws].astype(np.float64)
    pos = np.stack([(cx + 0.5) / ws, (cy + 0.5) / hs], axis=-1) * position_weight

    desc = np.concatenate(
        [mean_rgb, std_rgb, hist_cells, gx_cells, gy_cells, contrast, neighbor, pos],
        axis=-1,
    )
    norm = np.linalg.norm(desc, axis=-1, keepdims=True)
    desc = desc / np.maximum(norm, _EPS)
    return desc.astype(np.float32)


def pool_labels(labels: np.ndarray, stride: int) -> np.ndarray:
    """Majority label per cell; cells with no labeled pixel become UNLABELED.

    Ties go to the tied label seen earliest in the cell's row-major pixel
    scan.  That rule commutes with object-id permutations, which a
    smallest-id rule would not.
    """
    labels = np.asarray(labels, dtype=np.int32)
    if labels.ndim != 2:
        raise ValueError(f"expected H x W labels, got {labels.shape}")
    cells = _cell_view(labels, stride)
    hs, _, ws, _ = cells.shape
    flat = cells.transpose(0, 2, 1, 3).reshape(hs, ws, -1)
    out = np.full((hs, ws), UNLABELED, np.int32)
    for i in range(hs):
        for j in range(ws):
            cell = flat[i, j]
            cell = cell[cell != UNLABELED]
            if cell.size == 0:
                continue
            ids, counts = np.unique(cell, return_counts=True)
            best = counts.max()
            tied = ids[counts == best]
            if tied.size == 1:
                out[i, j] = tied[0]
            else:
                firsts = [int(np.argmax(cell == t)) for t in tied]
                out[i, j] = tied[int(np.argmin(firsts))]
    return out


def upsample_channels(channels: np.ndarray, factor: int, size: tuple[int, int]) -> np.ndarray:
    """Bilinear upsample ... grid channels by an integer factor, crop to size.

    Cell (i, j) is treated as a sample at pixel center
    ((i + 0.5) * factor - 0.5, (j + 0.5) * factor - 0.5); output pixels
    interpolate between the four enclosing cells with edge clamping.
    """
    channels = np.asarray(channels, dtype=np.float32)
    squeeze = channels.ndim == 2
    if squeeze:
        channels = channels[..., None]
    hs, ws, c = channels.shape
    h, w = size
    py = (np.arange(h) + 0.5) / factor - 0.5
    px = (np.arange(w) + 0.5) / factor - 0.5
    y0 = np.clip(np.floor(py).astype(np.int64), 0, hs - 1)
    x0 = np.clip(np.floor(px).astype(np.int64), 0, ws - 1)
    y1 = np.minimum(y0 + 1, hs - 1)
    x1 = np.minimum(x0 + 1, ws - 1)
    fy = np.clip(py - y0, 0.0, 1.0)[:, None, None]
    fx = np.clip(px - x0, 0.0, 1.0)[None, :, None]
    top = channels[y0][:, x0] * (1 - fx) + channels[y0][:, x1] * fx
    bot = channels[y1][:, x0] * (1 - fx) + channels[y1][:, x1] * fx
    out = (top * (1 - fy) + bot * fy).astype(np.float32)
    return out[..., 0] if squeeze else out
