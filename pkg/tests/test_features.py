"""Cell descriptors, label pooling, and grid upsampling."""
from __future__ import annotations

import numpy as np
import pytest

from ivoseg.domain import UNLABELED, apply_perm_to_labels
from ivoseg.features import (
    DESCRIPTOR_CHANNELS,
    build_descriptors,
    grid_shape,
    pad_to_multiple,
    pool_labels,
    upsample_channels,
)


def test_grid_shape_rounds_up():
    assert grid_shape(64, 64, 4) == (16, 16)
    assert grid_shape(65, 63, 4) == (17, 16)
    assert grid_shape(1, 1, 16) == (1, 1)


def test_pad_to_multiple_edge_replicates():
    arr = np.arange(6, dtype=np.float32).reshape(2, 3)
    out = pad_to_multiple(arr, 4)
    assert out.shape == (4, 4)
    assert np.array_equal(out[:2, :3], arr)
    assert np.all(out[2:, :3] == arr[1])
    assert np.all(out[:, 3] == out[:, 2])
    # exact multiple: no copy needed
    sq = np.zeros((4, 8, 2), np.float32)
    assert pad_to_multiple(sq, 4) is sq


def test_descriptor_shape_and_unit_norm():
    rng = np.random.default_rng(41)
    rgb = rng.random((33, 47, 3)).astype(np.float32)
    desc = build_descriptors(rgb, 4)
    assert desc.shape == (9, 12, DESCRIPTOR_CHANNELS)
    norms = np.linalg.norm(desc, axis=-1)
    assert np.allclose(norms, 1.0, atol=1e-5)


def test_descriptor_flat_frame_mean_rgb():
    # constant frame: no gradients, so cells differ only through position
    rgb = np.full((16, 16, 3), 0.6, np.float32)
    desc = build_descriptors(rgb, 4, position_weight=0.0)
    assert np.allclose(desc[0, 0], desc[3, 3], atol=1e-6)
    d = desc[1, 1]
    # mean-RGB channels dominate and stay proportional to the input color
    assert d[0] == pytest.approx(d[1]) == pytest.approx(d[2])
    assert np.allclose(d[3:6], 0.0, atol=1e-6)


def test_descriptor_position_channels():
    rgb = np.full((16, 16, 3), 0.6, np.float32)
    with_pos = build_descriptors(rgb, 4, position_weight=0.15)
    assert not np.allclose(with_pos[0, 0], with_pos[3, 3])
    # last two channels are x then y, increasing along their axis
    assert with_pos[0, 3, 18] > with_pos[0, 0, 18]
    assert with_pos[3, 0, 19] > with_pos[0, 0, 19]


def test_descriptor_rejects_bad_input():
    with pytest.raises(ValueError):
        build_descriptors(np.zeros((4, 4), np.float32), 4)
    with pytest.raises(ValueError):
        build_descriptors(np.zeros((4, 4, 3), np.float32), 0)


def _pool_oracle(labels, stride):
    h, w = labels.shape
    hs, ws = grid_shape(h, w, stride)
    padded = pad_to_multiple(labels, stride)
    out = np.full((hs, ws), UNLABELED, np.int32)
    for i in range(hs):
        for j in range(ws):
            cell = padded[i * stride : (i + 1) * stride, j * stride : (j + 1) * stride]
            seq = [v for v in cell.ravel() if v != UNLABELED]
            if not seq:
                continue
            counts = {}
            for v in seq:
                counts[v] = counts.get(v, 0) + 1
            best = max(counts.values())
            # among tied labels, earliest first appearance wins
            out[i, j] = next(v for v in seq if counts[v] == best)
    return out


def test_pool_labels_matches_oracle():
    rng = np.random.default_rng(42)
    for _ in range(30):
        h = int(rng.integers(3, 20))
        w = int(rng.integers(3, 20))
        stride = int(rng.choice([2, 3, 4]))
        labels = rng.integers(-1, 4, size=(h, w)).astype(np.int32)
        assert np.array_equal(pool_labels(labels, stride), _pool_oracle(labels, stride))


def test_pool_labels_majority():
    labels = np.array([[1, 1], [2, 0]], np.int32)
    assert pool_labels(labels, 2)[0, 0] == 1


def test_pool_labels_empty_cell_unlabeled():
    labels = np.full((4, 4), UNLABELED, np.int32)
    labels[0, 0] = 2
    out = pool_labels(labels, 2)
    assert out[0, 0] == 2
    assert out[1, 1] == UNLABELED


def test_pool_tie_break_commutes_with_permutation():
    """first-appearance tie rule: pool(perm(x)) == perm(pool(x))."""
    rng = np.random.default_rng(43)
    perm = {1: 3, 2: 1, 3: 2}
    for _ in range(100):
        labels = rng.integers(-1, 4, size=(8, 8)).astype(np.int32)
        left = pool_labels(apply_perm_to_labels(labels, perm), 4)
        right = apply_perm_to_labels(pool_labels(labels, 4), perm)
        assert np.array_equal(left, right)


def test_upsample_constant_grid():
    ch = np.full((4, 4, 2), 3.5, np.float32)
    out = upsample_channels(ch, 4, (16, 16))
    assert out.shape == (16, 16, 2)
    assert np.allclose(out, 3.5)


def test_upsample_odd_factor_hits_cell_centers():
    # factor 3 puts pixel 3i+1 exactly on cell center i
    rng = np.random.default_rng(44)
    ch = rng.random((5, 6, 3)).astype(np.float32)
    out = upsample_channels(ch, 3, (15, 18))
    for i in range(5):
        for j in range(6):
            assert np.allclose(out[3 * i + 1, 3 * j + 1], ch[i, j], atol=1e-6)
    assert out.min() >= ch.min() - 1e-6 and out.max() <= ch.max() + 1e-6


def test_upsample_reproduces_linear_ramp():
    """Bilinear interpolation of a linear field is exact away from clamped edges."""
    ii, jj = np.mgrid[0:6, 0:7].astype(np.float32)
    ch = 2.0 * ii - 3.0 * jj + 1.0
    out = upsample_channels(ch, 4, (24, 28))
    py = (np.arange(24) + 0.5) / 4.0 - 0.5
    px = (np.arange(28) + 0.5) / 4.0 - 0.5
    want = 2.0 * py[:, None] - 3.0 * px[None, :] + 1.0
    inner = (slice(2, 22), slice(2, 26))  # rows/cols whose support is in range
    assert np.allclose(out[inner], want[inner], atol=1e-4)


def test_upsample_crops_to_requested_size():
    ch = np.zeros((3, 3), np.float32)
    out = upsample_channels(ch, 4, (11, 10))
    assert out.shape == (11, 10)
