"""Synthetic scenes, the shipped suite, and static-image augmentation."""
from __future__ import annotations

import numpy as np
import pytest

from ivoseg.domain import Frame, IDMask
from ivoseg.synth import (
    AffineParams,
    ObjectSpec,
    SceneConfig,
    augment_static_to_clip,
    bench_config,
    generate_scene,
    suite_configs,
)


def _mini_scene(**kw):
    base = dict(
        name="mini", num_frames=2, height=32, width=32,
        objects=(
            ObjectSpec(shape="circle", color=(0.9, 0.1, 0.1), z=1, size=6.0, center=(12.0, 12.0)),
        ),
    )
    base.update(kw)
    return SceneConfig(**base)


def test_generation_is_deterministic():
    a_frames, a_gt = generate_scene(_mini_scene(background="noise", bg_seed=4))
    b_frames, b_gt = generate_scene(_mini_scene(background="noise", bg_seed=4))
    for fa, fb in zip(a_frames, b_frames):
        assert np.array_equal(fa.rgb, fb.rgb)
    for ga, gb in zip(a_gt, b_gt):
        assert np.array_equal(ga.labels, gb.labels)


def test_higher_z_occludes():
    scene = _mini_scene(
        objects=(
            ObjectSpec(shape="circle", color=(0.9, 0.1, 0.1), z=2, size=6.0, center=(16.0, 16.0)),
            ObjectSpec(shape="rectangle", color=(0.1, 0.1, 0.9), z=1, size=6.0, center=(18.0, 16.0)),
        ),
    )
    _, gt = generate_scene(scene)
    # overlap pixels belong to the circle (object 1, higher z)
    assert gt[0].labels[16, 16] == 1
    assert gt[0].labels[16, 23] == 2
    assert np.array_equal(np.unique(gt[0].labels), [0, 1, 2])


def test_motion_moves_the_mask():
    scene = _mini_scene(
        num_frames=3,
        objects=(
            ObjectSpec(
                shape="circle", color=(0.9, 0.1, 0.1), z=1, size=5.0,
                center=(10.0, 10.0), velocity=(3.0, 0.0),
            ),
        ),
    )
    _, gt = generate_scene(scene)
    xs0 = np.nonzero(gt[0].labels)[1]
    xs2 = np.nonzero(gt[2].labels)[1]
    assert xs2.mean() - xs0.mean() == pytest.approx(6.0, abs=0.3)
    assert (gt[0].labels > 0).sum() == (gt[2].labels > 0).sum()


def test_scene_validation():
    with pytest.raises(ValueError):
        _mini_scene(num_frames=0)
    with pytest.raises(ValueError):
        _mini_scene(height=4)
    with pytest.raises(ValueError):
        _mini_scene(background="plaid")
    with pytest.raises(ValueError):
        _mini_scene(
            objects=(
                ObjectSpec(shape="circle", color=(0.9, 0.1, 0.1), z=1, size=4.0, center=(8.0, 8.0)),
                ObjectSpec(shape="circle", color=(0.1, 0.9, 0.1), z=1, size=4.0, center=(20.0, 20.0)),
            )
        )
    with pytest.raises(ValueError):
        _mini_scene(
            objects=(
                ObjectSpec(shape="blob", color=(0.9, 0.1, 0.1), z=1, size=4.0, center=(8.0, 8.0)),
            )
        )
    with pytest.raises(ValueError):
        # object pokes out of the frame at t=0
        _mini_scene(
            objects=(
                ObjectSpec(shape="circle", color=(0.9, 0.1, 0.1), z=1, size=6.0, center=(3.0, 16.0)),
            )
        )


def test_suite_shape():
    scenes = suite_configs()
    assert [c.name for c in scenes] == ["orbit", "drift", "weave", "cross", "slide"]
    for c in scenes:
        assert c.num_frames == 24
        assert (c.height, c.width) == (128, 128)
        assert c.num_objects == 3


def test_suite_objects_stay_visible(suite):
    """No object ever leaves the frame or vanishes behind another."""
    for name, (frames, gt) in suite.items():
        for t, mask in enumerate(gt):
            present = set(np.unique(mask.labels))
            assert {1, 2, 3} <= present, (name, t, present)
            # nothing touches the border, so shapes never get clipped
            border = np.concatenate(
                [mask.labels[0], mask.labels[-1], mask.labels[:, 0], mask.labels[:, -1]]
            )
            assert not border.any(), (name, t)


def test_suite_seed_threads_into_configs():
    assert [c.seed for c in suite_configs(seed=9)] == [9, 10, 11, 12, 13]


def test_noise_background_seed_changes_pixels():
    a, _ = generate_scene(_mini_scene(background="noise", bg_seed=1))
    b, _ = generate_scene(_mini_scene(background="noise", bg_seed=2))
    assert not np.array_equal(a[0].rgb, b[0].rgb)


def test_bench_scene():
    c = bench_config()
    assert c.num_objects == 10
    assert c.num_frames == 8
    assert (c.height, c.width) == (96, 96)
    frames, gt = generate_scene(c)
    assert set(np.unique(gt[0].labels)) == set(range(11))


def _letter_image():
    rgb = np.full((48, 48, 3), 0.2, np.float32)
    labels = np.zeros((48, 48), np.int32)
    rgb[10:30, 20:26] = (0.9, 0.8, 0.1)
    labels[10:30, 20:26] = 1
    return Frame(index=0, rgb=rgb), IDMask(labels)


def test_augment_requires_identity_first():
    img, mask = _letter_image()
    with pytest.raises(ValueError):
        augment_static_to_clip(img, mask, [])
    with pytest.raises(ValueError):
        augment_static_to_clip(img, mask, [AffineParams(tx=1.0)])
    with pytest.raises(ValueError):
        augment_static_to_clip(img, mask, [AffineParams(), AffineParams(scale=0.0)])


def test_augment_identity_returns_copy():
    img, mask = _letter_image()
    frames, gt = augment_static_to_clip(img, mask, [AffineParams()])
    assert np.allclose(frames[0].rgb, img.rgb, atol=1e-6)
    assert np.array_equal(gt[0].labels, mask.labels)


def test_augment_integer_translation_oracle():
    img, mask = _letter_image()
    tx, ty = 5, -3
    _, gt = augment_static_to_clip(img, mask, [AffineParams(), AffineParams(tx=tx, ty=ty)])
    h, w = mask.shape
    want = np.zeros((h, w), np.int32)
    for y in range(h):
        for x in range(w):
            sy, sx = y - ty, x - tx
            if 0 <= sy < h and 0 <= sx < w:
                want[y, x] = mask.labels[sy, sx]
    assert np.array_equal(gt[1].labels, want)


def test_augment_double_180_rotation_is_identity():
    img, mask = _letter_image()
    once_f, once_g = augment_static_to_clip(
        img, mask, [AffineParams(), AffineParams(rotate_deg=180.0)]
    )
    twice_f, twice_g = augment_static_to_clip(
        once_f[1], once_g[1], [AffineParams(), AffineParams(rotate_deg=180.0)]
    )
    assert np.array_equal(twice_g[1].labels, mask.labels)
    assert np.allclose(twice_f[1].rgb, img.rgb, atol=1e-5)


def test_augment_scale_shrinks_area():
    img, mask = _letter_image()
    _, gt = augment_static_to_clip(img, mask, [AffineParams(), AffineParams(scale=0.5)])
    area0 = (gt[0].labels == 1).sum()
    area1 = (gt[1].labels == 1).sum()
    assert area1 == pytest.approx(area0 * 0.25, rel=0.15)


def test_augment_extent_mismatch():
    img, _ = _letter_image()
    with pytest.raises(ValueError):
        augment_static_to_clip(img, IDMask(np.zeros((8, 8), np.int32)), [AffineParams()])
