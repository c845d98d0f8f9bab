"""Shared fixtures.

Scene generation and robot sessions are the slow parts, so anything
reusable is cached at session scope.
"""
from __future__ import annotations

import numpy as np
import pytest

from ivoseg import (
    EngineConfig,
    Frame,
    IDMask,
    ObjectSpec,
    SceneConfig,
    generate_scene,
    suite_configs,
)


@pytest.fixture(scope="session")
def cfg():
    return EngineConfig()


@pytest.fixture(scope="session")
def suite():
    """name -> (frames, gt) for every shipped scene, generated once."""
    out = {}
    for scene in suite_configs():
        out[scene.name] = generate_scene(scene)
    return out


def two_object_scene(side=64, num_frames=3, seed=5, sizes=(12.0, 10.0), velocity=True):
    v1 = (1.0, 0.5) if velocity else (0.0, 0.0)
    v2 = (-1.0, 0.0) if velocity else (0.0, 0.0)
    return SceneConfig(
        name="pair",
        num_frames=num_frames,
        height=side,
        width=side,
        objects=(
            ObjectSpec(
                shape="circle", color=(0.85, 0.12, 0.12), z=1, size=sizes[0],
                center=(side * 0.32, side * 0.36), velocity=v1,
            ),
            ObjectSpec(
                shape="rectangle", color=(0.15, 0.25, 0.88), z=2, size=sizes[1],
                center=(side * 0.68, side * 0.66), velocity=v2,
            ),
        ),
        background="gradient",
        seed=seed,
    )


@pytest.fixture(scope="session")
def pair_64():
    """Small red circle + blue rectangle clip used across modules."""
    return generate_scene(two_object_scene())


@pytest.fixture(scope="session")
def pair_256():
    """Static high-res pair; big enough that boundary re-quantization noise
    stays under a percent of the frame."""
    return generate_scene(
        two_object_scene(side=256, num_frames=1, sizes=(48.0, 40.0), velocity=False)
    )


def flat_frame(h, w, value=0.5, index=0):
    return Frame(index=index, rgb=np.full((h, w, 3), value, np.float32))


def circle_mask(h, w, cy, cx, r, label=1, frame=0):
    yy, xx = np.mgrid[0:h, 0:w]
    labels = np.where((yy - cy) ** 2 + (xx - cx) ** 2 <= r * r, label, 0)
    return IDMask(labels.astype(np.int32), frame=frame)
