"""Across-round memory, truncated planning, and the concurrent decoder."""
from __future__ import annotations

import numpy as np
import pytest

from ivoseg.afi import across_frame_attention, afi_masks, extract_feature_pyramid
from ivoseg.config import EngineConfig
from ivoseg.domain import Frame, IDMask, rasterize_strokes
from ivoseg.errors import CapacityError, EmptyMemoryError, PreconditionError
from ivoseg.propagation import (
    MacLedger,
    MemoryEntry,
    RoundMemory,
    decode_frame,
    decode_frame_per_object,
    decode_frame_per_object_scores,
    decode_frame_scores,
    memory_entry,
    plan_truncated_propagation,
    propagate_round,
    update_memory,
)
from ivoseg.features import pool_labels
from ivoseg.identity import id_embed
from ivoseg.robot import initial_scribbles
from ivoseg.synth import ObjectSpec, SceneConfig, generate_scene


def _interaction_masks(frames, gt, ts, n, cfg):
    shape = gt[0].shape
    scr = {
        t: rasterize_strokes(initial_scribbles(gt[t]), shape, frame=t, round=1) for t in ts
    }
    pyrs = [extract_feature_pyramid(frames[t], n, cfg, scribble=scr[t]) for t in ts]
    emb = across_frame_attention(pyrs, cfg)
    return afi_masks(pyrs, emb, scr, None, cfg, round=1)


def test_plan_single_frame():
    plan = plan_truncated_propagation([5], 10)
    assert [
        (s.source, s.direction, s.targets) for s in plan.segments
    ] == [
        (5, "backward", (4, 3, 2, 1, 0)),
        (5, "forward", (6, 7, 8, 9)),
    ]


def test_plan_two_frames_split_at_midpoint():
    plan = plan_truncated_propagation([2, 8], 11)
    assert [
        (s.source, s.direction, s.targets) for s in plan.segments
    ] == [
        (2, "backward", (1, 0)),
        (2, "forward", (3, 4, 5)),
        (8, "backward", (7, 6)),
        (8, "forward", (9, 10)),
    ]


def test_plan_all_frames_interacted():
    plan = plan_truncated_propagation([0, 1, 2], 3)
    assert plan.segments == ()
    assert plan.target_frames() == []


def test_plan_validation():
    with pytest.raises(ValueError):
        plan_truncated_propagation([], 5)
    with pytest.raises(ValueError):
        plan_truncated_propagation([5], 5)
    with pytest.raises(ValueError):
        plan_truncated_propagation([-1], 5)


def test_plan_partitions_frames():
    """Every non-interacted frame appears in exactly one segment."""
    rng = np.random.default_rng(71)
    for _ in range(200):
        total = int(rng.integers(1, 30))
        k = int(rng.integers(1, total + 1))
        interacted = sorted(rng.choice(total, size=k, replace=False).tolist())
        plan = plan_truncated_propagation(interacted, total)
        targets = plan.target_frames()
        assert len(targets) == len(set(targets))
        assert set(targets) | set(interacted) == set(range(total))
        assert not set(targets) & set(interacted)


def test_plan_assigns_nearest_source():
    """Each target's segment source is its nearest interacted frame,
    ties resolved toward the smaller index."""
    rng = np.random.default_rng(72)
    for _ in range(100):
        total = int(rng.integers(2, 25))
        k = int(rng.integers(1, total))
        interacted = sorted(rng.choice(total, size=k, replace=False).tolist())
        plan = plan_truncated_propagation(interacted, total)
        for seg in plan.segments:
            for t in seg.targets:
                best = min(interacted, key=lambda s: (abs(t - s), s))
                assert seg.source == best, (interacted, t)


def test_memory_entry_is_pooled_embedding(cfg):
    rng = np.random.default_rng(73)
    frame = Frame(index=3, rgb=rng.random((24, 24, 3)).astype(np.float32))
    labels = rng.integers(0, 3, size=(24, 24)).astype(np.int32)
    entry = memory_entry(frame, IDMask(labels, frame=3), 2, cfg, round=2)
    assert entry.frame == 3 and entry.round == 2
    assert entry.keys.shape == (6, 6, 20)
    want = id_embed(pool_labels(labels, 4), 2, 1.0)
    assert np.array_equal(entry.values, want)


def test_memory_entry_alignment_checked():
    with pytest.raises(ValueError):
        MemoryEntry(
            frame=0, round=0,
            keys=np.zeros((4, 4, 20), np.float32),
            values=np.zeros((5, 4, 3), np.float32),
        )


def test_update_memory_appends_and_replaces(pair_64, cfg):
    frames, gt = pair_64
    e0 = memory_entry(frames[0], gt[0], 2, cfg, round=1)
    e1 = memory_entry(frames[1], gt[1], 2, cfg, round=1)
    mem = update_memory(None, [e0, e1], 1, cfg)
    assert mem.size == 2 and mem.frames == (0, 1) and mem.round == 1

    # same frame at a later round replaces, new frame appends
    e1b = memory_entry(frames[1], gt[1], 2, cfg, round=2)
    e2 = memory_entry(frames[2], gt[2], 2, cfg, round=2)
    mem2 = update_memory(mem, [e1b, e2], 2, cfg)
    assert mem2.frames == (0, 1, 2) and mem2.round == 2
    by_frame = {e.frame: e.round for e in mem2.entries}
    assert by_frame == {0: 1, 1: 2, 2: 2}
    # the older snapshot is untouched
    assert mem.size == 2


def test_update_memory_rejects_empty(cfg):
    with pytest.raises(ValueError):
        update_memory(None, [], 1, cfg)


def test_update_memory_capacity_fails_fast(pair_64):
    frames, gt = pair_64
    capped = EngineConfig(memory_cap=2)
    entries = [memory_entry(frames[t], gt[t], 2, capped, round=1) for t in range(3)]
    mem = update_memory(None, entries[:2], 1, capped)
    with pytest.raises(CapacityError):
        update_memory(mem, entries[2:], 2, capped)


def test_memory_rejects_duplicate_frames(cfg):
    k = np.zeros((2, 2, 20), np.float32)
    v = np.zeros((2, 2, 2), np.float32)
    with pytest.raises(ValueError):
        RoundMemory(
            entries=(
                MemoryEntry(frame=1, round=1, keys=k, values=v),
                MemoryEntry(frame=1, round=2, keys=k, values=v),
            )
        )


def test_decode_retrieves_own_frame(pair_256, cfg):
    """Decoding the frame whose entry is in memory reproduces its mask on
    at least 99% of pixels."""
    frames, gt = pair_256
    masks = _interaction_masks(frames, gt, [0], 2, cfg)
    mem = update_memory(None, [memory_entry(frames[0], masks[0], 2, cfg, round=1)], 1, cfg)
    dec = decode_frame(mem, frames[0], 2, cfg)
    agree = float((dec.labels == masks[0].labels).mean())
    assert agree >= 0.99, agree


def test_decode_background_only_memory(pair_64, cfg):
    frames, _ = pair_64
    empty = IDMask(np.zeros((64, 64), np.int32), frame=0)
    mem = update_memory(None, [memory_entry(frames[0], empty, 2, cfg, round=1)], 1, cfg)
    dec = decode_frame(mem, frames[1], 2, cfg)
    assert not dec.labels.any()


def test_decode_empty_memory_rejected(pair_64, cfg):
    frames, _ = pair_64
    with pytest.raises(EmptyMemoryError):
        decode_frame(RoundMemory(), frames[0], 2, cfg)


def test_decoder_paths_agree(pair_64, cfg):
    """Concurrent and per-object scores pick the same label wherever the
    top two candidates are separated."""
    frames, gt = pair_64
    masks = _interaction_masks(frames, gt, [0], 2, cfg)
    mem = update_memory(None, [memory_entry(frames[0], masks[0], 2, cfg, round=1)], 1, cfg)
    a = decode_frame_scores(mem, frames[2], 2, cfg)
    b = decode_frame_per_object_scores(mem, frames[2], 2, cfg)
    la = np.argmax(a, axis=-1)
    lb = np.argmax(b, axis=-1)
    srt = np.sort(a, axis=-1)
    separated = (srt[..., -1] - srt[..., -2]) > 1e-6
    assert np.array_equal(la[separated], lb[separated])
    assert separated.mean() > 0.9


def test_decode_ledger_accounting(pair_64, cfg):
    frames, gt = pair_64
    mem = update_memory(None, [memory_entry(frames[0], gt[0], 2, cfg, round=1)], 1, cfg)
    ledger = MacLedger()
    decode_frame(mem, frames[1], 2, cfg, ledger=ledger, stage="probe")
    assert ledger.total_macs("probe") > 0
    assert ledger.total_macs("other") == 0
    assert ledger.total_wall_ms() > 0.0


def test_ledger_csv(tmp_path):
    ledger = MacLedger()
    ledger.add("a", 10, 1.5)
    ledger.add("b", 20, 2.5)
    path = tmp_path / "ledger.csv"
    ledger.to_csv(str(path))
    lines = path.read_text().strip().splitlines()
    assert lines[0] == "stage,macs,wall_ms"
    assert lines[1].startswith("a,10,") and len(lines) == 3


def test_propagate_preconditions(pair_64, cfg):
    frames, gt = pair_64
    mem = update_memory(None, [memory_entry(frames[0], gt[0], 2, cfg, round=1)], 1, cfg)
    with pytest.raises(PreconditionError):
        propagate_round(frames, mem, {}, 2, cfg)
    with pytest.raises(EmptyMemoryError):
        propagate_round(frames, mem.__class__(), {0: gt[0]}, 2, cfg)
    with pytest.raises(ValueError):
        propagate_round(frames, mem, {99: gt[0]}, 2, cfg)


def test_propagate_static_scene_transfers_mask(cfg):
    """On a motionless scene the interacted frame's mask transfers almost
    perfectly to its neighbors."""
    scene = SceneConfig(
        name="static", num_frames=3, height=128, width=128, seed=3,
        background="flat",
        objects=(
            ObjectSpec(
                shape="circle", color=(0.9, 0.15, 0.1), z=1, size=30.0,
                center=(64.0, 64.0),
            ),
        ),
    )
    frames, gt = generate_scene(scene)
    masks = _interaction_masks(frames, gt, [1], 1, cfg)
    mem = update_memory(None, [memory_entry(frames[1], masks[1], 1, cfg, round=1)], 1, cfg)
    pred = propagate_round(frames, mem, masks, 1, cfg, round=1)
    for t in (0, 2):
        agree = float((pred[t].labels == masks[1].labels).mean())
        assert agree >= 0.99, (t, agree)


def test_propagate_covers_every_frame(pair_64, cfg):
    frames, gt = pair_64
    masks = _interaction_masks(frames, gt, [1], 2, cfg)
    mem = update_memory(None, [memory_entry(frames[1], masks[1], 2, cfg, round=1)], 1, cfg)
    out = propagate_round(frames, mem, masks, 2, cfg, round=1)
    assert sorted(out) == [0, 1, 2]
    # the interacted frame keeps its interaction mask untouched
    assert out[1] is masks[1]


def test_repropagation_is_pure_memory_readout(pair_64, cfg):
    """With re-propagation on, a non-interacted frame's final mask depends
    only on the round memory, not on the truncated pass."""
    frames, gt = pair_64
    masks = _interaction_masks(frames, gt, [1], 2, cfg)
    mem = update_memory(None, [memory_entry(frames[1], masks[1], 2, cfg, round=1)], 1, cfg)
    out = propagate_round(frames, mem, masks, 2, cfg, round=1)
    for t in (0, 2):
        bare = decode_frame(mem, frames[t], 2, cfg, round=1)
        assert np.array_equal(out[t].labels, bare.labels)


def test_propagate_without_repropagation(pair_64):
    cfg = EngineConfig(re_propagate=False)
    frames, gt = pair_64
    masks = _interaction_masks(frames, gt, [1], 2, cfg)
    mem = update_memory(None, [memory_entry(frames[1], masks[1], 2, cfg, round=1)], 1, cfg)
    out = propagate_round(frames, mem, masks, 2, cfg, round=1)
    assert sorted(out) == [0, 1, 2]
    rerun = propagate_round(frames, mem, masks, 2, cfg, round=1)
    for t in out:
        assert np.array_equal(out[t].labels, rerun[t].labels)


def test_propagate_progress_stages(pair_64, cfg):
    frames, gt = pair_64
    masks = _interaction_masks(frames, gt, [1], 2, cfg)
    mem = update_memory(None, [memory_entry(frames[1], masks[1], 2, cfg, round=1)], 1, cfg)
    seen = []
    propagate_round(
        frames, mem, masks, 2, cfg, round=1,
        progress=lambda stage, t: seen.append((stage, t)),
    )
    truncated = sorted(t for s, t in seen if s == "truncated")
    redone = sorted(t for s, t in seen if s == "repropagated")
    assert truncated == [0, 2] and redone == [0, 2]


def test_propagate_threaded_matches_serial(pair_64):
    serial_cfg = EngineConfig(threads=1)
    threaded_cfg = EngineConfig(threads=4)
    frames, gt = pair_64
    masks = _interaction_masks(frames, gt, [1], 2, serial_cfg)
    mem = update_memory(
        None, [memory_entry(frames[1], masks[1], 2, serial_cfg, round=1)], 1, serial_cfg
    )
    a = propagate_round(frames, mem, masks, 2, serial_cfg, round=1)
    b = propagate_round(frames, mem, masks, 2, threaded_cfg, round=1)
    for t in a:
        assert np.array_equal(a[t].labels, b[t].labels)
