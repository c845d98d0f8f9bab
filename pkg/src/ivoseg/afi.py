"""Mask generation for the frames the user scribbled on in one round.

Pipeline: per-frame descriptor pyramids with confidence-weighted ID
channels, a within-frame star attention pass, one cross-frame attention
pass that lets every interacted frame borrow evidence from the others,
a fine-stride enhancer, then fused ID logits decoded to a mask.

All label information rides the (M+1) ID channels, so any number of
objects costs one pass.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .config import EngineConfig
from .domain import Frame, IDMask, ScribbleMap
from .errors import EmptyEvidenceError
from .features import build_descriptors, grid_shape, upsample_channels
from .identity import id_channels, id_decode, id_embed
from .kernels import multi_head_attention
from .rng import SplitMix64

_EPS = 1e-8

# 8-point star: 4-connected ring plus a wider diagonal ring (no center; the
# residual into the cross-frame stage keeps each cell's own descriptor alive)
_STAR_OFFSETS = ((1, 0), (-1, 0), (0, 1), (0, -1), (2, 2), (2, -2), (-2, 2), (-2, -2))
_ENHANCER_DILATIONS = (1, 2, 4)


@dataclass
class PyramidLevel:
    stride: int
    desc: np.ndarray  # Hs x Ws x 20 unit rows
    ids: np.ndarray | None = None  # Hs x Ws x (M+1) confidence-weighted


@dataclass
class FeaturePyramid:
    frame: int
    size: tuple[int, int]
    num_objects: int
    low: PyramidLevel  # stride 4
    mid: PyramidLevel  # stride 8
    high: PyramidLevel  # stride 16, no ids


@dataclass
class AcrossFrameEmbedding:
    frame: int
    desc: np.ndarray  # stride-8 fused descriptors
    ids: np.ndarray  # stride-8 migrated ID channels


def _maxpool_channels(arr: np.ndarray, stride: int) -> np.ndarray:
    """Per-channel max over stride x stride cells, ceil extents edge-padded."""
    h, w, c = arr.shape
    ph, pw = (-h) % stride, (-w) % stride
    if ph or pw:
        arr = np.pad(arr, [(0, ph), (0, pw), (0, 0)], mode="edge")
    hs, ws = arr.shape[0] // stride, arr.shape[1] // stride
    return arr.reshape(hs, stride, ws, stride, c).max(axis=(1, 3))


def _pooled_id_channels(
    stride: int,
    num_objects: int,
    cfg: EngineConfig,
    scribble: ScribbleMap | None,
    prev_mask: IDMask | None,
    size: tuple[int, int],
) -> np.ndarray:
    """Cell-level ID evidence: per-pixel confidence channels (scribbles beat
    the previous round's mask on the pixels they cover) max-pooled per
    channel, so a cell keeps every id that touches it."""
    h, w = size
    full = np.zeros((h, w, id_channels(num_objects)), np.float32)
    if prev_mask is not None:
        full = id_embed(prev_mask.labels, num_objects, cfg.prev_mask_confidence)
    if scribble is not None:
        emb = id_embed(scribble.labels, num_objects, cfg.scribble_confidence)
        drawn = scribble.labeled()
        full[drawn] = emb[drawn]
    return _maxpool_channels(full, stride)


def extract_feature_pyramid(
    frame: Frame,
    num_objects: int,
    cfg: EngineConfig,
    scribble: ScribbleMap | None = None,
    prev_mask: IDMask | None = None,
) -> FeaturePyramid:
    size = (frame.height, frame.width)
    levels = {}
    for stride in (4, 8, 16):
        desc = build_descriptors(frame.rgb, stride, cfg.position_weight)
        ids = None
        if stride in (4, 8):
            ids = _pooled_id_channels(stride, num_objects, cfg, scribble, prev_mask, size)
        levels[stride] = PyramidLevel(stride=stride, desc=desc, ids=ids)
    return FeaturePyramid(
        frame=frame.index,
        size=size,
        num_objects=num_objects,
        low=levels[4],
        mid=levels[8],
        high=levels[16],
    )


def _normalize_rows(desc: np.ndarray) -> np.ndarray:
    norm = np.linalg.norm(desc, axis=-1, keepdims=True)
    return (desc / np.maximum(norm, _EPS)).astype(np.float32)


def _shifted(desc: np.ndarray, dy: int, dx: int) -> np.ndarray:
    """Neighbor grid at offset (dy, dx) with edge clamping."""
    hs, ws = desc.shape[:2]
    ys = np.clip(np.arange(hs) + dy, 0, hs - 1)
    xs = np.clip(np.arange(ws) + dx, 0, ws - 1)
    return desc[np.ix_(ys, xs)]


def star_attention(desc: np.ndarray, within_temperature: float) -> np.ndarray:
    """Within-frame pass: each cell softly mixes an 8-point star of neighbors,
    weighted by descriptor similarity to the center."""
    neigh = np.stack([_shifted(desc, dy, dx) for dy, dx in _STAR_OFFSETS], axis=0)
    logits = np.einsum("hwc,ohwc->ohw", desc.astype(np.float64), neigh.astype(np.float64))
    logits /= within_temperature
    logits -= logits.max(axis=0, keepdims=True)
    w = np.exp(logits)
    w /= w.sum(axis=0, keepdims=True)
    mixed = np.einsum("ohw,ohwc->hwc", w, neigh.astype(np.float64))
    return _normalize_rows(mixed)


def _pool_grid_2x(grid: np.ndarray) -> np.ndarray:
    """2x average pooling with ceil extents (edge-replicated)."""
    hs, ws = grid.shape[:2]
    ph, pw = (-hs) % 2, (-ws) % 2
    if ph or pw:
        grid = np.pad(grid, [(0, ph), (0, pw), (0, 0)], mode="edge")
    h2, w2 = grid.shape[0] // 2, grid.shape[1] // 2
    return grid.reshape(h2, 2, w2, 2, -1).mean(axis=(1, 3)).astype(np.float32)


def across_frame_attention(
    pyramids: list[FeaturePyramid], cfg: EngineConfig
) -> list[AcrossFrameEmbedding]:
    """Fuse every interacted frame's mid-level tokens with all the others',
    then migrate ID evidence onto every cell by attention over labeled cells.

    Keys and values are average-pooled 2x at a time until the joint token
    count fits ``cfg.token_cap``; queries stay at full grid resolution.
    """
    if not pyramids:
        raise ValueError("need at least one pyramid")
    within = [star_attention(p.mid.desc, cfg.within_temperature) for p in pyramids]

    kv_grids = list(within)
    while sum(g.shape[0] * g.shape[1] for g in kv_grids) > cfg.token_cap:
        poolable = [i for i, g in enumerate(kv_grids) if g.shape[0] > 1 or g.shape[1] > 1]
        if not poolable:
            break
        kv_grids = [
            _normalize_rows(_pool_grid_2x(g)) if i in poolable else g
            for i, g in enumerate(kv_grids)
        ]
    kv = np.concatenate([g.reshape(-1, g.shape[-1]) for g in kv_grids], axis=0)

    fused = []
    for grid in within:
        hs, ws, d = grid.shape
        q = grid.reshape(-1, d)
        attended = multi_head_attention(q, kv, kv, heads=cfg.heads, temperature=cfg.temperature)
        fused.append(_normalize_rows(q + attended).reshape(hs, ws, d))

    # gather labeled mid cells across every frame as the migration source
    key_rows, val_rows = [], []
    for p, f in zip(pyramids, fused):
        ids = p.mid.ids
        labeled = ids.max(axis=-1) > 0.0
        if labeled.any():
            key_rows.append(f[labeled])
            val_rows.append(ids[labeled])
    out = []
    for p, f in zip(pyramids, fused):
        hs, ws, d = f.shape
        if key_rows:
            keys = np.concatenate(key_rows, axis=0)
            vals = np.concatenate(val_rows, axis=0)
            ids = multi_head_attention(
                f.reshape(-1, d), keys, vals, heads=cfg.heads, temperature=cfg.temperature
            ).reshape(hs, ws, -1)
        else:
            ids = np.zeros((hs, ws, id_channels(p.num_objects)), np.float32)
        out.append(AcrossFrameEmbedding(frame=p.frame, desc=f, ids=ids.astype(np.float32)))
    return out


def _enhancer_weights(in_dim: int, out_dim: int, seed: int) -> np.ndarray:
    rng = SplitMix64(seed)
    scale = np.sqrt(3.0 / in_dim)
    w = np.array([[rng.uniform(-1.0, 1.0) for _ in range(out_dim)] for _ in range(in_dim)])
    return (w * scale).astype(np.float32)


@dataclass
class EnhancedFrame:
    desc: np.ndarray  # Hs4 x Ws4 x enhancer_channels unit rows
    ids: np.ndarray  # the low level's ID channels, bypassed untouched


def frame_enhancer(pyramid: FeaturePyramid, cfg: EngineConfig) -> EnhancedFrame:
    """Fine-stride descriptors: low-level detail plus upsampled context,
    spread through dilated 3x3 mean pools, then a fixed seeded projection.

    The response to an impulse input covers the 25 distinct offsets of the
    dilation set.  ID channels ride through on a bypass, untouched.
    """
    hs4, ws4 = grid_shape(pyramid.size[0], pyramid.size[1], 4)
    high_up = upsample_channels(pyramid.high.desc, 4, (hs4, ws4))
    x = np.concatenate([pyramid.low.desc, high_up], axis=-1).astype(np.float64)
    pooled = []
    for d in _ENHANCER_DILATIONS:
        acc = np.zeros_like(x)
        for dy in (-d, 0, d):
            for dx in (-d, 0, d):
                acc += _shifted(x, dy, dx)
        pooled.append(acc / 9.0)
    feats = np.concatenate(pooled, axis=-1)
    w = _enhancer_weights(feats.shape[-1], cfg.enhancer_channels, cfg.enhancer_seed)
    out = np.maximum(feats @ w.astype(np.float64), 0.0)
    return EnhancedFrame(desc=_normalize_rows(out), ids=pyramid.low.ids)


def _has_evidence(pyramids: list[FeaturePyramid], prev_masks: dict[int, IDMask] | None) -> bool:
    if prev_masks:
        return True
    return any(
        (p.low.ids is not None and p.low.ids.max() > 0)
        or (p.mid.ids is not None and p.mid.ids.max() > 0)
        for p in pyramids
    )


def afi_masks(
    pyramids: list[FeaturePyramid],
    embeddings: list[AcrossFrameEmbedding],
    scribbles: dict[int, ScribbleMap],
    prev_masks: dict[int, IDMask] | None,
    cfg: EngineConfig,
    round: int = 0,
) -> dict[int, IDMask]:
    """Decode one mask per interacted frame from fused ID logits.

    Logits blend the migrated cross-frame channels (alpha), a fine-stride
    readout against the frame's own labeled cells (beta) and the previous
    round's mask (gamma).  Pixels under a scribble always keep the
    scribbled id.
    """
    if not _has_evidence(pyramids, prev_masks):
        raise EmptyEvidenceError("no scribbles and no previous masks to segment from")
    prev_masks = prev_masks or {}
    out = {}
    for p, emb in zip(pyramids, embeddings):
        h, w = p.size
        hs4, ws4 = grid_shape(h, w, 4)
        logits4 = cfg.alpha * upsample_channels(emb.ids, 2, (hs4, ws4))
        labeled = p.low.ids.max(axis=-1) > 0.0
        if labeled.any():
            # fine-stride tokens: raw low-level descriptors keep the color
            # separation the enhancer's wide pooling smooths away
            enhanced = frame_enhancer(p, cfg)
            fine = _normalize_rows(np.concatenate([p.low.desc, enhanced.desc], axis=-1))
            q = fine.reshape(-1, fine.shape[-1])
            local = multi_head_attention(
                q,
                fine[labeled],
                enhanced.ids[labeled],
                heads=cfg.heads,
                temperature=cfg.temperature,
            ).reshape(hs4, ws4, -1)
            logits4 = logits4 + cfg.beta * local
        full = upsample_channels(logits4, 4, (h, w))
        prev = prev_masks.get(p.frame)
        if prev is not None:
            hot = np.zeros((h, w, id_channels(p.num_objects)), np.float32)
            idx = np.nonzero(np.ones((h, w), bool))
            hot[idx + (prev.labels.reshape(-1),)] = 1.0
            full = full + cfg.gamma * hot
        labels = id_decode(full)
        scribble = scribbles.get(p.frame)
        if scribble is not None:
            drawn = scribble.labeled()
            labels[drawn] = scribble.labels[drawn]
        out[p.frame] = IDMask(labels, frame=p.frame, round=round)
    return out
