"""Across-round memory and concurrent mask propagation.

Interacted frames deposit (descriptor-key, ID-value) entries into a memory
that persists across rounds.  Non-interacted frames are decoded by attention
readout against that memory: one pass yields all (M+1) ID channels at once
(the concurrent path), against a per-object baseline that runs one binary
readout per object and therefore scales linearly in object count.

Propagation runs in two phases.  Phase 1 walks truncated segments outward
from each interacted frame to the midpoint toward its neighbor, carrying a
short-term entry of the previously decoded frame for temporal smoothness.
Phase 2 re-decodes every non-interacted frame against the bare round memory;
phase-2 results are final.
"""

from __future__ import annotations

import csv
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .config import EngineConfig
from .domain import Frame, IDMask
from .errors import CapacityError, EmptyMemoryError, PreconditionError
from .features import build_descriptors, pool_labels, upsample_channels
from .identity import id_channels, id_decode, id_embed
from .kernels import attention_mac_count, multi_head_attention

DECODE_STRIDE = 4


@dataclass
class LedgerRow:
    stage: str
    macs: int
    wall_ms: float


class MacLedger:
    """Multiply-accumulate and wall-time accounting, one row per decode pass."""

    def __init__(self):
        self.rows: list[LedgerRow] = []

    def add(self, stage: str, macs: int, wall_ms: float) -> None:
        self.rows.append(LedgerRow(stage, int(macs), float(wall_ms)))

    def total_macs(self, stage: str | None = None) -> int:
        return sum(r.macs for r in self.rows if stage is None or r.stage == stage)

    def total_wall_ms(self, stage: str | None = None) -> float:
        return sum(r.wall_ms for r in self.rows if stage is None or r.stage == stage)

    def to_csv(self, path: str) -> None:
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["stage", "macs", "wall_ms"])
            for r in self.rows:
                w.writerow([r.stage, r.macs, f"{r.wall_ms:.3f}"])


@dataclass(frozen=True)
class MemoryEntry:
    """Keys and ID values of one interacted frame at decode stride."""

    frame: int
    round: int
    keys: np.ndarray  # Hs x Ws x D unit descriptor rows
    values: np.ndarray  # Hs x Ws x (M+1), one-hot per cell

    def __post_init__(self):
        if self.keys.shape[:2] != self.values.shape[:2]:
            raise ValueError("keys and values must be spatially aligned")


@dataclass(frozen=True)
class RoundMemory:
    """Immutable snapshot of all interacted-frame entries up to some round."""

    entries: tuple[MemoryEntry, ...] = ()
    round: int = 0

    def __post_init__(self):
        frames = [e.frame for e in self.entries]
        if len(frames) != len(set(frames)):
            raise ValueError("memory holds at most one entry per frame")

    @property
    def size(self) -> int:
        return len(self.entries)

    @property
    def frames(self) -> tuple[int, ...]:
        return tuple(e.frame for e in self.entries)


def memory_entry(
    frame: Frame,
    mask: IDMask,
    num_objects: int,
    cfg: EngineConfig,
    round: int = 0,
) -> MemoryEntry:
    keys = build_descriptors(frame.rgb, DECODE_STRIDE, cfg.position_weight)
    pooled = pool_labels(mask.labels, DECODE_STRIDE)
    values = id_embed(pooled, num_objects, 1.0)
    return MemoryEntry(frame=frame.index, round=round, keys=keys, values=values)


def update_memory(
    prev: RoundMemory | None, new_entries: list[MemoryEntry], round: int, cfg: EngineConfig
) -> RoundMemory:
    """Fresh memory with the round's entries appended; same-frame entries are
    replaced (latest round wins).  Over-cap growth fails fast: no eviction."""
    if not new_entries:
        raise ValueError("update_memory needs at least one new entry")
    merged: dict[int, MemoryEntry] = {}
    if prev is not None:
        for e in prev.entries:
            merged[e.frame] = e
    for e in new_entries:
        merged[e.frame] = e
    entries = tuple(merged[f] for f in sorted(merged))
    if cfg.memory_cap is not None and len(entries) > cfg.memory_cap:
        raise CapacityError(f"memory would hold {len(entries)} entries, cap is {cfg.memory_cap}")
    return RoundMemory(entries=entries, round=round)


def _gathered(memory: RoundMemory, extra: MemoryEntry | None):
    entries = list(memory.entries)
    if extra is not None:
        entries = [e for e in entries if e.frame != extra.frame] + [extra]
    if not entries:
        raise EmptyMemoryError("decode requires a non-empty memory")
    d = entries[0].keys.shape[-1]
    k = np.concatenate([e.keys.reshape(-1, d) for e in entries], axis=0)
    c = entries[0].values.shape[-1]
    v = np.concatenate([e.values.reshape(-1, c) for e in entries], axis=0)
    return k, v


def _object_groups(num_objects: int, capacity: int) -> list[list[int]]:
    ids = list(range(1, num_objects + 1))
    return [ids[i : i + capacity] for i in range(0, len(ids), capacity)] or [[]]


def decode_frame_scores(
    memory: RoundMemory,
    frame: Frame,
    num_objects: int,
    cfg: EngineConfig,
    extra: MemoryEntry | None = None,
    ledger: MacLedger | None = None,
    stage: str = "decode",
) -> np.ndarray:
    """Full-resolution (M+1)-channel scores of the concurrent decoder.

    Objects are decoded in batches of at most ``cfg.capacity`` ids per
    attention pass; each extra batch recomputes the attention weights, which
    is where the capacity step in wall time comes from.  Background scores
    are identical in every pass, so batching is exact.
    """
    k, v = _gathered(memory, extra)
    desc = build_descriptors(frame.rgb, DECODE_STRIDE, cfg.position_weight)
    hs, ws, d = desc.shape
    q = desc.reshape(-1, d)
    scores = np.zeros((q.shape[0], id_channels(num_objects)), np.float32)
    t0 = time.perf_counter()
    macs = 0
    for group in _object_groups(num_objects, cfg.capacity):
        vg = np.zeros((v.shape[0], 1 + len(group)), np.float32)
        vg[:, 0] = v[:, 0]
        for j, obj in enumerate(group):
            vg[:, 1 + j] = v[:, obj]
        out = multi_head_attention(q, k, vg, heads=cfg.heads, temperature=cfg.temperature)
        scores[:, 0] = out[:, 0]
        scores[:, group] = out[:, 1:]
        macs += attention_mac_count(q.shape[0], k.shape[0], d, 1 + len(group), cfg.heads)
    if ledger is not None:
        ledger.add(stage, macs, (time.perf_counter() - t0) * 1000.0)
    return upsample_channels(
        scores.reshape(hs, ws, -1), DECODE_STRIDE, (frame.height, frame.width)
    )


def decode_frame(
    memory: RoundMemory,
    frame: Frame,
    num_objects: int,
    cfg: EngineConfig,
    extra: MemoryEntry | None = None,
    ledger: MacLedger | None = None,
    stage: str = "decode",
    round: int = 0,
) -> IDMask:
    scores = decode_frame_scores(memory, frame, num_objects, cfg, extra, ledger, stage)
    return IDMask(id_decode(scores), frame=frame.index, round=round)


def decode_frame_per_object_scores(
    memory: RoundMemory,
    frame: Frame,
    num_objects: int,
    cfg: EngineConfig,
    ledger: MacLedger | None = None,
    stage: str = "decode-per-object",
) -> np.ndarray:
    """Baseline path: one binary readout per object, background = 1 - sum.

    Each readout recomputes the full attention, so cost grows linearly with
    the object count.  Shares weights with the concurrent path, hence equal
    scores up to float error.
    """
    k, v = _gathered(memory, None)
    desc = build_descriptors(frame.rgb, DECODE_STRIDE, cfg.position_weight)
    hs, ws, d = desc.shape
    q = desc.reshape(-1, d)
    scores = np.zeros((q.shape[0], id_channels(num_objects)), np.float32)
    t0 = time.perf_counter()
    macs = 0
    for obj in range(1, num_objects + 1):
        vbin = v[:, obj : obj + 1]
        out = multi_head_attention(q, k, vbin, heads=cfg.heads, temperature=cfg.temperature)
        scores[:, obj] = out[:, 0]
        macs += attention_mac_count(q.shape[0], k.shape[0], d, 1, cfg.heads)
    scores[:, 0] = 1.0 - scores[:, 1:].sum(axis=1)
    if ledger is not None:
        ledger.add(stage, macs, (time.perf_counter() - t0) * 1000.0)
    return upsample_channels(
        scores.reshape(hs, ws, -1), DECODE_STRIDE, (frame.height, frame.width)
    )


def decode_frame_per_object(
    memory: RoundMemory,
    frame: Frame,
    num_objects: int,
    cfg: EngineConfig,
    ledger: MacLedger | None = None,
    stage: str = "decode-per-object",
    round: int = 0,
) -> IDMask:
    scores = decode_frame_per_object_scores(memory, frame, num_objects, cfg, ledger, stage)
    return IDMask(id_decode(scores), frame=frame.index, round=round)


@dataclass(frozen=True)
class Segment:
    source: int
    direction: str  # "forward" | "backward"
    targets: tuple[int, ...]  # ordered away from the source


@dataclass(frozen=True)
class PropagationPlan:
    segments: tuple[Segment, ...]
    interacted: tuple[int, ...]
    total: int

    def target_frames(self) -> list[int]:
        return [t for seg in self.segments for t in seg.targets]


def plan_truncated_propagation(interacted: list[int], total: int) -> PropagationPlan:
    """Partition non-interacted frames into directed segments.

    Between adjacent interacted frames a < b, forward-from-a covers
    (a, mid] and backward-from-b covers (mid, b) with mid = (a + b) // 2,
    which assigns every frame to its nearest interacted frame with ties to
    the smaller index.  Frames before the first interacted frame are covered
    backward, frames after the last forward.
    """
    if not interacted:
        raise ValueError("need at least one interacted frame")
    r = sorted(set(int(t) for t in interacted))
    if r[0] < 0 or r[-1] >= total:
        raise ValueError(f"interacted frames {r} out of range [0, {total})")
    segments = []

    def emit(source, direction, targets):
        if targets:
            segments.append(Segment(source=source, direction=direction, targets=tuple(targets)))

    emit(r[0], "backward", list(range(r[0] - 1, -1, -1)))
    for a, b in zip(r[:-1], r[1:]):
        mid = (a + b) // 2
        emit(a, "forward", list(range(a + 1, mid + 1)))
        emit(b, "backward", list(range(b - 1, mid, -1)))
    emit(r[-1], "forward", list(range(r[-1] + 1, total)))
    return PropagationPlan(segments=tuple(segments), interacted=tuple(r), total=total)


def propagate_round(
    video: list[Frame],
    memory: RoundMemory,
    afi_masks: dict[int, IDMask],
    num_objects: int,
    cfg: EngineConfig,
    round: int = 1,
    ledger: MacLedger | None = None,
    progress=None,
) -> dict[int, IDMask]:
    """Produce a mask for every frame of the video for this round.

    Interacted frames keep their interaction masks untouched.  Phase 1
    decodes along the truncated plan with a short-term entry of the
    previously decoded frame (cleared at each segment start).  When
    ``cfg.re_propagate`` is set, phase 2 re-decodes all non-interacted
    frames against the bare memory and those results are final.

    ``progress(stage, frame)`` is invoked per decoded frame with stages
    "truncated" and "repropagated".
    """
    if not afi_masks:
        raise PreconditionError("propagate_round requires the round's interaction masks")
    if memory.size == 0:
        raise EmptyMemoryError("propagate_round requires a non-empty memory")
    total = len(video)
    for t in afi_masks:
        if not 0 <= t < total:
            raise ValueError(f"interacted frame {t} out of range")
    plan = plan_truncated_propagation(sorted(afi_masks), total)
    out: dict[int, IDMask] = {t: m for t, m in afi_masks.items()}

    def decode_segment(seg: Segment) -> list[tuple[int, IDMask]]:
        results = []
        short: MemoryEntry | None = None
        for t in seg.targets:
            mask = decode_frame(
                memory, video[t], num_objects, cfg,
                extra=short, ledger=ledger, stage="truncated", round=round,
            )
            results.append((t, mask))
            short = memory_entry(video[t], mask, num_objects, cfg, round=round)
            if progress is not None:
                progress("truncated", t)
        return results

    if cfg.threads > 1 and len(plan.segments) > 1:
        with ThreadPoolExecutor(max_workers=cfg.threads) as pool:
            for results in pool.map(decode_segment, plan.segments):
                for t, mask in results:
                    out[t] = mask
    else:
        for seg in plan.segments:
            for t, mask in decode_segment(seg):
                out[t] = mask

    if cfg.re_propagate:
        targets = sorted(plan.target_frames())

        def redecode(t: int) -> tuple[int, IDMask]:
            # ledger rows may interleave across workers; row order is not
            # part of any determinism contract, totals are
            mask = decode_frame(
                memory, video[t], num_objects, cfg,
                ledger=ledger, stage="repropagated", round=round,
            )
            return t, mask

        if cfg.threads > 1 and len(targets) > 1:
            with ThreadPoolExecutor(max_workers=cfg.threads) as pool:
                results = list(pool.map(redecode, targets))
        else:
            results = [redecode(t) for t in targets]
        for t, mask in results:
            out[t] = mask
            if progress is not None:
                progress("repropagated", t)
    return out
