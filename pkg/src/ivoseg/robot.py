"""Automated interaction loop: pick the worst frame, scribble it from GT.

The robot stands in for a human.  Each round it selects the frames with the
lowest J&F against ground truth, draws corrective strokes along the
distance-transform ridge of the largest error regions, and runs the full
interaction-propagation cycle.  Stroke radii shrink to fit so rasterized
strokes stay strictly inside the region they correct.
"""

from __future__ import annotations

import time
from collections import deque

import numpy as np
from scipy import ndimage
from skimage.morphology import skeletonize

from .afi import across_frame_attention, afi_masks, extract_feature_pyramid
from .config import EngineConfig
from .domain import Frame, IDMask, ScribbleStroke, rasterize_strokes
from .metrics import MetricReport, evaluate_round, frame_scores
from .propagation import MacLedger, RoundMemory, memory_entry, propagate_round, update_memory

_EIGHT = [(-1, -1), (-1, 0), (-1, 1), (0, -1), (0, 1), (1, -1), (1, 0), (1, 1)]
MAX_STROKE_RADIUS = 1.5


def select_worst_frame(
    masks: dict[int, IDMask],
    gt: list[IDMask],
    num_objects: int,
    exclude: set[int] | None = None,
    tol: int | None = None,
) -> int:
    """Frame with the lowest mean J&F; ties go to the smallest index."""
    exclude = exclude or set()
    best_t, best_score = None, None
    for t in range(len(gt)):
        if t in exclude:
            continue
        js, fs = frame_scores(masks[t], gt[t], num_objects, tol)
        score = 0.5 * (js.mean() + fs.mean())
        if best_score is None or score < best_score:
            best_t, best_score = t, score
    if best_t is None:
        raise ValueError("no eligible frame to select")
    return best_t


def _bfs(start, nodes: set) -> tuple[dict, dict]:
    dist = {start: 0}
    parent = {start: None}
    queue = deque([start])
    while queue:
        y, x = queue.popleft()
        for dy, dx in _EIGHT:
            nxt = (y + dy, x + dx)
            if nxt in nodes and nxt not in dist:
                dist[nxt] = dist[(y, x)] + 1
                parent[nxt] = (y, x)
                queue.append(nxt)
    return dist, parent


def _farthest(dist: dict) -> tuple[int, int]:
    # max distance, ties to the smallest (y, x) for determinism
    return min(dist, key=lambda p: (-dist[p], p))


def _ridge_path(region: np.ndarray) -> list[tuple[int, int]]:
    """Longest skeleton path of a connected region, as (y, x) pixels."""
    skel = skeletonize(region)
    pts = list(zip(*np.nonzero(skel)))
    if not pts:
        dt = ndimage.distance_transform_edt(region)
        peak = np.unravel_index(int(np.argmax(dt)), dt.shape)
        return [tuple(int(v) for v in peak)]
    nodes = set(pts)
    # double sweep: farthest from an arbitrary node, then farthest from that
    dist, _ = _bfs(min(pts), nodes)
    a = _farthest(dist)
    dist, parent = _bfs(a, nodes)
    b = _farthest(dist)
    path = [b]
    while parent[path[-1]] is not None:
        path.append(parent[path[-1]])
    return path[::-1]


def _region_stroke(
    region: np.ndarray,
    object_id: int,
    min_len: float,
    radius_region: np.ndarray | None = None,
) -> ScribbleStroke | None:
    """One stroke along the ridge of the largest connected component.

    Radius is the smallest interior clearance along the path minus one, so
    every rasterized pixel stays inside the region.  ``radius_region``
    substitutes a larger containing region for the clearance measurement
    when the region itself is a sliver of something bigger.
    """
    if not region.any():
        return None
    comps, n = ndimage.label(region, structure=np.ones((3, 3), bool))
    sizes = ndimage.sum_labels(region, comps, index=range(1, n + 1))
    comp = comps == (1 + int(np.argmax(sizes)))
    path = _ridge_path(comp)
    dt = ndimage.distance_transform_edt(comp if radius_region is None else radius_region)
    clearance = min(float(dt[p]) for p in path)
    radius = float(np.clip(clearance - 1.0, 0.0, MAX_STROKE_RADIUS))
    sampled = path[::2]
    if sampled[-1] != path[-1]:
        sampled.append(path[-1])
    points = [(float(x), float(y)) for y, x in sampled]
    if len(points) < 2:
        points = points * 2
    del min_len  # the longest path is already the best the region permits
    return ScribbleStroke(object_id=object_id, points=tuple(points), radius=radius)


_BOX = np.ones((3, 3), bool)


def _band_strokes(
    band: np.ndarray,
    object_id: int,
    max_strokes: int = 3,
    min_pixels: int = 4,
    radius_region: np.ndarray | None = None,
) -> list[ScribbleStroke]:
    """Cover a thin band (a contour or ring) with up to a few ridge strokes.

    The longest path through a closed loop only spans half of it, so peel
    paths off until the band is mostly covered.  When ``radius_region`` is
    given the stroke radius uses that region's clearance instead of the
    band's own (a 1 px band would otherwise force radius 0).
    """
    strokes = []
    remaining = band.copy()
    dt = None if radius_region is None else ndimage.distance_transform_edt(radius_region)
    for _ in range(max_strokes):
        if int(remaining.sum()) < min_pixels:
            break
        stroke = _region_stroke(remaining, object_id, 0.0)
        if stroke is None:
            break
        if dt is not None:
            clearance = min(float(dt[int(round(y)), int(round(x))]) for x, y in stroke.points)
            radius = float(np.clip(clearance - 1.0, 0.0, MAX_STROKE_RADIUS))
            stroke = ScribbleStroke(
                object_id=stroke.object_id, points=stroke.points, radius=radius
            )
        strokes.append(stroke)
        covered = np.zeros_like(remaining)
        for x, y in stroke.points:
            covered[int(round(y)), int(round(x))] = True
        covered = ndimage.binary_dilation(covered, _BOX, iterations=2)
        remaining &= ~covered
    return strokes


def _region_strokes(region: np.ndarray, object_id: int) -> list[ScribbleStroke]:
    """Ridge stroke plus inner-contour strokes one pixel inside the border.

    The contour strokes give the readout near-boundary evidence; without
    them every key sits deep inside the region and boundary pixels have
    nothing close to match.
    """
    out = []
    ridge = _region_stroke(region, object_id, 0.0)
    if ridge is not None:
        out.append(ridge)
    inner = ndimage.binary_erosion(region, _BOX, border_value=0)
    band = inner & ~ndimage.binary_erosion(inner, _BOX, border_value=0)
    out.extend(_band_strokes(band, object_id, radius_region=region))
    return out


def generate_robot_scribbles(
    pred: IDMask, gt: IDMask, frame: int, min_len: float = 4.0
) -> list[ScribbleStroke]:
    """Corrective strokes: one ridge stroke through each object's largest
    false-negative component, plus one background stroke in the largest
    false-positive component.  Perfect predictions produce no strokes."""
    del frame, min_len
    if pred.shape != gt.shape:
        raise ValueError(f"extent mismatch: {pred.shape} vs {gt.shape}")
    strokes = []
    present = [int(v) for v in np.unique(gt.labels) if v != 0]
    for obj in present:
        fn = (gt.labels == obj) & (pred.labels != obj)
        # a miss sits flush against the object boundary, so its own
        # clearance is tiny; the true object region sets the pen width
        stroke = _region_stroke(fn, obj, 0.0, radius_region=gt.labels == obj)
        if stroke is not None:
            strokes.append(stroke)
    fp = (pred.labels != 0) & (gt.labels == 0)
    stroke = _region_stroke(fp, 0, 0.0, radius_region=gt.labels == 0)
    if stroke is not None:
        strokes.append(stroke)
    return strokes


def initial_scribbles(gt: IDMask, min_len: float = 4.0) -> list[ScribbleStroke]:
    """Round-1 strokes with no prediction yet.

    Every object gets its ridge and inner contour; the background gets a
    ridge stroke plus a ring two pixels outside each object, so both sides
    of every boundary carry evidence.
    """
    del min_len
    strokes = []
    bg = gt.labels == 0
    present = [int(v) for v in np.unique(gt.labels) if v != 0]
    for obj in present:
        strokes.extend(_region_strokes(gt.labels == obj, obj))
    ridge = _region_stroke(bg, 0, 0.0)
    if ridge is not None:
        strokes.append(ridge)
    for obj in present:
        hit = gt.labels == obj
        ring = (
            ndimage.binary_dilation(hit, _BOX, iterations=2)
            & ~ndimage.binary_dilation(hit, _BOX)
            & bg
        )
        strokes.extend(_band_strokes(ring, 0, radius_region=bg))
    return strokes


def run_robot_session(
    frames: list[Frame],
    gt: list[IDMask],
    num_objects: int,
    frames_per_round: int,
    rounds: int,
    cfg: EngineConfig,
    ledger: MacLedger | None = None,
    tol: int | None = None,
) -> list[MetricReport]:
    """Full evaluation: `rounds` cycles of scribble, interact, propagate.

    Round 1 starts from ground-truth skeleton scribbles on the worst frames
    of an all-background prediction; later rounds correct the previous
    round's output.  Returns one report per round.
    """
    if frames_per_round < 1 or rounds < 1:
        raise ValueError("frames_per_round and rounds must be >= 1")
    if frames_per_round > len(frames):
        raise ValueError(f"frames_per_round={frames_per_round} exceeds video length {len(frames)}")
    shape = (frames[0].height, frames[0].width)
    pred: dict[int, IDMask] = {
        t: IDMask(np.zeros(shape, np.int32), frame=t, round=0) for t in range(len(frames))
    }
    memory: RoundMemory | None = None
    # frames the user touched keep their interaction mask across rounds; a
    # re-decode of those frames could only discard the user's corrections
    kept: dict[int, IDMask] = {}
    reports = []
    for rnd in range(1, rounds + 1):
        t0 = time.perf_counter()
        if rnd == 1:
            # no prediction yet, every frame ties as worst; spread the
            # interactions so propagation distance stays short
            step = len(frames) / frames_per_round
            selected = sorted({int((i + 0.5) * step) for i in range(frames_per_round)})
        else:
            selected = []
            for _ in range(frames_per_round):
                selected.append(
                    select_worst_frame(pred, gt, num_objects, exclude=set(selected), tol=tol)
                )
        scribbles = {}
        for t in selected:
            if rnd == 1:
                strokes = initial_scribbles(gt[t])
            else:
                strokes = generate_robot_scribbles(pred[t], gt[t], t)
            if strokes:
                scribbles[t] = rasterize_strokes(strokes, shape, frame=t, round=rnd)
        if not scribbles:
            # nothing left to correct: score the standing prediction
            wall = (time.perf_counter() - t0) * 1000.0
            reports.append(
                evaluate_round(pred, gt, num_objects, rnd, interacted=(), wall_ms=wall, tol=tol)
            )
            continue
        prev = None if rnd == 1 else {t: pred[t] for t in scribbles}
        ordered = sorted(scribbles)
        pyramids = [
            extract_feature_pyramid(
                frames[t], num_objects, cfg,
                scribble=scribbles[t],
                prev_mask=None if prev is None else prev.get(t),
            )
            for t in ordered
        ]
        embeddings = across_frame_attention(pyramids, cfg)
        interacted_masks = afi_masks(pyramids, embeddings, scribbles, prev, cfg, round=rnd)
        entries = [
            memory_entry(
                frames[t], interacted_masks[t], num_objects, cfg, round=rnd,
            )
            for t in ordered
        ]
        memory = update_memory(memory, entries, rnd, cfg)
        pred = propagate_round(
            frames, memory, interacted_masks, num_objects, cfg, round=rnd, ledger=ledger
        )
        kept.update(interacted_masks)
        for t, mask in kept.items():
            pred[t] = mask
        wall = (time.perf_counter() - t0) * 1000.0
        reports.append(
            evaluate_round(
                pred, gt, num_objects, rnd,
                interacted=tuple(ordered), wall_ms=wall, tol=tol,
            )
        )
    return reports
