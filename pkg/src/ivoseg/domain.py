"""Raster and session data model: frames, ID masks, scribbles, rounds.

Label conventions used everywhere:

* ``IDMask.labels`` — int32, 0 is background, 1..M are objects, every pixel
  carries a label.
* ``ScribbleMap.labels`` — int32, ``UNLABELED`` (-1) marks pixels nobody
  scribbled; 0 is an explicit background-correction label.  A pixel with no
  scribble carries no constraint, which is not the same as background.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

UNLABELED = -1

# Indexed-PNG palette, index == object id (0 = background).  The browser UI
# ships the identical table so overlays and saved masks agree visually.
PALETTE = [
    (0, 0, 0),
    (128, 0, 0),
    (0, 128, 0),
    (128, 128, 0),
    (0, 0, 128),
    (128, 0, 128),
    (0, 128, 128),
    (128, 128, 128),
    (64, 0, 0),
    (192, 0, 0),
    (64, 128, 0),
]


@dataclass(frozen=True)
class Frame:
    """One RGB video frame; values in [0, 1]."""

    index: int
    rgb: np.ndarray  # H x W x 3 float32

    def __post_init__(self):
        rgb = np.asarray(self.rgb, dtype=np.float32)
        if rgb.ndim != 3 or rgb.shape[2] != 3:
            raise ValueError(f"frame rgb must be H x W x 3, got {rgb.shape}")
        if rgb.min() < 0.0 or rgb.max() > 1.0:
            raise ValueError("frame rgb values must lie in [0, 1]")
        object.__setattr__(self, "rgb", rgb)

    @property
    def height(self) -> int:
        return self.rgb.shape[0]

    @property
    def width(self) -> int:
        return self.rgb.shape[1]


@dataclass(frozen=True)
class IDMask:
    """Per-pixel object identities for one frame at one round."""

    labels: np.ndarray  # H x W int32, 0 = background
    frame: int = 0
    round: int = 0

    def __post_init__(self):
        labels = np.asarray(self.labels, dtype=np.int32)
        if labels.ndim != 2:
            raise ValueError(f"mask labels must be H x W, got {labels.shape}")
        if labels.min() < 0:
            raise ValueError("mask labels must be >= 0")
        object.__setattr__(self, "labels", labels)

    @property
    def shape(self) -> tuple[int, int]:
        return self.labels.shape


@dataclass(frozen=True)
class ScribbleStroke:
    """Vector stroke: an ordered polyline labeled with one object id."""

    object_id: int
    points: tuple  # ((x, y), ...) pixel coordinates
    radius: float = 1.5

    def __post_init__(self):
        pts = tuple((float(x), float(y)) for x, y in self.points)
        if len(pts) < 2:
            raise ValueError("a stroke needs at least 2 points")
        if self.object_id < 0:
            raise ValueError("object_id must be >= 0")
        if self.radius < 0:
            raise ValueError("radius must be >= 0")
        object.__setattr__(self, "points", pts)


@dataclass(frozen=True)
class ScribbleMap:
    """Rasterized scribbles for one frame; UNLABELED pixels carry no constraint."""

    labels: np.ndarray  # H x W int32 in {UNLABELED, 0..M}
    frame: int = 0
    round: int = 0

    def __post_init__(self):
        labels = np.asarray(self.labels, dtype=np.int32)
        if labels.ndim != 2:
            raise ValueError(f"scribble labels must be H x W, got {labels.shape}")
        if labels.min() < UNLABELED:
            raise ValueError("scribble labels must be >= UNLABELED")
        object.__setattr__(self, "labels", labels)

    @property
    def shape(self) -> tuple[int, int]:
        return self.labels.shape

    def labeled(self) -> np.ndarray:
        return self.labels != UNLABELED


def empty_scribble_map(shape: tuple[int, int], frame: int = 0, round: int = 0) -> ScribbleMap:
    return ScribbleMap(np.full(shape, UNLABELED, np.int32), frame=frame, round=round)


def rasterize_strokes(
    strokes: list[ScribbleStroke],
    size: tuple[int, int],
    frame: int = 0,
    round: int = 0,
) -> ScribbleMap:
    """Rasterize strokes onto an H x W map; later strokes overwrite earlier ones.

    A pixel is labeled when its center lies within the stroke's radius
    (Euclidean distance to the polyline).
    """
    h, w = size
    labels = np.full((h, w), UNLABELED, np.int32)
    ys, xs = np.mgrid[0:h, 0:w]
    for stroke in strokes:
        for x, y in stroke.points:
            if not (0 <= x <= w - 1 and 0 <= y <= h - 1):
                raise ValueError(f"stroke point ({x}, {y}) outside {w}x{h} frame")
        covered = np.zeros((h, w), bool)
        pts = stroke.points
        for (x0, y0), (x1, y1) in zip(pts[:-1], pts[1:]):
            # restrict the distance test to the segment's padded bounding box
            pad = stroke.radius + 1.0
            c0 = max(0, int(np.floor(min(x0, x1) - pad)))
            c1 = min(w - 1, int(np.ceil(max(x0, x1) + pad)))
            r0 = max(0, int(np.floor(min(y0, y1) - pad)))
            r1 = min(h - 1, int(np.ceil(max(y0, y1) + pad)))
            if c0 > c1 or r0 > r1:
                continue
            px = xs[r0 : r1 + 1, c0 : c1 + 1].astype(np.float64)
            py = ys[r0 : r1 + 1, c0 : c1 + 1].astype(np.float64)
            dx, dy = x1 - x0, y1 - y0
            seg_len2 = dx * dx + dy * dy
            if seg_len2 == 0.0:
                t = np.zeros_like(px)
            else:
                t = np.clip(((px - x0) * dx + (py - y0) * dy) / seg_len2, 0.0, 1.0)
            dist2 = (px - (x0 + t * dx)) ** 2 + (py - (y0 + t * dy)) ** 2
            covered[r0 : r1 + 1, c0 : c1 + 1] |= dist2 <= stroke.radius**2 + 1e-12
        labels[covered] = stroke.object_id
    return ScribbleMap(labels, frame=frame, round=round)


def relabel(mask: IDMask, perm: dict[int, int]) -> IDMask:
    """Apply an object-id permutation; background (0) is fixed.

    ``perm`` maps a subset of object ids onto itself; ids absent from the
    mapping stay put.
    """
    keys = set(perm)
    vals = set(perm.values())
    if keys != vals or len(perm) != len(vals):
        raise ValueError(f"not a permutation: {perm}")
    if any(k < 1 for k in keys):
        raise ValueError("permutation may only move object ids >= 1")
    out = mask.labels.copy()
    for src, dst in perm.items():
        out[mask.labels == src] = dst
    return IDMask(out, frame=mask.frame, round=mask.round)


def apply_perm_to_labels(labels: np.ndarray, perm: dict[int, int]) -> np.ndarray:
    """Permutation applied to a raw label array (UNLABELED and 0 are fixed)."""
    out = labels.copy()
    for src, dst in perm.items():
        out[labels == src] = dst
    return out


@dataclass
class RoundRecord:
    """Everything one interaction-propagation round produced."""

    round: int
    interacted: tuple[int, ...]
    scribbles: dict[int, ScribbleMap] = field(default_factory=dict)
    strokes: dict[int, list[ScribbleStroke]] = field(default_factory=dict)
    masks: dict[int, IDMask] = field(default_factory=dict)
    wall_ms: dict[str, float] = field(default_factory=dict)

    def __post_init__(self):
        if not self.interacted:
            raise ValueError("a round needs a non-empty interacted frame set")
        self.interacted = tuple(sorted(set(int(t) for t in self.interacted)))


@dataclass
class SessionState:
    """A video plus the full per-round interaction history."""

    video: list[Frame]
    num_objects: int
    rounds: list[RoundRecord] = field(default_factory=list)
    current_round: int = 1

    def __post_init__(self):
        if not self.video:
            raise ValueError("session needs at least one frame")
        h, w = self.video[0].height, self.video[0].width
        for f in self.video:
            if (f.height, f.width) != (h, w):
                raise ValueError("all frames of a video must share the same size")

    @property
    def num_frames(self) -> int:
        return len(self.video)

    @property
    def shape(self) -> tuple[int, int]:
        return self.video[0].height, self.video[0].width

    def add_round(self, record: RoundRecord) -> None:
        if self.rounds and record.round <= self.rounds[-1].round:
            raise ValueError("round indices must strictly increase")
        for t in record.interacted:
            if not 0 <= t < self.num_frames:
                raise ValueError(f"interacted frame {t} out of range")
        self.rounds.append(record)

    def latest_masks(self) -> dict[int, IDMask] | None:
        """Per-frame masks of the most recent completed round, if any."""
        for record in reversed(self.rounds):
            if len(record.masks) == self.num_frames:
                return record.masks
        return None
