"""Region and boundary segmentation quality, and the per-round report.

J is plain intersection-over-union.  Boundary F compares 1-px mask
boundaries under a pixel tolerance using distance transforms, the standard
benchmark approximation rather than exact bipartite matching.  Scores
combine as J&F, reported under a 60-second-per-video interaction budget.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy import ndimage

from .domain import IDMask

BUDGET_MS = 60_000.0


def _check_extents(pred: np.ndarray, gt: np.ndarray) -> None:
    if pred.shape != gt.shape:
        raise ValueError(f"extent mismatch: {pred.shape} vs {gt.shape}")


def jaccard(pred: np.ndarray, gt: np.ndarray) -> float:
    """Intersection over union of two binary masks; both-empty counts as 1."""
    pred = np.asarray(pred, bool)
    gt = np.asarray(gt, bool)
    _check_extents(pred, gt)
    union = np.logical_or(pred, gt).sum()
    if union == 0:
        return 1.0
    return float(np.logical_and(pred, gt).sum() / union)


def default_tolerance(shape: tuple[int, int]) -> int:
    """0.8% of the image diagonal, rounded up."""
    h, w = shape
    return int(np.ceil(0.008 * np.hypot(h, w)))


def boundary(mask: np.ndarray) -> np.ndarray:
    """Mask minus its 1-px erosion; pixels touching the border stay boundary."""
    mask = np.asarray(mask, bool)
    eroded = ndimage.binary_erosion(mask, border_value=0)
    return mask & ~eroded


def boundary_f(pred: np.ndarray, gt: np.ndarray, tol: int | None = None) -> float:
    """Harmonic mean of boundary precision and recall at pixel tolerance tol."""
    pred = np.asarray(pred, bool)
    gt = np.asarray(gt, bool)
    _check_extents(pred, gt)
    if tol is None:
        tol = default_tolerance(pred.shape)
    if tol < 0:
        raise ValueError("tolerance must be >= 0")
    if not pred.any() and not gt.any():
        return 1.0
    pb = boundary(pred)
    gb = boundary(gt)
    if not pb.any() or not gb.any():
        return 0.0
    near_gb = ndimage.distance_transform_edt(~gb) <= tol
    near_pb = ndimage.distance_transform_edt(~pb) <= tol
    precision = float((pb & near_gb).sum() / pb.sum())
    recall = float((gb & near_pb).sum() / gb.sum())
    if precision + recall == 0.0:
        return 0.0
    return 2.0 * precision * recall / (precision + recall)


def frame_scores(pred: IDMask, gt: IDMask, num_objects: int, tol: int | None = None):
    """Per-object (J, F) arrays for one frame, objects 1..M."""
    _check_extents(pred.labels, gt.labels)
    js = np.zeros(num_objects)
    fs = np.zeros(num_objects)
    for obj in range(1, num_objects + 1):
        p = pred.labels == obj
        g = gt.labels == obj
        js[obj - 1] = jaccard(p, g)
        fs[obj - 1] = boundary_f(p, g, tol)
    return js, fs


@dataclass
class MetricReport:
    """Scores of one round over a whole video.

    ``j``/``f`` are F x M arrays over (frame, object).  Means exclude the
    round's interacted frames: those masks came from the user's scribbles,
    not from propagation.
    """

    round: int
    j: np.ndarray
    f: np.ndarray
    interacted: tuple[int, ...] = ()
    wall_ms: float = 0.0
    extra: dict = field(default_factory=dict)

    @property
    def over_budget(self) -> bool:
        return self.wall_ms > BUDGET_MS

    def _eligible(self) -> np.ndarray:
        keep = np.ones(self.j.shape[0], bool)
        for t in self.interacted:
            keep[t] = False
        return keep

    @property
    def mean_j(self) -> float:
        return float(self.j[self._eligible()].mean())

    @property
    def mean_f(self) -> float:
        return float(self.f[self._eligible()].mean())

    @property
    def mean_jf(self) -> float:
        return 0.5 * (self.mean_j + self.mean_f)

    def rows(self) -> list[dict]:
        out = []
        eligible = self._eligible()
        for t in range(self.j.shape[0]):
            for m in range(self.j.shape[1]):
                out.append(
                    {
                        "round": self.round,
                        "frame": t,
                        "object": m + 1,
                        "j": float(self.j[t, m]),
                        "f": float(self.f[t, m]),
                        "interacted": not bool(eligible[t]),
                    }
                )
        return out


def evaluate_round(
    masks: dict[int, IDMask],
    gt: list[IDMask],
    num_objects: int,
    round: int,
    interacted: tuple[int, ...] = (),
    wall_ms: float = 0.0,
    tol: int | None = None,
) -> MetricReport:
    if len(masks) != len(gt):
        raise ValueError(f"got masks for {len(masks)} frames, gt has {len(gt)}")
    j = np.zeros((len(gt), num_objects))
    f = np.zeros((len(gt), num_objects))
    for t, gt_mask in enumerate(gt):
        js, fs = frame_scores(masks[t], gt_mask, num_objects, tol)
        j[t] = js
        f[t] = fs
    return MetricReport(round=round, j=j, f=f, interacted=tuple(interacted), wall_ms=wall_ms)
