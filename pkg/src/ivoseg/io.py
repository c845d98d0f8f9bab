"""Disk formats: RGB frame PNGs, indexed-palette mask PNGs, scribble JSON.

A video on disk is a directory of zero-padded frame files::

    scene/
      frames/00000.png 00001.png ...          RGB
      masks/00000.png ...                     optional ground truth (indexed)

Scribbles travel as JSON: ``{"frame": int, "strokes": [{"object_id": int,
"radius": float, "points": [[x, y], ...]}, ...]}``.
"""

from __future__ import annotations

import json
import os

import numpy as np
from PIL import Image

from .domain import PALETTE, Frame, IDMask, ScribbleStroke
from .errors import FormatError


def quantize_frame(frame: Frame) -> Frame:
    """Snap RGB to the 8-bit lattice a PNG round-trip would produce.

    Sessions quantize at creation so that saving frames to disk and loading
    them back reproduces bit-identical descriptors and masks.
    """
    arr = np.clip(np.round(frame.rgb * 255.0), 0, 255).astype(np.uint8)
    return Frame(index=frame.index, rgb=arr.astype(np.float32) / 255.0)


def save_frame_png(frame: Frame, path) -> None:
    """Write RGB to a path or binary file object."""
    arr = np.clip(np.round(frame.rgb * 255.0), 0, 255).astype(np.uint8)
    Image.fromarray(arr, mode="RGB").save(path, format="PNG")


def load_frame_png(path: str, index: int = 0) -> Frame:
    with Image.open(path) as img:
        arr = np.asarray(img.convert("RGB"), dtype=np.float32) / 255.0
    return Frame(index=index, rgb=arr)


def _flat_palette() -> list[int]:
    flat = [c for rgb in PALETTE for c in rgb]
    flat += [0] * (768 - len(flat))
    return flat


def save_mask_png(mask: IDMask, path) -> None:
    labels = mask.labels
    if labels.max() >= len(PALETTE):
        raise FormatError(f"mask label {labels.max()} exceeds the {len(PALETTE) - 1}-entry palette")
    img = Image.fromarray(labels.astype(np.uint8), mode="P")
    img.putpalette(_flat_palette())
    img.save(path, format="PNG")


def load_mask_png(path: str, frame: int = 0, round: int = 0) -> IDMask:
    with Image.open(path) as img:
        if img.mode != "P":
            raise FormatError(f"{path}: expected an indexed-palette mask PNG, got mode {img.mode}")
        labels = np.asarray(img, dtype=np.int32)
    return IDMask(labels, frame=frame, round=round)


def frame_filename(index: int) -> str:
    return f"{index:05d}.png"


def save_video(frames: list[Frame], root: str, masks: list[IDMask] | None = None) -> None:
    frames_dir = os.path.join(root, "frames")
    os.makedirs(frames_dir, exist_ok=True)
    for f in frames:
        save_frame_png(f, os.path.join(frames_dir, frame_filename(f.index)))
    if masks is not None:
        mask_dir = os.path.join(root, "masks")
        os.makedirs(mask_dir, exist_ok=True)
        for m in masks:
            save_mask_png(m, os.path.join(mask_dir, frame_filename(m.frame)))


def load_video(root: str) -> list[Frame]:
    frames_dir = os.path.join(root, "frames")
    if not os.path.isdir(frames_dir):
        raise FormatError(f"{root}: no frames/ directory")
    names = sorted(n for n in os.listdir(frames_dir) if n.endswith(".png"))
    if not names:
        raise FormatError(f"{frames_dir}: no .png frames")
    return [load_frame_png(os.path.join(frames_dir, n), index=i) for i, n in enumerate(names)]


def load_gt_masks(root: str) -> list[IDMask]:
    mask_dir = os.path.join(root, "masks")
    if not os.path.isdir(mask_dir):
        raise FormatError(f"{root}: no masks/ directory")
    names = sorted(n for n in os.listdir(mask_dir) if n.endswith(".png"))
    return [load_mask_png(os.path.join(mask_dir, n), frame=i) for i, n in enumerate(names)]


def strokes_to_json(frame: int, strokes: list[ScribbleStroke]) -> dict:
    return {
        "frame": int(frame),
        "strokes": [
            {
                "object_id": int(s.object_id),
                "radius": float(s.radius),
                "points": [[float(x), float(y)] for x, y in s.points],
            }
            for s in strokes
        ],
    }


def strokes_from_json(payload: dict) -> tuple[int, list[ScribbleStroke]]:
    """Parse and validate the scribble wire format."""
    if not isinstance(payload, dict):
        raise FormatError("scribble payload must be a JSON object")
    try:
        frame = int(payload["frame"])
        raw = payload["strokes"]
    except (KeyError, TypeError, ValueError) as exc:
        raise FormatError(f"scribble payload missing field: {exc}") from exc
    if not isinstance(raw, list):
        raise FormatError("strokes must be a list")
    strokes = []
    for i, item in enumerate(raw):
        try:
            stroke = ScribbleStroke(
                object_id=int(item["object_id"]),
                points=tuple((float(p[0]), float(p[1])) for p in item["points"]),
                radius=float(item.get("radius", 1.5)),
            )
        except (KeyError, TypeError, ValueError, IndexError) as exc:
            raise FormatError(f"stroke {i} malformed: {exc}") from exc
        strokes.append(stroke)
    return frame, strokes


def save_strokes_json(frame: int, strokes: list[ScribbleStroke], path: str) -> None:
    with open(path, "w") as fh:
        json.dump(strokes_to_json(frame, strokes), fh, indent=2)
        fh.write("\n")


def load_strokes_json(path: str) -> tuple[int, list[ScribbleStroke]]:
    with open(path) as fh:
        try:
            payload = json.load(fh)
        except json.JSONDecodeError as exc:
            raise FormatError(f"{path}: invalid JSON: {exc}") from exc
    return strokes_from_json(payload)
