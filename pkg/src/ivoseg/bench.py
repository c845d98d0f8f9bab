"""Object-count scaling benchmark: concurrent vs per-object decoding.

Both decoder paths read identical memories built from the shipped 10-object
scene; object counts above ten reuse the ten scene objects under relabeled
ids.  Wall times are medians over trials after one discarded warm-up, MAC
counts come from the propagation ledger.  N runs to 11 to cross the decoder
batch capacity, where the concurrent path pays for a second pass.
"""

from __future__ import annotations

import csv
import json
import time
from dataclasses import dataclass

import numpy as np

from .config import EngineConfig
from .domain import IDMask
from .propagation import (
    MacLedger,
    RoundMemory,
    decode_frame,
    decode_frame_per_object,
    memory_entry,
    update_memory,
)
from .synth import bench_config, generate_scene

MEMORY_FRAMES = (0, 3, 6)
QUERY_FRAME = 7


@dataclass
class BenchRow:
    n: int
    path: str  # "concurrent" | "per-object"
    wall_ms: float  # median over trials
    macs: int


@dataclass
class BenchReport:
    rows: list[BenchRow]
    trials: int

    def row(self, n: int, path: str) -> BenchRow:
        for r in self.rows:
            if r.n == n and r.path == path:
                return r
        raise KeyError(f"no bench row for n={n} path={path}")

    def to_csv(self, path: str) -> None:
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["n", "path", "wall_ms_median", "macs"])
            for r in self.rows:
                w.writerow([r.n, r.path, f"{r.wall_ms:.3f}", r.macs])

    def plot_data(self) -> dict:
        ns = sorted({r.n for r in self.rows})
        return {
            "n": ns,
            "concurrent_wall_ms": [self.row(n, "concurrent").wall_ms for n in ns],
            "per_object_wall_ms": [self.row(n, "per-object").wall_ms for n in ns],
            "concurrent_macs": [self.row(n, "concurrent").macs for n in ns],
            "per_object_macs": [self.row(n, "per-object").macs for n in ns],
        }

    def to_json(self, path: str) -> None:
        with open(path, "w") as fh:
            json.dump({"trials": self.trials, "series": self.plot_data()}, fh, indent=2)
            fh.write("\n")


def _relabel_mod(mask: IDMask, n: int) -> IDMask:
    """Fold the scene's object ids onto 1..min(n, 10) so every N reuses the
    same pixels; ids beyond the scene's 10 objects stay unused (their
    channels still ride through the decoder)."""
    labels = mask.labels.copy()
    fg = labels > 0
    labels[fg] = ((labels[fg] - 1) % min(n, 10)) + 1
    return IDMask(labels, frame=mask.frame, round=mask.round)


def _memory_for(n: int, frames, gt, cfg: EngineConfig) -> RoundMemory:
    entries = [
        memory_entry(
            frames[t], _relabel_mod(gt[t], n), n, cfg, round=1,
        )
        for t in MEMORY_FRAMES
    ]
    return update_memory(None, entries, 1, cfg)


def benchmark_object_scaling(
    n_values=range(1, 12),
    trials: int = 5,
    cfg: EngineConfig | None = None,
    seed: int = 7,
) -> BenchReport:
    if trials < 3:
        raise ValueError("need at least 3 trials for a median")
    cfg = cfg or EngineConfig()
    frames, gt = generate_scene(bench_config(seed))
    query = frames[QUERY_FRAME]
    rows = []
    for n in n_values:
        memory = _memory_for(n, frames, gt, cfg)
        for path, fn in (
            ("concurrent", decode_frame),
            ("per-object", decode_frame_per_object),
        ):
            walls = []
            macs = 0
            for trial in range(trials + 1):
                ledger = MacLedger()
                t0 = time.perf_counter()
                fn(memory, query, n, cfg, ledger=ledger)
                wall = (time.perf_counter() - t0) * 1000.0
                if trial == 0:
                    continue  # warm-up
                walls.append(wall)
                macs = ledger.total_macs()
            rows.append(BenchRow(n=n, path=path, wall_ms=float(np.median(walls)), macs=macs))
    return BenchReport(rows=rows, trials=trials)
