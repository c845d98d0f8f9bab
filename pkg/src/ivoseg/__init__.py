"""Desk-scale interactive video object segmentation.

Scribble on a few frames, propagate masks for every object across the whole
video in one concurrent pass per frame, refine over rounds.  Ships with
DAVIS-style metrics, an automated evaluation robot, an object-count scaling
benchmark, synthetic data, and an HTTP/WebSocket session service.
"""

from .config import EngineConfig, load_config
from .domain import (
    PALETTE,
    UNLABELED,
    Frame,
    IDMask,
    RoundRecord,
    ScribbleMap,
    ScribbleStroke,
    SessionState,
    rasterize_strokes,
    relabel,
)
from .errors import (
    CapacityError,
    ConflictError,
    EmptyEvidenceError,
    EmptyMemoryError,
    FormatError,
    PreconditionError,
)
from .metrics import BUDGET_MS, MetricReport, boundary_f, default_tolerance, jaccard
from .propagation import (
    MacLedger,
    MemoryEntry,
    PropagationPlan,
    RoundMemory,
    decode_frame,
    decode_frame_per_object,
    memory_entry,
    plan_truncated_propagation,
    propagate_round,
    update_memory,
)
from .robot import generate_robot_scribbles, run_robot_session, select_worst_frame
from .synth import (
    AffineParams,
    ObjectSpec,
    SceneConfig,
    augment_static_to_clip,
    bench_config,
    generate_scene,
    suite_configs,
)

__version__ = "0.1.0"

__all__ = [
    "BUDGET_MS",
    "PALETTE",
    "UNLABELED",
    "AffineParams",
    "CapacityError",
    "ConflictError",
    "EmptyEvidenceError",
    "EmptyMemoryError",
    "EngineConfig",
    "FormatError",
    "Frame",
    "IDMask",
    "MacLedger",
    "MemoryEntry",
    "MetricReport",
    "ObjectSpec",
    "PreconditionError",
    "PropagationPlan",
    "RoundMemory",
    "RoundRecord",
    "SceneConfig",
    "ScribbleMap",
    "ScribbleStroke",
    "SessionState",
    "augment_static_to_clip",
    "bench_config",
    "boundary_f",
    "decode_frame",
    "decode_frame_per_object",
    "default_tolerance",
    "generate_robot_scribbles",
    "generate_scene",
    "jaccard",
    "load_config",
    "memory_entry",
    "plan_truncated_propagation",
    "propagate_round",
    "rasterize_strokes",
    "relabel",
    "run_robot_session",
    "select_worst_frame",
    "suite_configs",
    "update_memory",
]
