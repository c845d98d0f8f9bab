"""Interactive session orchestration and the HTTP/WebSocket API.

A session walks a strict lifecycle per round: scribbles are submitted and
may be re-submitted (last writer wins), `commit` turns them into masks for
the interacted frames and stages a memory update, `propagate` completes the
round for every frame and only then publishes the round record and the new
memory (all-or-nothing).  Mutations within a session are serialized by a
per-session lock; sessions are otherwise independent.

Frames are quantized to the 8-bit PNG lattice at creation, which makes the
save/load round trip reproduce masks bit-exactly.
"""

from __future__ import annotations

import asyncio
import base64
import dataclasses
import io as std_io
import json
import os
import threading
import time
import uuid
from dataclasses import dataclass, field

import numpy as np
from fastapi import FastAPI, Query, Request, WebSocket, WebSocketDisconnect
from fastapi.responses import JSONResponse, Response
from starlette.concurrency import run_in_threadpool

from .afi import across_frame_attention, afi_masks, extract_feature_pyramid
from .config import EngineConfig
from .domain import (
    Frame,
    IDMask,
    RoundRecord,
    ScribbleMap,
    ScribbleStroke,
    SessionState,
    rasterize_strokes,
)
from .errors import (
    CapacityError,
    ConflictError,
    EmptyEvidenceError,
    EmptyMemoryError,
    FormatError,
    PreconditionError,
)
from .io import (
    frame_filename,
    load_frame_png,
    load_mask_png,
    load_strokes_json,
    quantize_frame,
    save_frame_png,
    save_mask_png,
    save_strokes_json,
    strokes_from_json,
)
from .metrics import evaluate_round
from .propagation import RoundMemory, memory_entry, propagate_round, update_memory
from .synth import SceneConfig, ObjectSpec, bench_config, generate_scene, suite_configs

SCHEMA_VERSION = 1


@dataclass
class SessionHandle:
    """One interactive session plus its staging area between commit and
    propagate."""

    id: str
    state: SessionState
    cfg: EngineConfig
    memory: RoundMemory | None = None
    gt: list[IDMask] | None = None
    lifecycle: str = "created"  # created|interacting|committed|propagating|idle
    staged_strokes: dict[int, list[ScribbleStroke]] = field(default_factory=dict)
    staged_scribbles: dict[int, ScribbleMap] = field(default_factory=dict)
    staged_masks: dict[int, IDMask] = field(default_factory=dict)
    staged_memory: RoundMemory | None = None
    stage_wall_ms: dict[str, float] = field(default_factory=dict)
    lock: threading.Lock = field(default_factory=threading.Lock)
    subscribers: list = field(default_factory=list)

    def completed_rounds(self) -> list[int]:
        return [r.round for r in self.state.rounds]


def _scene_by_name(name: str, seed: int) -> SceneConfig:
    for cfg in suite_configs(seed):
        if cfg.name == name:
            return cfg
    if name == bench_config(seed).name:
        return bench_config(seed)
    raise ValueError(f"unknown scene {name!r}")


def _scene_from_dict(raw: dict) -> SceneConfig:
    try:
        objects = tuple(
            ObjectSpec(
                shape=o["shape"],
                color=tuple(o["color"]),
                z=int(o["z"]),
                size=float(o["size"]),
                center=tuple(o["center"]),
                velocity=tuple(o.get("velocity", (0.0, 0.0))),
                wobble_amp=float(o.get("wobble_amp", 0.0)),
                wobble_period=float(o.get("wobble_period", 12.0)),
            )
            for o in raw["objects"]
        )
        return SceneConfig(
            name=raw.get("name", "custom"),
            num_frames=int(raw["num_frames"]),
            height=int(raw["height"]),
            width=int(raw["width"]),
            objects=objects,
            background=raw.get("background", "flat"),
            bg_seed=int(raw.get("bg_seed", 1)),
            seed=int(raw.get("seed", 7)),
        )
    except (KeyError, TypeError) as exc:
        raise FormatError(f"malformed scene config: {exc}") from exc


def _decode_png_frames(items: list[str]) -> list[Frame]:
    from PIL import Image

    frames = []
    for i, b64 in enumerate(items):
        try:
            raw = base64.b64decode(b64)
            with Image.open(std_io.BytesIO(raw)) as img:
                arr = np.asarray(img.convert("RGB"), np.float32) / 255.0
        except Exception as exc:
            raise FormatError(f"frame {i}: not a decodable PNG: {exc}") from exc
        frames.append(Frame(index=i, rgb=arr))
    return frames


def _decode_png_masks(items: list[str]) -> list[IDMask]:
    from PIL import Image

    masks = []
    for i, b64 in enumerate(items):
        try:
            raw = base64.b64decode(b64)
            with Image.open(std_io.BytesIO(raw)) as img:
                if img.mode != "P":
                    raise FormatError(f"gt {i}: expected indexed-palette PNG")
                labels = np.asarray(img, np.int32)
        except FormatError:
            raise
        except Exception as exc:
            raise FormatError(f"gt {i}: not a decodable PNG: {exc}") from exc
        masks.append(IDMask(labels, frame=i))
    return masks


class SessionService:
    """In-memory registry of sessions and the engine calls behind the API."""

    def __init__(self, cfg: EngineConfig | None = None):
        self.cfg = cfg or EngineConfig()
        self.sessions: dict[str, SessionHandle] = {}
        self._registry_lock = threading.Lock()

    # -- creation / lookup ------------------------------------------------

    def create_session(self, body: dict) -> SessionHandle:
        if not isinstance(body, dict):
            raise FormatError("body must be a JSON object")
        try:
            num_objects = int(body["num_objects"])
        except (KeyError, TypeError, ValueError) as exc:
            raise FormatError(f"num_objects missing or malformed: {exc}") from exc
        if num_objects < 1:
            raise ValueError("num_objects must be >= 1")
        if num_objects > self.cfg.capacity:
            raise CapacityError(
                f"num_objects={num_objects} exceeds decoder capacity {self.cfg.capacity}"
            )
        source = body.get("source")
        if not isinstance(source, dict) or "type" not in source:
            raise FormatError("source must be an object with a 'type'")
        gt = None
        if source["type"] == "generated":
            if "config" in source:
                scene = _scene_from_dict(source["config"])
            else:
                scene = _scene_by_name(source.get("name", "orbit"), int(source.get("seed", 7)))
            frames, scene_gt = generate_scene(scene)
            if body.get("attach_gt", True):
                gt = scene_gt
        elif source["type"] == "png":
            frames = _decode_png_frames(source.get("frames", []))
            if "gt" in source:
                gt = _decode_png_masks(source["gt"])
        else:
            raise FormatError(f"unknown source type {source['type']!r}")
        if not frames:
            raise FormatError("video source produced no frames")
        frames = [quantize_frame(f) for f in frames]
        state = SessionState(video=frames, num_objects=num_objects)
        if gt is not None and len(gt) != len(frames):
            raise FormatError(f"gt has {len(gt)} masks for {len(frames)} frames")
        handle = SessionHandle(id=uuid.uuid4().hex[:12], state=state, cfg=self.cfg, gt=gt)
        with self._registry_lock:
            self.sessions[handle.id] = handle
        return handle

    def get(self, session_id: str) -> SessionHandle:
        with self._registry_lock:
            handle = self.sessions.get(session_id)
        if handle is None:
            raise KeyError(session_id)
        return handle

    # -- per-round steps --------------------------------------------------

    def submit_scribbles(self, handle: SessionHandle, body: dict) -> list[int]:
        with handle.lock:
            if handle.lifecycle == "propagating":
                raise ConflictError("propagation in progress")
            if handle.lifecycle == "committed":
                raise ConflictError("round already committed; propagate before re-submitting")
            rnd = body.get("round")
            if rnd is not None and int(rnd) != handle.state.current_round:
                raise ConflictError(
                    f"stale round {rnd}; current round is {handle.state.current_round}"
                )
            payloads = body.get("scribbles")
            if not isinstance(payloads, list) or not payloads:
                raise ValueError("submission needs at least one frame of strokes")
            h, w = handle.state.shape
            staged_strokes: dict[int, list[ScribbleStroke]] = {}
            staged_maps: dict[int, ScribbleMap] = {}
            for payload in payloads:
                frame, strokes = strokes_from_json(payload)
                if not 0 <= frame < handle.state.num_frames:
                    raise ValueError(f"frame {frame} out of range")
                if not strokes:
                    continue
                for s in strokes:
                    if s.object_id > handle.state.num_objects:
                        raise ValueError(
                            f"object id {s.object_id} exceeds num_objects="
                            f"{handle.state.num_objects}"
                        )
                staged_strokes[frame] = strokes
                staged_maps[frame] = rasterize_strokes(
                    strokes, (h, w), frame=frame, round=handle.state.current_round
                )
            if not staged_strokes:
                raise ValueError("submission needs at least one non-empty stroke list")
            # whole-round replacement: a second submission discards the first
            handle.staged_strokes = staged_strokes
            handle.staged_scribbles = staged_maps
            handle.lifecycle = "interacting"
            return sorted(staged_strokes)

    def commit_round(self, handle: SessionHandle) -> dict[int, IDMask]:
        with handle.lock:
            if handle.lifecycle == "committed":
                raise ConflictError("round already committed")
            if handle.lifecycle != "interacting" or not handle.staged_scribbles:
                raise PreconditionError("no scribbles submitted for this round")
            rnd = handle.state.current_round
            t0 = time.perf_counter()
            prev = handle.state.latest_masks()
            scribbles = handle.staged_scribbles
            ordered = sorted(scribbles)
            prev_for = None if prev is None else {t: prev[t] for t in ordered}
            nframes = len(handle.state.video)
            pyramids = [
                extract_feature_pyramid(
                    handle.state.video[t], handle.state.num_objects, handle.cfg,
                    scribble=scribbles[t],
                    prev_mask=None if prev_for is None else prev_for.get(t),
                )
                for t in ordered
            ]
            embeddings = across_frame_attention(pyramids, handle.cfg)
            masks = afi_masks(pyramids, embeddings, scribbles, prev_for, handle.cfg, round=rnd)
            entries = [
                memory_entry(
                    handle.state.video[t], masks[t], handle.state.num_objects, handle.cfg, rnd,
                )
                for t in ordered
            ]
            handle.staged_memory = update_memory(handle.memory, entries, rnd, handle.cfg)
            handle.staged_masks = masks
            handle.stage_wall_ms = {"interaction": (time.perf_counter() - t0) * 1000.0}
            handle.lifecycle = "committed"
            for t in ordered:
                self._broadcast(handle, {"stage": "afi", "frame": t, "round": rnd,
                                         "wall_ms": handle.stage_wall_ms["interaction"]})
            return masks

    def propagate(self, handle: SessionHandle) -> RoundRecord:
        with handle.lock:
            if handle.lifecycle == "propagating":
                raise ConflictError("propagation already in progress")
            if handle.lifecycle != "committed":
                raise PreconditionError("commit the round before propagating")
            handle.lifecycle = "propagating"
            rnd = handle.state.current_round
            memory = handle.staged_memory
            masks = dict(handle.staged_masks)
        try:
            t0 = time.perf_counter()
            stage_walls = dict(handle.stage_wall_ms)
            phase_started = {"truncated": None, "repropagated": None}

            def progress(stage: str, frame: int) -> None:
                if phase_started[stage] is None:
                    phase_started[stage] = time.perf_counter()
                self._broadcast(
                    handle,
                    {
                        "stage": stage,
                        "frame": frame,
                        "round": rnd,
                        "wall_ms": (time.perf_counter() - t0) * 1000.0,
                    },
                )

            all_masks = propagate_round(
                handle.state.video, memory, masks, handle.state.num_objects, handle.cfg,
                round=rnd, progress=progress,
            )
            # frames interacted in earlier rounds keep their interaction
            # masks; re-decoding them would drop the user's corrections
            kept: dict[int, IDMask] = {}
            for earlier in handle.state.rounds:
                for t in earlier.interacted:
                    kept[t] = earlier.masks[t]
            kept.update(masks)
            for t, mask in kept.items():
                all_masks[t] = mask
            wall = (time.perf_counter() - t0) * 1000.0
            stage_walls["propagation"] = wall
            stage_walls["re-propagation"] = (
                (time.perf_counter() - phase_started["repropagated"]) * 1000.0
                if phase_started["repropagated"] is not None
                else 0.0
            )
            record = RoundRecord(
                round=rnd,
                interacted=tuple(sorted(masks)),
                scribbles=dict(handle.staged_scribbles),
                strokes=dict(handle.staged_strokes),
                masks=all_masks,
                wall_ms=stage_walls,
            )
            with handle.lock:
                handle.state.add_round(record)
                handle.memory = memory
                handle.state.current_round = rnd + 1
                handle.staged_strokes = {}
                handle.staged_scribbles = {}
                handle.staged_masks = {}
                handle.staged_memory = None
                handle.stage_wall_ms = {}
                handle.lifecycle = "idle"
            self._broadcast(handle, {"stage": "done", "frame": None, "round": rnd,
                                     "wall_ms": wall})
            return record
        except Exception:
            with handle.lock:
                handle.lifecycle = "committed"
            raise

    # -- events -----------------------------------------------------------

    def _broadcast(self, handle: SessionHandle, event: dict) -> None:
        for queue, loop in list(handle.subscribers):
            loop.call_soon_threadsafe(queue.put_nowait, event)

    def subscribe(self, handle: SessionHandle):
        queue: asyncio.Queue = asyncio.Queue()
        pair = (queue, asyncio.get_running_loop())
        handle.subscribers.append(pair)
        return pair

    def unsubscribe(self, handle: SessionHandle, pair) -> None:
        if pair in handle.subscribers:
            handle.subscribers.remove(pair)

    # -- metrics ----------------------------------------------------------

    def metrics(self, handle: SessionHandle) -> dict:
        if handle.gt is None:
            raise PreconditionError("session has no ground truth attached")
        rounds = []
        for record in handle.state.rounds:
            report = evaluate_round(
                record.masks, handle.gt, handle.state.num_objects,
                record.round, interacted=record.interacted,
                wall_ms=sum(record.wall_ms.values()),
            )
            rounds.append(
                {
                    "round": record.round,
                    "mean_j": report.mean_j,
                    "mean_f": report.mean_f,
                    "mean_jf": report.mean_jf,
                    "wall_ms": report.wall_ms,
                    "over_budget": report.over_budget,
                }
            )
        return {"rounds": rounds}


# ---------------------------------------------------------------------------
# persistence


def save_session(handle: SessionHandle, root: str) -> str:
    """Write an idle session to a directory; returns the manifest path."""
    if handle.lifecycle not in ("idle", "created"):
        raise PreconditionError(f"session must be idle to save, is {handle.lifecycle}")
    os.makedirs(root, exist_ok=True)
    frames_dir = os.path.join(root, "frames")
    os.makedirs(frames_dir, exist_ok=True)
    for f in handle.state.video:
        save_frame_png(f, os.path.join(frames_dir, frame_filename(f.index)))
    if handle.gt is not None:
        gt_dir = os.path.join(root, "gt")
        os.makedirs(gt_dir, exist_ok=True)
        for m in handle.gt:
            save_mask_png(m, os.path.join(gt_dir, frame_filename(m.frame)))
    for record in handle.state.rounds:
        rdir = os.path.join(root, "rounds", f"round_{record.round:04d}")
        os.makedirs(os.path.join(rdir, "scribbles"), exist_ok=True)
        os.makedirs(os.path.join(rdir, "masks"), exist_ok=True)
        for t, strokes in record.strokes.items():
            save_strokes_json(
                t, strokes, os.path.join(rdir, "scribbles", f"{t:05d}.json")
            )
        for t, mask in record.masks.items():
            save_mask_png(mask, os.path.join(rdir, "masks", frame_filename(t)))
    manifest = {
        "schema": SCHEMA_VERSION,
        "id": handle.id,
        "num_objects": handle.state.num_objects,
        "num_frames": handle.state.num_frames,
        "height": handle.state.shape[0],
        "width": handle.state.shape[1],
        "current_round": handle.state.current_round,
        "has_gt": handle.gt is not None,
        "engine": dataclasses.asdict(handle.cfg),
        "rounds": [
            {
                "round": record.round,
                "interacted": list(record.interacted),
                "wall_ms": record.wall_ms,
            }
            for record in handle.state.rounds
        ],
    }
    path = os.path.join(root, "manifest.json")
    with open(path, "w") as fh:
        json.dump(manifest, fh, indent=2)
        fh.write("\n")
    return path


def load_session(root: str, service: SessionService | None = None) -> SessionHandle:
    """Rebuild a session from disk; memory is replayed from stored masks."""
    path = os.path.join(root, "manifest.json")
    try:
        with open(path) as fh:
            manifest = json.load(fh)
    except FileNotFoundError as exc:
        raise FormatError(f"{root}: no manifest.json") from exc
    except json.JSONDecodeError as exc:
        raise FormatError(f"{path}: corrupted manifest: {exc}") from exc
    version = manifest.get("schema")
    if version != SCHEMA_VERSION:
        raise FormatError(
            f"manifest schema {version!r} not supported; this build reads {SCHEMA_VERSION}"
        )
    engine_cfg = EngineConfig(**manifest["engine"])
    frames_dir = os.path.join(root, "frames")
    frames = [
        load_frame_png(os.path.join(frames_dir, frame_filename(i)), index=i)
        for i in range(manifest["num_frames"])
    ]
    gt = None
    if manifest.get("has_gt"):
        gt_dir = os.path.join(root, "gt")
        gt = [
            load_mask_png(os.path.join(gt_dir, frame_filename(i)), frame=i)
            for i in range(manifest["num_frames"])
        ]
    state = SessionState(video=frames, num_objects=manifest["num_objects"])
    handle = SessionHandle(
        id=manifest["id"], state=state, cfg=engine_cfg, gt=gt, lifecycle="idle"
    )
    memory = None
    for round_info in manifest["rounds"]:
        rnd = round_info["round"]
        rdir = os.path.join(root, "rounds", f"round_{rnd:04d}")
        strokes = {}
        scribbles = {}
        for t in round_info["interacted"]:
            frame_idx, stroke_list = load_strokes_json(
                os.path.join(rdir, "scribbles", f"{t:05d}.json")
            )
            strokes[frame_idx] = stroke_list
            scribbles[frame_idx] = rasterize_strokes(
                stroke_list, state.shape, frame=frame_idx, round=rnd
            )
        masks = {
            t: load_mask_png(os.path.join(rdir, "masks", frame_filename(t)), frame=t, round=rnd)
            for t in range(manifest["num_frames"])
        }
        record = RoundRecord(
            round=rnd,
            interacted=tuple(round_info["interacted"]),
            scribbles=scribbles,
            strokes=strokes,
            masks=masks,
            wall_ms=dict(round_info["wall_ms"]),
        )
        state.add_round(record)
        entries = [
            memory_entry(
                frames[t], masks[t], state.num_objects, engine_cfg, rnd,
            )
            for t in record.interacted
        ]
        memory = update_memory(memory, entries, rnd, engine_cfg)
    handle.memory = memory
    state.current_round = manifest["current_round"]
    if state.current_round < 1:
        raise FormatError("manifest current_round must be >= 1")
    if service is not None:
        with service._registry_lock:
            service.sessions[handle.id] = handle
    return handle


# ---------------------------------------------------------------------------
# HTTP layer

_ERROR_CODES = [
    (CapacityError, 400, "capacity"),
    (FormatError, 400, "format"),
    (EmptyEvidenceError, 400, "empty-evidence"),
    (EmptyMemoryError, 400, "empty-memory"),
    (ConflictError, 409, "conflict"),
    (PreconditionError, 409, "precondition"),
    (ValueError, 400, "invalid-argument"),
]


def _error_response(exc: Exception):
    for etype, status, code in _ERROR_CODES:
        if isinstance(exc, etype):
            return JSONResponse(
                status_code=status, content={"error": {"code": code, "message": str(exc)}}
            )
    return None


def _png_bytes(save_fn, obj) -> bytes:
    buf = std_io.BytesIO()
    save_fn(obj, buf)
    return buf.getvalue()


def _session_info(handle: SessionHandle) -> dict:
    return {
        "id": handle.id,
        "lifecycle": handle.lifecycle,
        "num_frames": handle.state.num_frames,
        "num_objects": handle.state.num_objects,
        "height": handle.state.shape[0],
        "width": handle.state.shape[1],
        "current_round": handle.state.current_round,
        "rounds": [
            {
                "round": r.round,
                "interacted": list(r.interacted),
                "wall_ms": r.wall_ms,
            }
            for r in handle.state.rounds
        ],
        "has_gt": handle.gt is not None,
    }


def create_app(cfg: EngineConfig | None = None, frontend_dir: str | None = None) -> FastAPI:
    service = SessionService(cfg)
    app = FastAPI(title="ivoseg session service")
    app.state.service = service

    async def handle_errors(request: Request, exc: Exception):
        resp = _error_response(exc)
        if resp is not None:
            return resp
        if isinstance(exc, KeyError):
            return JSONResponse(
                status_code=404,
                content={"error": {"code": "not-found", "message": str(exc)}},
            )
        raise exc

    # typed handlers run inside the middleware stack, so mapped errors
    # become JSON responses even when the outermost handler is bypassed
    for _etype, _, _ in _ERROR_CODES:
        app.add_exception_handler(_etype, handle_errors)
    app.add_exception_handler(KeyError, handle_errors)
    app.add_exception_handler(Exception, handle_errors)

    @app.post("/sessions")
    async def create_session(request: Request):
        body = await request.json()
        handle = await run_in_threadpool(service.create_session, body)
        return _session_info(handle)

    @app.get("/sessions/{session_id}/state")
    async def get_state(session_id: str):
        return _session_info(service.get(session_id))

    @app.post("/sessions/{session_id}/scribbles")
    async def post_scribbles(session_id: str, request: Request):
        handle = service.get(session_id)
        body = await request.json()
        accepted = await run_in_threadpool(service.submit_scribbles, handle, body)
        return {"round": handle.state.current_round, "accepted_frames": accepted}

    @app.post("/sessions/{session_id}/commit")
    async def post_commit(session_id: str):
        handle = service.get(session_id)
        masks = await run_in_threadpool(service.commit_round, handle)
        return {
            "round": handle.state.current_round,
            "interacted": sorted(masks),
            "wall_ms": handle.stage_wall_ms.get("interaction", 0.0),
        }

    @app.post("/sessions/{session_id}/propagate")
    async def post_propagate(session_id: str):
        handle = service.get(session_id)
        record = await run_in_threadpool(service.propagate, handle)
        return {
            "round": record.round,
            "interacted": list(record.interacted),
            "wall_ms": record.wall_ms,
        }

    @app.get("/sessions/{session_id}/frames/{t}.png")
    async def get_frame(session_id: str, t: int):
        handle = service.get(session_id)
        if not 0 <= t < handle.state.num_frames:
            raise KeyError(f"frame {t}")
        data = _png_bytes(save_frame_png, handle.state.video[t])
        return Response(content=data, media_type="image/png")

    @app.get("/sessions/{session_id}/masks/{t}.png")
    async def get_mask(session_id: str, t: int, round: int | None = Query(default=None)):
        handle = service.get(session_id)
        if not 0 <= t < handle.state.num_frames:
            raise KeyError(f"frame {t}")
        with handle.lock:
            rounds = handle.state.rounds
            if not rounds:
                raise KeyError("no completed round")
            record = None
            if round is None:
                record = rounds[-1]
            else:
                for r in rounds:
                    if r.round == round:
                        record = r
                        break
            if record is None:
                raise KeyError(f"round {round}")
            mask = record.masks[t]
        data = _png_bytes(save_mask_png, mask)
        return Response(content=data, media_type="image/png")

    @app.get("/sessions/{session_id}/metrics")
    async def get_metrics(session_id: str):
        handle = service.get(session_id)
        return await run_in_threadpool(service.metrics, handle)

    @app.post("/sessions/{session_id}/save")
    async def post_save(session_id: str, request: Request):
        handle = service.get(session_id)
        body = await request.json()
        if "path" not in body:
            raise ValueError("body needs a 'path'")
        manifest = await run_in_threadpool(save_session, handle, body["path"])
        return {"manifest": manifest}

    @app.post("/sessions/load")
    async def post_load(request: Request):
        body = await request.json()
        if "path" not in body:
            raise ValueError("body needs a 'path'")
        handle = await run_in_threadpool(load_session, body["path"], service)
        return _session_info(handle)

    @app.websocket("/sessions/{session_id}/events")
    async def events(websocket: WebSocket, session_id: str):
        try:
            handle = service.get(session_id)
        except KeyError:
            await websocket.close(code=4004)
            return
        await websocket.accept()
        pair = service.subscribe(handle)
        queue = pair[0]
        try:
            while True:
                event = await queue.get()
                await websocket.send_json(event)
        except (WebSocketDisconnect, RuntimeError):
            pass
        finally:
            service.unsubscribe(handle, pair)

    if frontend_dir and os.path.isdir(frontend_dir):
        from fastapi.staticfiles import StaticFiles

        app.mount("/", StaticFiles(directory=frontend_dir, html=True), name="ui")

    return app
