"""Command line entry points: gen-data, evaluate, bench, serve, metrics.

Each subcommand is a thin driver over the library modules; all of them
honor --seed and fail with a machine-readable ``error: <code>: <message>``
line and a nonzero exit code.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import os
import sys

from .config import EngineConfig, load_config
from .errors import CapacityError, ConflictError, FormatError, PreconditionError


def _engine_config(args) -> EngineConfig:
    if getattr(args, "config", None):
        cfg = load_config(args.config)
    else:
        cfg = load_config(None)
    updates = {}
    if getattr(args, "seed", None) is not None:
        updates["seed"] = args.seed
    if getattr(args, "threads", None) is not None:
        updates["threads"] = args.threads
    return dataclasses.replace(cfg, **updates) if updates else cfg


def _cmd_gen_data(args) -> int:
    from .synth import bench_config, save_scene, save_suite, suite_configs

    os.makedirs(args.out, exist_ok=True)
    seed = args.seed if args.seed is not None else 7
    if args.scene:
        matches = [c for c in suite_configs(seed) + [bench_config(seed)] if c.name == args.scene]
        if not matches:
            raise ValueError(f"unknown scene {args.scene!r}")
        save_scene(matches[0], os.path.join(args.out, matches[0].name))
        written = [matches[0].name]
    else:
        save_suite(args.out, seed)
        written = [c.name for c in suite_configs(seed)]
        if args.bench:
            save_scene(bench_config(seed), os.path.join(args.out, "bench10"))
            written.append("bench10")
    print(f"wrote {len(written)} scene(s) to {args.out}: {', '.join(written)}")
    return 0


def _scene_dirs(suite: str) -> list[str]:
    if not os.path.isdir(suite):
        raise FormatError(f"suite directory {suite!r} does not exist")
    dirs = sorted(
        os.path.join(suite, d)
        for d in os.listdir(suite)
        if os.path.isfile(os.path.join(suite, d, "scene.json"))
    )
    if not dirs:
        raise FormatError(f"no scene directories under {suite!r}")
    return dirs


def _cmd_evaluate(args) -> int:
    from .robot import run_robot_session
    from .synth import load_scene

    cfg = _engine_config(args)
    scene_dirs = _scene_dirs(args.suite)
    per_scene = {}
    for scene_dir in scene_dirs:
        frames, gt, num_objects, name = load_scene(scene_dir)
        if args.frames_per_round > len(frames):
            raise ValueError(
                f"--frames-per-round {args.frames_per_round} exceeds "
                f"{name}'s {len(frames)} frames"
            )
        per_scene[name] = run_robot_session(
            frames, gt, num_objects, args.frames_per_round, args.rounds, cfg
        )

    # deterministic score report; wall-clock numbers go to a sidecar file
    import csv

    out = args.out
    with open(out, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["scene", "round", "mean_j", "mean_f", "mean_jf"])
        for rnd in range(1, args.rounds + 1):
            js, fs = [], []
            for name in sorted(per_scene):
                report = per_scene[name][rnd - 1]
                w.writerow(
                    [name, rnd, f"{report.mean_j:.6f}", f"{report.mean_f:.6f}",
                     f"{report.mean_jf:.6f}"]
                )
                js.append(report.mean_j)
                fs.append(report.mean_f)
            mj, mf = sum(js) / len(js), sum(fs) / len(fs)
            w.writerow(["mean", rnd, f"{mj:.6f}", f"{mf:.6f}", f"{(mj + mf) / 2:.6f}"])
    base = os.path.splitext(out)[0]
    summary = {
        "frames_per_round": args.frames_per_round,
        "rounds": args.rounds,
        "seed": cfg.seed,
        "per_round": {},
    }
    for rnd in range(1, args.rounds + 1):
        js = [per_scene[n][rnd - 1].mean_j for n in sorted(per_scene)]
        fs = [per_scene[n][rnd - 1].mean_f for n in sorted(per_scene)]
        mj, mf = sum(js) / len(js), sum(fs) / len(fs)
        summary["per_round"][str(rnd)] = {
            "mean_j": round(mj, 6), "mean_f": round(mf, 6), "mean_jf": round((mj + mf) / 2, 6)
        }
    with open(base + "_summary.json", "w") as fh:
        json.dump(summary, fh, indent=2, sort_keys=True)
        fh.write("\n")
    with open(base + "_timing.csv", "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["scene", "round", "wall_ms", "over_budget"])
        for name in sorted(per_scene):
            for report in per_scene[name]:
                w.writerow([name, report.round, f"{report.wall_ms:.1f}", report.over_budget])
    last = summary["per_round"][str(args.rounds)]
    print(
        f"evaluated {len(per_scene)} scene(s): mean J {last['mean_j']:.4f}, "
        f"mean F {last['mean_f']:.4f}, mean J&F {last['mean_jf']:.4f}"
    )
    return 0


def _parse_objects(text: str) -> range:
    if ".." in text:
        lo, hi = text.split("..", 1)
        lo_i, hi_i = int(lo), int(hi)
    else:
        lo_i, hi_i = 1, int(text)
    if lo_i < 1 or hi_i < lo_i:
        raise ValueError(f"bad --objects range {text!r}")
    return range(lo_i, hi_i + 1)


def _cmd_bench(args) -> int:
    from .bench import benchmark_object_scaling

    if args.trials < 3:
        raise ValueError("--trials must be >= 3 for a median")
    cfg = _engine_config(args)
    n_values = _parse_objects(args.objects)
    report = benchmark_object_scaling(
        n_values, trials=args.trials, cfg=cfg, seed=cfg.seed
    )
    report.to_csv(args.out)
    report.to_json(os.path.splitext(args.out)[0] + "_plot.json")
    n_hi = max(n_values)
    if n_hi >= 10 and 10 in n_values:
        conc = report.row(10, "concurrent")
        per = report.row(10, "per-object")
        print(
            f"N=10: concurrent {conc.wall_ms:.1f} ms vs per-object {per.wall_ms:.1f} ms "
            f"({per.wall_ms / conc.wall_ms:.2f}x), MACs {conc.macs} vs {per.macs}"
        )
    print(f"wrote {args.out}")
    return 0


def _cmd_serve(args) -> int:
    import uvicorn

    from .service import create_app

    cfg = _engine_config(args)
    host = args.host or cfg.host
    port = args.port if args.port is not None else cfg.port
    app = create_app(cfg, frontend_dir=args.frontend)
    uvicorn.run(app, host=host, port=port, log_level="warning")
    return 0


def _cmd_metrics(args) -> int:
    import csv

    import numpy as np

    from .io import load_mask_png
    from .metrics import boundary_f, jaccard

    def load_dir(path):
        if not os.path.isdir(path):
            raise FormatError(f"{path!r} is not a directory")
        names = sorted(n for n in os.listdir(path) if n.endswith(".png"))
        if not names:
            raise FormatError(f"no .png masks in {path!r}")
        return [load_mask_png(os.path.join(path, n), frame=i) for i, n in enumerate(names)]

    pred = load_dir(args.pred)
    gt = load_dir(args.gt)
    if len(pred) != len(gt):
        raise ValueError(f"{len(pred)} predictions vs {len(gt)} ground-truth masks")
    num_objects = max(int(m.labels.max()) for m in gt) or 1
    rows = []
    for t, (p, g) in enumerate(zip(pred, gt)):
        for obj in range(1, num_objects + 1):
            rows.append(
                (
                    t,
                    obj,
                    jaccard(p.labels == obj, g.labels == obj),
                    boundary_f(p.labels == obj, g.labels == obj, args.tol),
                )
            )
    with open(args.out, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["frame", "object", "j", "f"])
        for t, obj, j, f in rows:
            w.writerow([t, obj, f"{j:.6f}", f"{f:.6f}"])
    mean_j = float(np.mean([r[2] for r in rows]))
    mean_f = float(np.mean([r[3] for r in rows]))
    with open(os.path.splitext(args.out)[0] + "_summary.json", "w") as fh:
        json.dump(
            {"mean_j": round(mean_j, 6), "mean_f": round(mean_f, 6),
             "mean_jf": round((mean_j + mean_f) / 2, 6), "num_objects": num_objects},
            fh, indent=2, sort_keys=True,
        )
        fh.write("\n")
    print(f"mean J {mean_j:.4f}, mean F {mean_f:.4f} over {len(pred)} frames")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ivoseg",
        description="Interactive video object segmentation: data, evaluation, benchmark, service.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen-data", help="write synthetic scenes with ground truth")
    p.add_argument("--out", required=True, help="output directory")
    p.add_argument("--seed", type=int, default=None, help="scene seed (default 7)")
    p.add_argument("--scene", default=None, help="single scene name instead of the full suite")
    p.add_argument("--bench", action="store_true", help="also write the 10-object bench scene")
    p.set_defaults(func=_cmd_gen_data)

    p = sub.add_parser("evaluate", help="run the robot interaction loop over a scene suite")
    p.add_argument("--suite", required=True, help="directory of scene directories")
    p.add_argument("--frames-per-round", type=int, default=1)
    p.add_argument("--rounds", type=int, default=1)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--threads", type=int, default=None)
    p.add_argument("--config", default=None, help="engine config TOML/JSON")
    p.add_argument("--out", default="report.csv")
    p.set_defaults(func=_cmd_evaluate)

    p = sub.add_parser("bench", help="object-count scaling benchmark")
    p.add_argument("--objects", default="1..11", help="N range, e.g. 1..11")
    p.add_argument("--trials", type=int, default=5)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--config", default=None)
    p.add_argument("--out", default="bench.csv")
    p.set_defaults(func=_cmd_bench)

    p = sub.add_parser("serve", help="start the session service")
    p.add_argument("--host", default=None)
    p.add_argument("--port", type=int, default=None)
    p.add_argument("--config", default=None)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--threads", type=int, default=None)
    p.add_argument("--frontend", default=None, help="directory of built UI assets to serve at /")
    p.set_defaults(func=_cmd_serve)

    p = sub.add_parser("metrics", help="score a directory of predicted masks against ground truth")
    p.add_argument("--pred", required=True)
    p.add_argument("--gt", required=True)
    p.add_argument("--tol", type=int, default=None, help="boundary tolerance in px")
    p.add_argument("--out", default="metrics.csv")
    p.set_defaults(func=_cmd_metrics)
    return parser


_CODES = [
    (CapacityError, "capacity"),
    (FormatError, "format"),
    (ConflictError, "conflict"),
    (PreconditionError, "precondition"),
    (ValueError, "invalid-argument"),
    (FileNotFoundError, "not-found"),
]


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except tuple(t for t, _ in _CODES) as exc:
        code = next(code for etype, code in _CODES if isinstance(exc, etype))
        print(f"error: {code}: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
