import { afterAll, beforeAll, describe, expect, it } from "vitest";

import { ChildProcess, spawn } from "node:child_process";
import { PNG } from "pngjs";
import WebSocket from "ws";

import { Client } from "../src/api.js";
import { WebSocketCtor } from "../src/events.js";
import { decodeMaskRgbaToLabels } from "../src/overlay.js";
import { ProgressEvent } from "../src/progress.js";
import { StagedScribbles } from "../src/staging.js";
import { CanvasStroke, coveredPixels, rasterizeStrokes } from "../src/strokes.js";
import { commitAndPropagate } from "../src/workflow.js";

const PORT = 8137;
const BASE = `http://127.0.0.1:${PORT}`;
const SIDE = 48;

// two moving objects that stay in view for all six frames
const SCENE = {
  num_frames: 6,
  height: SIDE,
  width: SIDE,
  seed: 3,
  background: "flat",
  objects: [
    { shape: "circle", color: [0.9, 0.15, 0.1], z: 1, size: 9.0, center: [16.0, 18.0], velocity: [1.0, 0.5] },
    { shape: "rectangle", color: [0.1, 0.2, 0.9], z: 2, size: 8.0, center: [32.0, 30.0], velocity: [-1.0, 0.0] },
  ],
};

// one stroke inside each object plus a background stroke; the object
// paths keep these positions valid on both interacted frames
function sceneStrokes(): CanvasStroke[] {
  return [
    { objectId: 1, radius: 1.5, points: [[16, 14], [20, 16], [18, 20]] },
    { objectId: 2, radius: 1.5, points: [[29, 27], [34, 29], [33, 33]] },
    { objectId: 0, radius: 1.5, points: [[4, 40], [14, 42], [24, 40]] },
  ];
}

let server: ChildProcess | null = null;
let serverLog = "";

async function waitForServer(timeoutMs: number): Promise<void> {
  const deadline = Date.now() + timeoutMs;
  while (Date.now() < deadline) {
    try {
      const resp = await fetch(`${BASE}/openapi.json`);
      if (resp.ok) return;
    } catch {
      // not listening yet
    }
    await new Promise((r) => setTimeout(r, 250));
  }
  throw new Error(`service never came up on ${BASE}:\n${serverLog}`);
}

async function fetchMaskLabels(client: Client, sessionId: string, t: number, round: number): Promise<Int32Array> {
  const resp = await fetch(client.maskUrl(sessionId, t, round));
  expect(resp.status).toBe(200);
  const png = PNG.sync.read(Buffer.from(await resp.arrayBuffer()));
  expect([png.width, png.height]).toEqual([SIDE, SIDE]);
  return decodeMaskRgbaToLabels(png.data, png.width, png.height);
}

beforeAll(async () => {
  const code = "from ivoseg.cli import main; import sys; sys.exit(main(['serve', '--host', '127.0.0.1', '--port', '8137']))";
  server = spawn("python3", ["-c", code], { stdio: ["ignore", "pipe", "pipe"] });
  server.stdout?.on("data", (chunk: Buffer) => (serverLog += chunk.toString()));
  server.stderr?.on("data", (chunk: Buffer) => (serverLog += chunk.toString()));
  await waitForServer(30_000);
}, 45_000);

afterAll(() => {
  server?.kill("SIGTERM");
});

describe("round trip against a live service", () => {
  it("stages strokes on two frames and propagates to every other frame", { timeout: 60_000 }, async () => {
    const client = new Client(BASE);
    const info = await client.createSession({
      source: { type: "generated", config: SCENE },
      num_objects: 2,
      attach_gt: true,
    });
    expect(info.num_frames).toBe(6);
    expect(info.current_round).toBe(1);

    const staged = new StagedScribbles();
    for (const frame of [0, 4]) {
      for (const stroke of sceneStrokes()) staged.stage(frame, stroke);
    }
    expect(staged.framesWithStrokes()).toEqual([0, 4]);
    // the workflow clears staging on success, keep a copy to compare
    // the local preview against the server's rasterization afterwards
    const frame0Strokes = [...staged.strokesFor(0)];

    const events: ProgressEvent[] = [];
    const record = await commitAndPropagate(
      client,
      info.id,
      staged,
      info.current_round,
      info.num_frames,
      { onProgress: (_p, event) => events.push(event) },
      WebSocket as unknown as WebSocketCtor,
    );

    expect(record.round).toBe(1);
    expect([...record.interacted].sort((a, b) => a - b)).toEqual([0, 4]);
    expect(staged.isEmpty).toBe(true);

    // exactly one truncated and one repropagated event per frame that
    // had no scribbles, and an afi event per frame that did
    const frames = (stage: string) =>
      events
        .filter((e) => e.stage === stage)
        .map((e) => e.frame)
        .sort((a, b) => (a ?? -1) - (b ?? -1));
    expect(frames("afi")).toEqual([0, 4]);
    expect(frames("truncated")).toEqual([1, 2, 3, 5]);
    expect(frames("repropagated")).toEqual([1, 2, 3, 5]);
    expect(frames("done")).toEqual([null]);

    // scrubbing the timeline: every frame now has a mask overlay
    for (let t = 0; t < info.num_frames; t++) {
      const labels = await fetchMaskLabels(client, info.id, t, record.round);
      let objectPixels = 0;
      for (const id of labels) if (id > 0) objectPixels++;
      expect(objectPixels).toBeGreaterThan(0);
    }

    // staged-stroke round trip: the pixels the local preview covers
    // carry exactly those labels in the server's committed mask
    const serverLabels = await fetchMaskLabels(client, info.id, 0, record.round);
    const preview = rasterizeStrokes(frame0Strokes, SIDE, SIDE);
    const pixels = coveredPixels(preview, SIDE);
    expect(pixels.length).toBeGreaterThan(50);
    let mismatches = 0;
    for (const { x, y, id } of pixels) {
      if (serverLabels[y * SIDE + x] !== id) mismatches++;
    }
    expect(mismatches).toBe(0);

    // metrics panel data is a straight pass-through
    const metrics = await client.metrics(info.id);
    expect(metrics.rounds).toHaveLength(1);
    expect(metrics.rounds[0].round).toBe(1);
    expect(metrics.rounds[0].mean_j).toBeGreaterThan(0.5);
  });

  it("surfaces server errors verbatim", { timeout: 15_000 }, async () => {
    const client = new Client(BASE);
    const info = await client.createSession({
      source: { type: "generated", config: { ...SCENE, num_frames: 3 } },
      num_objects: 2,
    });
    // propagate before any commit trips the lifecycle precondition
    const err = await client.propagate(info.id).catch((e: unknown) => e);
    expect(err).toBeInstanceOf(Error);
    expect((err as { status?: number }).status).toBe(409);
    expect((err as Error).message.length).toBeGreaterThan(0);
  });
});
