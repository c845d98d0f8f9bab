/** Scribble strokes: wire format, validation, and local rasterization.
 *
 * The rasterizer here mirrors the server's pixel-for-pixel so a stroke
 * preview shows exactly the pixels the service will label. Coordinates
 * are frame pixels with integer centers; a pixel is covered when its
 * center lies within `radius` of the polyline.
 */

export const UNLABELED = -1;
export const DEFAULT_RADIUS = 1.5;

export type StrokePoint = readonly [number, number];

export interface CanvasStroke {
  objectId: number;
  radius: number;
  points: StrokePoint[];
}

export interface WireStroke {
  object_id: number;
  radius: number;
  points: number[][];
}

export function validateStroke(stroke: CanvasStroke): void {
  if (!Number.isInteger(stroke.objectId) || stroke.objectId < 0) {
    throw new RangeError(`stroke object id must be a non-negative integer, got ${stroke.objectId}`);
  }
  if (!Number.isFinite(stroke.radius) || stroke.radius <= 0) {
    throw new RangeError(`stroke radius must be positive, got ${stroke.radius}`);
  }
  if (stroke.points.length < 2) {
    throw new RangeError(`stroke needs at least 2 points, got ${stroke.points.length}`);
  }
}

export function strokeToWire(stroke: CanvasStroke): WireStroke {
  validateStroke(stroke);
  return {
    object_id: stroke.objectId,
    radius: stroke.radius,
    points: stroke.points.map(([x, y]) => [x, y]),
  };
}

export function strokeFromWire(wire: WireStroke): CanvasStroke {
  const stroke: CanvasStroke = {
    objectId: wire.object_id,
    radius: wire.radius,
    points: wire.points.map((p) => {
      if (p.length !== 2) throw new RangeError(`point must be [x, y], got ${p.length} values`);
      return [p[0], p[1]] as const;
    }),
  };
  validateStroke(stroke);
  return stroke;
}

export interface SubmissionBody {
  round: number;
  scribbles: { frame: number; strokes: WireStroke[] }[];
}

/** Build the scribble-submission payload, frames in ascending order. */
export function submissionBody(round: number, staged: ReadonlyMap<number, CanvasStroke[]>): SubmissionBody {
  const frames = Array.from(staged.keys()).sort((a, b) => a - b);
  const scribbles = [];
  for (const frame of frames) {
    const strokes = staged.get(frame) ?? [];
    if (strokes.length === 0) continue;
    scribbles.push({ frame, strokes: strokes.map(strokeToWire) });
  }
  return { round, scribbles };
}

/** Map a canvas-local pointer position into frame pixel coordinates. */
export function canvasToFrame(
  cx: number,
  cy: number,
  canvasW: number,
  canvasH: number,
  frameW: number,
  frameH: number,
): StrokePoint {
  const x = Math.min(Math.max((cx * frameW) / canvasW, 0), frameW - 1);
  const y = Math.min(Math.max((cy * frameH) / canvasH, 0), frameH - 1);
  return [x, y];
}

/** Paint strokes onto an h-by-w label grid; later strokes overwrite.
 *
 * Returns a row-major Int32Array with UNLABELED where nothing was drawn.
 * Points outside [0, w-1] x [0, h-1] are rejected, matching the server.
 */
export function rasterizeStrokes(strokes: readonly CanvasStroke[], h: number, w: number): Int32Array {
  const labels = new Int32Array(h * w).fill(UNLABELED);
  for (const stroke of strokes) {
    validateStroke(stroke);
    for (const [x, y] of stroke.points) {
      if (x < 0 || x > w - 1 || y < 0 || y > h - 1) {
        throw new RangeError(`stroke point (${x}, ${y}) outside frame ${w}x${h}`);
      }
    }
    const covered = new Uint8Array(h * w);
    const r2 = stroke.radius * stroke.radius + 1e-12;
    const pad = stroke.radius + 1.0;
    for (let i = 0; i < stroke.points.length - 1; i++) {
      const [x0, y0] = stroke.points[i];
      const [x1, y1] = stroke.points[i + 1];
      const loX = Math.max(Math.floor(Math.min(x0, x1) - pad), 0);
      const hiX = Math.min(Math.ceil(Math.max(x0, x1) + pad), w - 1);
      const loY = Math.max(Math.floor(Math.min(y0, y1) - pad), 0);
      const hiY = Math.min(Math.ceil(Math.max(y0, y1) + pad), h - 1);
      const dx = x1 - x0;
      const dy = y1 - y0;
      const segLen2 = dx * dx + dy * dy;
      for (let py = loY; py <= hiY; py++) {
        for (let px = loX; px <= hiX; px++) {
          let t = 0;
          if (segLen2 > 0) {
            t = ((px - x0) * dx + (py - y0) * dy) / segLen2;
            if (t < 0) t = 0;
            else if (t > 1) t = 1;
          }
          const ddx = px - (x0 + t * dx);
          const ddy = py - (y0 + t * dy);
          if (ddx * ddx + ddy * ddy <= r2) covered[py * w + px] = 1;
        }
      }
    }
    for (let idx = 0; idx < covered.length; idx++) {
      if (covered[idx]) labels[idx] = stroke.objectId;
    }
  }
  return labels;
}

export interface CoveredPixel {
  x: number;
  y: number;
  id: number;
}

/** Enumerate labeled pixels of a rasterized grid, row-major order. */
export function coveredPixels(labels: Int32Array, w: number): CoveredPixel[] {
  const out: CoveredPixel[] = [];
  for (let idx = 0; idx < labels.length; idx++) {
    if (labels[idx] !== UNLABELED) {
      out.push({ x: idx % w, y: Math.floor(idx / w), id: labels[idx] });
    }
  }
  return out;
}
