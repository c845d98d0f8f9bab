/** Convert between label grids and RGBA overlay pixels.
 *
 * Masks stay server-authoritative: these helpers only render copies and
 * never write back into their inputs.
 */

import { colorForId, idForColor } from "./palette.js";

/** Paint labels as RGBA; background (0) is fully transparent.
 *
 * `opacity` scales the alpha of object pixels, 0..1.
 */
export function maskToRgba(labels: Int32Array | number[], w: number, h: number, opacity: number): Uint8ClampedArray {
  if (labels.length !== w * h) {
    throw new RangeError(`label grid has ${labels.length} entries, expected ${w * h}`);
  }
  const alpha = Math.round(Math.min(Math.max(opacity, 0), 1) * 255);
  const out = new Uint8ClampedArray(w * h * 4);
  for (let i = 0; i < labels.length; i++) {
    const id = labels[i];
    if (id === 0) continue;
    const [r, g, b] = colorForId(id);
    const o = i * 4;
    out[o] = r;
    out[o + 1] = g;
    out[o + 2] = b;
    out[o + 3] = alpha;
  }
  return out;
}

/** Recover object ids from an opaque palette-colored RGBA image. */
export function decodeMaskRgbaToLabels(rgba: Uint8ClampedArray | Uint8Array, w: number, h: number): Int32Array {
  if (rgba.length !== w * h * 4) {
    throw new RangeError(`rgba buffer has ${rgba.length} bytes, expected ${w * h * 4}`);
  }
  const labels = new Int32Array(w * h);
  for (let i = 0; i < w * h; i++) {
    const o = i * 4;
    labels[i] = idForColor(rgba[o], rgba[o + 1], rgba[o + 2]);
  }
  return labels;
}
