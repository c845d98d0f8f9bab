/** Object-id colors, index == id, 0 = background.
 *
 * This table must stay identical to the indexed-PNG palette the service
 * writes, so overlays rendered here and masks saved there agree visually.
 */

export type Rgb = readonly [number, number, number];

export const PALETTE: readonly Rgb[] = [
  [0, 0, 0],
  [128, 0, 0],
  [0, 128, 0],
  [128, 128, 0],
  [0, 0, 128],
  [128, 0, 128],
  [0, 128, 128],
  [128, 128, 128],
  [64, 0, 0],
  [192, 0, 0],
  [64, 128, 0],
];

export const MAX_OBJECTS = PALETTE.length - 1;

export function colorForId(id: number): Rgb {
  if (!Number.isInteger(id) || id < 0 || id >= PALETTE.length) {
    throw new RangeError(`no palette color for id ${id}`);
  }
  return PALETTE[id];
}

export function cssColor(id: number): string {
  const [r, g, b] = colorForId(id);
  return `rgb(${r}, ${g}, ${b})`;
}

/** Inverse lookup used when reading mask pixels back; exact match only. */
export function idForColor(r: number, g: number, b: number): number {
  for (let id = 0; id < PALETTE.length; id++) {
    const [pr, pg, pb] = PALETTE[id];
    if (pr === r && pg === g && pb === b) return id;
  }
  throw new RangeError(`color rgb(${r}, ${g}, ${b}) is not a palette entry`);
}
