/** Per-frame staging area for strokes drawn but not yet submitted. */

import { CanvasStroke, SubmissionBody, submissionBody, validateStroke } from "./strokes.js";

export class StagedScribbles {
  private byFrame = new Map<number, CanvasStroke[]>();

  stage(frame: number, stroke: CanvasStroke): void {
    if (!Number.isInteger(frame) || frame < 0) {
      throw new RangeError(`frame index must be a non-negative integer, got ${frame}`);
    }
    validateStroke(stroke);
    const list = this.byFrame.get(frame);
    if (list) list.push(stroke);
    else this.byFrame.set(frame, [stroke]);
  }

  /** Remove the most recent stroke on a frame; earlier ones stay. */
  undo(frame: number): CanvasStroke | undefined {
    const list = this.byFrame.get(frame);
    if (!list || list.length === 0) return undefined;
    const stroke = list.pop();
    if (list.length === 0) this.byFrame.delete(frame);
    return stroke;
  }

  clearFrame(frame: number): void {
    this.byFrame.delete(frame);
  }

  clearAll(): void {
    this.byFrame.clear();
  }

  strokesFor(frame: number): readonly CanvasStroke[] {
    return this.byFrame.get(frame) ?? [];
  }

  framesWithStrokes(): number[] {
    return Array.from(this.byFrame.keys()).sort((a, b) => a - b);
  }

  get isEmpty(): boolean {
    return this.byFrame.size === 0;
  }

  toSubmission(round: number): SubmissionBody {
    return submissionBody(round, this.byFrame);
  }
}
