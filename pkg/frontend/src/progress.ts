/** Track per-frame propagation progress from the event stream.
 *
 * Interacted frames report an "afi" stage; every other frame reports
 * "truncated" then "repropagated"; a final "done" has a null frame.
 */

export type Stage = "afi" | "truncated" | "repropagated" | "done";

export interface ProgressEvent {
  stage: Stage;
  frame: number | null;
  round: number;
  wall_ms: number;
}

export type FrameStatus = "pending" | "afi" | "truncated" | "repropagated";

export class PropagationProgress {
  readonly numFrames: number;
  readonly interacted: ReadonlySet<number>;
  private afi = new Set<number>();
  private truncated = new Set<number>();
  private repropagated = new Set<number>();
  private done_ = false;

  constructor(numFrames: number, interacted: Iterable<number>) {
    this.numFrames = numFrames;
    this.interacted = new Set(interacted);
    for (const t of this.interacted) {
      if (!Number.isInteger(t) || t < 0 || t >= numFrames) {
        throw new RangeError(`interacted frame ${t} out of range [0, ${numFrames - 1}]`);
      }
    }
  }

  handle(event: ProgressEvent): void {
    if (event.stage === "done") {
      this.done_ = true;
      return;
    }
    if (event.frame === null) {
      throw new RangeError(`stage ${event.stage} requires a frame index`);
    }
    if (event.stage === "afi") this.afi.add(event.frame);
    else if (event.stage === "truncated") this.truncated.add(event.frame);
    else this.repropagated.add(event.frame);
  }

  /** Frames awaiting propagation, i.e. not interacted this round. */
  get expected(): number {
    return this.numFrames - this.interacted.size;
  }

  get done(): boolean {
    return this.done_;
  }

  /** Completion in [0, 1]: each pending frame passes two stages. */
  get fraction(): number {
    if (this.done_) return 1;
    const total = 2 * this.expected;
    if (total === 0) return this.afi.size > 0 ? 1 : 0;
    return (this.truncated.size + this.repropagated.size) / total;
  }

  frameStatus(t: number): FrameStatus {
    if (this.repropagated.has(t)) return "repropagated";
    if (this.truncated.has(t)) return "truncated";
    if (this.afi.has(t)) return "afi";
    return "pending";
  }

  counts(): { afi: number; truncated: number; repropagated: number } {
    return { afi: this.afi.size, truncated: this.truncated.size, repropagated: this.repropagated.size };
  }
}
