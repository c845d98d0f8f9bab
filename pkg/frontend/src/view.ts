/** Client-side view state: current frame, shown round, active object. */

export class ViewState {
  readonly numFrames: number;
  readonly numObjects: number;
  private frame_ = 0;
  private shownRound_: number | null = null;
  private completedRounds_ = 0;
  private activeObject_: number | null = null;
  private overlayOpacity_ = 0.5;

  constructor(numFrames: number, numObjects: number) {
    if (!Number.isInteger(numFrames) || numFrames < 1) {
      throw new RangeError(`need at least 1 frame, got ${numFrames}`);
    }
    if (!Number.isInteger(numObjects) || numObjects < 1) {
      throw new RangeError(`need at least 1 object, got ${numObjects}`);
    }
    this.numFrames = numFrames;
    this.numObjects = numObjects;
  }

  get frame(): number {
    return this.frame_;
  }

  set frame(t: number) {
    if (!Number.isInteger(t) || t < 0 || t >= this.numFrames) {
      throw new RangeError(`frame ${t} out of range [0, ${this.numFrames - 1}]`);
    }
    this.frame_ = t;
  }

  get completedRounds(): number {
    return this.completedRounds_;
  }

  /** Record that a round finished; newly completed rounds become shown. */
  roundCompleted(round: number): void {
    if (round > this.completedRounds_) {
      this.completedRounds_ = round;
      this.shownRound_ = round;
    }
  }

  /** Round whose masks the timeline displays; null before any complete. */
  get shownRound(): number | null {
    return this.shownRound_;
  }

  set shownRound(round: number | null) {
    if (round === null) {
      this.shownRound_ = null;
      return;
    }
    if (!Number.isInteger(round) || round < 1 || round > this.completedRounds_) {
      throw new RangeError(`round ${round} is not a completed round (have ${this.completedRounds_})`);
    }
    this.shownRound_ = round;
  }

  get activeObject(): number | null {
    return this.activeObject_;
  }

  set activeObject(id: number | null) {
    if (id === null) {
      this.activeObject_ = null;
      return;
    }
    // 0 selects the background brush
    if (!Number.isInteger(id) || id < 0 || id > this.numObjects) {
      throw new RangeError(`object ${id} out of range [0, ${this.numObjects}]`);
    }
    this.activeObject_ = id;
  }

  /** Brush id to draw with; throws with a user-facing message if unset. */
  requireActiveObject(): number {
    if (this.activeObject_ === null) {
      throw new Error("select an object before drawing");
    }
    return this.activeObject_;
  }

  get overlayOpacity(): number {
    return this.overlayOpacity_;
  }

  set overlayOpacity(v: number) {
    if (!Number.isFinite(v)) throw new RangeError(`opacity must be finite, got ${v}`);
    this.overlayOpacity_ = Math.min(Math.max(v, 0), 1);
  }
}
