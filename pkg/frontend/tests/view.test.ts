import { describe, expect, it } from "vitest";

import { ViewState } from "../src/view.js";

describe("ViewState", () => {
  it("starts at frame 0 with no round and no active object", () => {
    const view = new ViewState(8, 2);
    expect(view.frame).toBe(0);
    expect(view.shownRound).toBeNull();
    expect(view.activeObject).toBeNull();
    expect(view.overlayOpacity).toBe(0.5);
  });

  it("bounds-checks the frame index", () => {
    const view = new ViewState(5, 1);
    view.frame = 4;
    expect(view.frame).toBe(4);
    expect(() => (view.frame = 5)).toThrow(/out of range/);
    expect(() => (view.frame = -1)).toThrow(/out of range/);
    expect(() => (view.frame = 1.5)).toThrow(/out of range/);
    expect(view.frame).toBe(4);
  });

  it("only shows completed rounds", () => {
    const view = new ViewState(4, 2);
    expect(() => (view.shownRound = 1)).toThrow(/not a completed round/);
    view.roundCompleted(1);
    expect(view.shownRound).toBe(1);
    view.roundCompleted(2);
    expect(view.shownRound).toBe(2);
    view.shownRound = 1;
    expect(view.shownRound).toBe(1);
    expect(() => (view.shownRound = 3)).toThrow(/not a completed round/);
    view.shownRound = null;
    expect(view.shownRound).toBeNull();
  });

  it("validates the active object id against the session", () => {
    const view = new ViewState(4, 3);
    view.activeObject = 0;
    view.activeObject = 3;
    expect(() => (view.activeObject = 4)).toThrow(/out of range/);
    expect(() => (view.activeObject = -1)).toThrow(/out of range/);
    view.activeObject = null;
    expect(view.activeObject).toBeNull();
  });

  it("raises a user-facing message when drawing with no object selected", () => {
    const view = new ViewState(4, 2);
    expect(() => view.requireActiveObject()).toThrow("select an object before drawing");
    view.activeObject = 2;
    expect(view.requireActiveObject()).toBe(2);
  });

  it("clamps overlay opacity into [0, 1]", () => {
    const view = new ViewState(4, 2);
    view.overlayOpacity = 1.7;
    expect(view.overlayOpacity).toBe(1);
    view.overlayOpacity = -0.2;
    expect(view.overlayOpacity).toBe(0);
    view.overlayOpacity = 0.25;
    expect(view.overlayOpacity).toBe(0.25);
    expect(() => (view.overlayOpacity = Number.NaN)).toThrow(/finite/);
  });

  it("rejects empty sessions", () => {
    expect(() => new ViewState(0, 1)).toThrow(/at least 1 frame/);
    expect(() => new ViewState(3, 0)).toThrow(/at least 1 object/);
  });
});
