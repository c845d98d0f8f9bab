import { describe, expect, it } from "vitest";

import { subscribeEvents, WebSocketLike } from "../src/events.js";
import { ProgressEvent } from "../src/progress.js";

class RecordingSocket implements WebSocketLike {
  static last: RecordingSocket | null = null;
  url: string;
  closed = false;
  onopen: ((ev: unknown) => void) | null = null;
  onmessage: ((ev: { data: unknown }) => void) | null = null;
  onerror: ((ev: unknown) => void) | null = null;
  onclose: ((ev: unknown) => void) | null = null;

  constructor(url: string) {
    this.url = url;
    RecordingSocket.last = this;
  }

  close(): void {
    this.closed = true;
  }
}

describe("subscribeEvents", () => {
  it("parses JSON frames into progress events", () => {
    const events: ProgressEvent[] = [];
    subscribeEvents("ws://x/sessions/a/events", { onEvent: (e) => events.push(e) }, RecordingSocket);
    const socket = RecordingSocket.last;
    expect(socket?.url).toBe("ws://x/sessions/a/events");
    socket?.onmessage?.({ data: '{"stage": "truncated", "frame": 2, "round": 1, "wall_ms": 3.5}' });
    expect(events).toEqual([{ stage: "truncated", frame: 2, round: 1, wall_ms: 3.5 }]);
  });

  it("routes malformed frames to onError instead of throwing", () => {
    const events: ProgressEvent[] = [];
    const errors: unknown[] = [];
    subscribeEvents(
      "ws://x/s",
      { onEvent: (e) => events.push(e), onError: (e) => errors.push(e) },
      RecordingSocket,
    );
    RecordingSocket.last?.onmessage?.({ data: "not json" });
    expect(events).toEqual([]);
    expect(errors).toHaveLength(1);
  });

  it("close() detaches handlers and closes the socket", () => {
    const sub = subscribeEvents("ws://x/s", { onEvent: () => undefined }, RecordingSocket);
    const socket = RecordingSocket.last;
    sub.close();
    expect(socket?.closed).toBe(true);
    expect(socket?.onopen).toBeNull();
    expect(socket?.onmessage).toBeNull();
    expect(socket?.onclose).toBeNull();
  });

  it("ready resolves once the connection opens", async () => {
    const sub = subscribeEvents("ws://x/s", { onEvent: () => undefined }, RecordingSocket);
    RecordingSocket.last?.onopen?.({});
    await expect(sub.ready).resolves.toBeUndefined();
  });

  it("requires some WebSocket implementation", () => {
    const hadGlobal = "WebSocket" in globalThis;
    if (!hadGlobal) {
      expect(() => subscribeEvents("ws://x/s", { onEvent: () => undefined })).toThrow(
        /no WebSocket implementation/,
      );
    }
  });
});
