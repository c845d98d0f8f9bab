/** WebSocket subscription for propagation progress events. */

import { ProgressEvent } from "./progress.js";

export interface EventHandlers {
  onEvent: (event: ProgressEvent) => void;
  onError?: (err: unknown) => void;
  onClose?: () => void;
}

export interface Subscription {
  /** Resolves once the socket connection is open. */
  ready: Promise<void>;
  close(): void;
}

export interface WebSocketLike {
  onopen: ((ev: unknown) => void) | null;
  onmessage: ((ev: { data: unknown }) => void) | null;
  onerror: ((ev: unknown) => void) | null;
  onclose: ((ev: unknown) => void) | null;
  close(): void;
}

export type WebSocketCtor = new (url: string) => WebSocketLike;

/** Open the socket and forward parsed events; caller closes when done.
 *
 * The constructor is injectable for environments without a global
 * WebSocket implementation.
 */
export function subscribeEvents(url: string, handlers: EventHandlers, ctor?: WebSocketCtor): Subscription {
  const WS = ctor ?? ((globalThis as Record<string, unknown>).WebSocket as WebSocketCtor | undefined);
  if (!WS) throw new Error("no WebSocket implementation available");
  const socket = new WS(url);
  let markReady: () => void = () => undefined;
  const ready = new Promise<void>((resolve) => {
    markReady = resolve;
  });
  socket.onopen = () => markReady();
  socket.onmessage = (ev) => {
    let parsed: ProgressEvent;
    try {
      parsed = JSON.parse(String(ev.data)) as ProgressEvent;
    } catch (err) {
      handlers.onError?.(err);
      return;
    }
    handlers.onEvent(parsed);
  };
  socket.onerror = (err) => handlers.onError?.(err);
  socket.onclose = () => handlers.onClose?.();
  return {
    ready,
    close() {
      socket.onopen = null;
      socket.onmessage = null;
      socket.onerror = null;
      socket.onclose = null;
      socket.close();
    },
  };
}
