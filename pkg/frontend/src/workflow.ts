/** Orchestrate one interaction round: submit, commit, propagate.
 *
 * Progress events stream over the session WebSocket while the commit
 * and propagate calls run; staged strokes are cleared only after the
 * round lands, so a failed round keeps the user's drawing intact.
 */

import { Client, RoundInfo } from "./api.js";
import { subscribeEvents, WebSocketCtor } from "./events.js";
import { PropagationProgress, ProgressEvent } from "./progress.js";
import { StagedScribbles } from "./staging.js";

export interface WorkflowCallbacks {
  onProgress?: (progress: PropagationProgress, event: ProgressEvent) => void;
  onCommitted?: (interacted: number[]) => void;
}

export async function commitAndPropagate(
  client: Client,
  sessionId: string,
  staged: StagedScribbles,
  round: number,
  numFrames: number,
  callbacks: WorkflowCallbacks = {},
  wsCtor?: WebSocketCtor,
): Promise<RoundInfo> {
  if (staged.isEmpty) {
    throw new Error("draw at least one stroke before committing");
  }
  const interacted = staged.framesWithStrokes();
  const progress = new PropagationProgress(numFrames, interacted);

  await client.submitScribbles(sessionId, staged.toSubmission(round));

  let markDone: () => void = () => undefined;
  const doneSeen = new Promise<void>((resolve) => {
    markDone = resolve;
  });
  const subscription = subscribeEvents(
    client.wsUrl(sessionId),
    {
      onEvent: (event) => {
        progress.handle(event);
        callbacks.onProgress?.(progress, event);
        if (event.stage === "done") markDone();
      },
    },
    wsCtor,
  );

  try {
    // the commit call emits the first events, so the socket must be
    // open before it fires; a dead socket only costs the grace period
    await Promise.race([subscription.ready, new Promise((r) => setTimeout(r, 2000))]);
    const committed = await client.commit(sessionId);
    callbacks.onCommitted?.(committed.interacted);
    const record = await client.propagate(sessionId);
    // the propagate response already proves completion, so do not hang
    // forever if the socket drops the trailing event
    await Promise.race([doneSeen, new Promise((r) => setTimeout(r, 5000))]);
    staged.clearAll();
    return record;
  } finally {
    subscription.close();
  }
}
