/** Single-page session UI: draw scribbles, commit, watch propagation.
 *
 * All segmentation state lives on the server; this page only stages
 * strokes locally, previews them with the shared rasterizer, and
 * renders mask PNGs the service returns.
 */

import { ApiError, Client, SessionInfo } from "./api.js";
import { decodeMaskRgbaToLabels, maskToRgba } from "./overlay.js";
import { cssColor } from "./palette.js";
import { PropagationProgress } from "./progress.js";
import { StagedScribbles } from "./staging.js";
import { canvasToFrame, CanvasStroke, rasterizeStrokes, StrokePoint, UNLABELED } from "./strokes.js";
import { ViewState } from "./view.js";
import { commitAndPropagate } from "./workflow.js";

function byId<T extends HTMLElement>(id: string): T {
  const el = document.getElementById(id);
  if (!el) throw new Error(`missing element #${id}`);
  return el as T;
}

const client = new Client("");

const setupPanel = byId<HTMLElement>("setup");
const workspace = byId<HTMLElement>("workspace");
const sceneSelect = byId<HTMLSelectElement>("scene-select");
const seedInput = byId<HTMLInputElement>("seed-input");
const objectsInput = byId<HTMLInputElement>("objects-input");
const createButton = byId<HTMLButtonElement>("create-button");
const sessionLabel = byId<HTMLElement>("session-label");
const frameImg = byId<HTMLImageElement>("frame-img");
const maskCanvas = byId<HTMLCanvasElement>("mask-canvas");
const previewCanvas = byId<HTMLCanvasElement>("preview-canvas");
const paletteBar = byId<HTMLElement>("palette-bar");
const radiusInput = byId<HTMLInputElement>("radius-input");
const radiusLabel = byId<HTMLElement>("radius-label");
const opacityInput = byId<HTMLInputElement>("opacity-input");
const undoButton = byId<HTMLButtonElement>("undo-button");
const clearButton = byId<HTMLButtonElement>("clear-button");
const propagateButton = byId<HTMLButtonElement>("propagate-button");
const timeline = byId<HTMLElement>("timeline");
const roundSelect = byId<HTMLSelectElement>("round-select");
const progressBar = byId<HTMLElement>("progress-bar");
const progressText = byId<HTMLElement>("progress-text");
const metricsPanel = byId<HTMLElement>("metrics");
const errorBox = byId<HTMLElement>("error-box");

let session: SessionInfo | null = null;
let view: ViewState | null = null;
const staged = new StagedScribbles();
let progress: PropagationProgress | null = null;
let drawing: StrokePoint[] | null = null;
let drawingObject = 0;

function showError(err: unknown): void {
  // server messages are shown word for word
  errorBox.textContent = err instanceof Error ? err.message : String(err);
  errorBox.hidden = errorBox.textContent === "";
}

function clearError(): void {
  errorBox.textContent = "";
  errorBox.hidden = true;
}

function displayScale(w: number, h: number): number {
  return Math.max(1, Math.floor(512 / Math.max(w, h)));
}

function renderPalette(): void {
  if (!session || !view) return;
  paletteBar.replaceChildren();
  for (let id = 0; id <= session.num_objects; id++) {
    const button = document.createElement("button");
    button.className = "palette-button";
    button.textContent = id === 0 ? "bg" : String(id);
    button.style.setProperty("--swatch", cssColor(id));
    if (view.activeObject === id) button.classList.add("active");
    button.addEventListener("click", () => {
      if (!view) return;
      view.activeObject = id;
      renderPalette();
    });
    paletteBar.appendChild(button);
  }
}

function renderTimeline(): void {
  if (!session || !view) return;
  timeline.replaceChildren();
  const stagedFrames = new Set(staged.framesWithStrokes());
  for (let t = 0; t < session.num_frames; t++) {
    const button = document.createElement("button");
    button.className = "frame-button";
    button.textContent = String(t);
    if (t === view.frame) button.classList.add("current");
    if (stagedFrames.has(t)) button.classList.add("staged");
    if (progress) button.classList.add(`status-${progress.frameStatus(t)}`);
    button.addEventListener("click", () => {
      if (!view) return;
      view.frame = t;
      refreshFrame();
    });
    timeline.appendChild(button);
  }
}

function renderRoundSelect(): void {
  if (!view) return;
  roundSelect.replaceChildren();
  if (view.completedRounds === 0) {
    const opt = document.createElement("option");
    opt.textContent = "no rounds yet";
    opt.value = "";
    roundSelect.appendChild(opt);
    roundSelect.disabled = true;
    return;
  }
  roundSelect.disabled = false;
  for (let r = 1; r <= view.completedRounds; r++) {
    const opt = document.createElement("option");
    opt.value = String(r);
    opt.textContent = `round ${r}`;
    if (view.shownRound === r) opt.selected = true;
    roundSelect.appendChild(opt);
  }
}

function paintPreview(): void {
  if (!session || !view) return;
  const ctx = previewCanvas.getContext("2d");
  if (!ctx) return;
  ctx.clearRect(0, 0, previewCanvas.width, previewCanvas.height);
  const strokes: CanvasStroke[] = [...staged.strokesFor(view.frame)];
  if (drawing && drawing.length > 0) {
    const pts = drawing.length > 1 ? drawing : [drawing[0], drawing[0]];
    strokes.push({ objectId: drawingObject, radius: Number(radiusInput.value), points: [...pts] });
  }
  if (strokes.length === 0) return;
  const labels = rasterizeStrokes(strokes, session.height, session.width);
  const image = ctx.createImageData(session.width, session.height);
  for (let i = 0; i < labels.length; i++) {
    const id = labels[i];
    if (id === UNLABELED) continue;
    const o = i * 4;
    if (id === 0) {
      // background strokes would be invisible in palette black
      image.data[o] = 255;
      image.data[o + 1] = 255;
      image.data[o + 2] = 255;
    } else {
      const css = cssColor(id).match(/\d+/g);
      if (css) {
        image.data[o] = Number(css[0]);
        image.data[o + 1] = Number(css[1]);
        image.data[o + 2] = Number(css[2]);
      }
    }
    image.data[o + 3] = 220;
  }
  ctx.putImageData(image, 0, 0);
}

async function paintMaskOverlay(): Promise<void> {
  if (!session || !view) return;
  const ctx = maskCanvas.getContext("2d");
  if (!ctx) return;
  ctx.clearRect(0, 0, maskCanvas.width, maskCanvas.height);
  if (view.shownRound === null) return;
  const url = client.maskUrl(session.id, view.frame, view.shownRound);
  const resp = await fetch(url);
  if (!resp.ok) return;
  const bitmap = await createImageBitmap(await resp.blob());
  const scratch = document.createElement("canvas");
  scratch.width = session.width;
  scratch.height = session.height;
  const sctx = scratch.getContext("2d");
  if (!sctx) return;
  sctx.drawImage(bitmap, 0, 0);
  const data = sctx.getImageData(0, 0, session.width, session.height).data;
  const labels = decodeMaskRgbaToLabels(data, session.width, session.height);
  const rgba = maskToRgba(labels, session.width, session.height, view.overlayOpacity);
  ctx.putImageData(new ImageData(rgba, session.width, session.height), 0, 0);
}

function refreshFrame(): void {
  if (!session || !view) return;
  frameImg.src = client.frameUrl(session.id, view.frame);
  renderTimeline();
  paintPreview();
  void paintMaskOverlay().catch(showError);
}

async function refreshMetrics(): Promise<void> {
  if (!session) return;
  if (!session.has_gt) {
    metricsPanel.textContent = "no ground truth attached";
    return;
  }
  try {
    const { rounds } = await client.metrics(session.id);
    if (rounds.length === 0) {
      metricsPanel.textContent = "metrics appear after the first round";
      return;
    }
    const table = document.createElement("table");
    const head = table.createTHead().insertRow();
    for (const label of ["round", "J", "F", "J&F", "wall ms"]) {
      const th = document.createElement("th");
      th.textContent = label;
      head.appendChild(th);
    }
    const tbody = table.createTBody();
    for (const r of rounds) {
      const row = tbody.insertRow();
      const cells = [
        String(r.round),
        r.mean_j.toFixed(4),
        r.mean_f.toFixed(4),
        r.mean_jf.toFixed(4),
        r.wall_ms.toFixed(0) + (r.over_budget ? " (over budget)" : ""),
      ];
      for (const text of cells) row.insertCell().textContent = text;
    }
    metricsPanel.replaceChildren(table);
  } catch (err) {
    if (err instanceof ApiError && err.status === 409) {
      metricsPanel.textContent = err.message;
    } else {
      showError(err);
    }
  }
}

function pointerToFrame(ev: PointerEvent): StrokePoint {
  if (!session) throw new Error("no session");
  const rect = previewCanvas.getBoundingClientRect();
  return canvasToFrame(
    ev.clientX - rect.left,
    ev.clientY - rect.top,
    rect.width,
    rect.height,
    session.width,
    session.height,
  );
}

previewCanvas.addEventListener("pointerdown", (ev) => {
  if (!session || !view) return;
  clearError();
  let id: number;
  try {
    id = view.requireActiveObject();
  } catch (err) {
    showError(err);
    return;
  }
  drawingObject = id;
  drawing = [pointerToFrame(ev)];
  previewCanvas.setPointerCapture(ev.pointerId);
  paintPreview();
});

previewCanvas.addEventListener("pointermove", (ev) => {
  if (!drawing) return;
  drawing.push(pointerToFrame(ev));
  paintPreview();
});

previewCanvas.addEventListener("pointerup", () => {
  if (!drawing || !view) return;
  const points = drawing.length > 1 ? drawing : [drawing[0], drawing[0]];
  staged.stage(view.frame, {
    objectId: drawingObject,
    radius: Number(radiusInput.value),
    points,
  });
  drawing = null;
  paintPreview();
  renderTimeline();
});

undoButton.addEventListener("click", () => {
  if (!view) return;
  staged.undo(view.frame);
  paintPreview();
  renderTimeline();
});

clearButton.addEventListener("click", () => {
  if (!view) return;
  staged.clearFrame(view.frame);
  paintPreview();
  renderTimeline();
});

radiusInput.addEventListener("input", () => {
  radiusLabel.textContent = Number(radiusInput.value).toFixed(1);
});

opacityInput.addEventListener("input", () => {
  if (!view) return;
  view.overlayOpacity = Number(opacityInput.value);
  void paintMaskOverlay().catch(showError);
});

roundSelect.addEventListener("change", () => {
  if (!view || roundSelect.value === "") return;
  view.shownRound = Number(roundSelect.value);
  void paintMaskOverlay().catch(showError);
});

propagateButton.addEventListener("click", () => {
  void runRound();
});

async function runRound(): Promise<void> {
  if (!session || !view) return;
  clearError();
  propagateButton.disabled = true;
  try {
    progress = null;
    const record = await commitAndPropagate(
      client,
      session.id,
      staged,
      session.current_round,
      session.num_frames,
      {
        onProgress: (p) => {
          progress = p;
          progressBar.style.width = `${(p.fraction * 100).toFixed(1)}%`;
          const c = p.counts();
          progressText.textContent = p.done
            ? "round complete"
            : `propagating: ${c.truncated + c.repropagated}/${2 * p.expected}`;
          renderTimeline();
        },
      },
    );
    session = await client.getState(session.id);
    view.roundCompleted(record.round);
    progress = null;
    progressBar.style.width = "100%";
    progressText.textContent = `round ${record.round} complete`;
    renderRoundSelect();
    refreshFrame();
    await refreshMetrics();
  } catch (err) {
    showError(err);
  } finally {
    propagateButton.disabled = false;
  }
}

createButton.addEventListener("click", () => {
  void createSession();
});

async function createSession(): Promise<void> {
  clearError();
  createButton.disabled = true;
  try {
    const body = {
      source: {
        type: "generated",
        name: sceneSelect.value,
        seed: Number(seedInput.value),
      },
      num_objects: Number(objectsInput.value),
      attach_gt: true,
    };
    session = await client.createSession(body);
    view = new ViewState(session.num_frames, session.num_objects);
    view.activeObject = 1;
    staged.clearAll();
    progress = null;
    const scale = displayScale(session.width, session.height);
    for (const el of [frameImg, maskCanvas, previewCanvas]) {
      el.style.width = `${session.width * scale}px`;
      el.style.height = `${session.height * scale}px`;
    }
    maskCanvas.width = session.width;
    maskCanvas.height = session.height;
    previewCanvas.width = session.width;
    previewCanvas.height = session.height;
    sessionLabel.textContent =
      `session ${session.id}: ${session.num_frames} frames, ` +
      `${session.width}x${session.height}, ${session.num_objects} objects`;
    setupPanel.hidden = true;
    workspace.hidden = false;
    renderPalette();
    renderRoundSelect();
    refreshFrame();
    await refreshMetrics();
  } catch (err) {
    showError(err);
  } finally {
    createButton.disabled = false;
  }
}
