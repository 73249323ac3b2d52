// Bootstrap and wiring: fetch payloads, hold the UiState, render the three
// coordinated views, and drive the playback timer. Stale responses are
// discarded via a request token so rapid scrubbing never paints old frames.

import { ApiClient } from "./api.js";
import { chartSeries, predictionLine, spikeMarkers, trajectoryDots } from "./data.js";
import { chartScales, drawSeries, drawSkeleton, drawTrajectory, FrameGeometry } from "./draw.js";
import {
  initialState,
  overlapFrame,
  segmentCount,
  selectJoint,
  selectSegment,
  separateRange,
  transport,
  TransportAction,
  UiState,
} from "./state.js";
import type { MonitorPayload, SessionDoc, Variant } from "./types.js";

const BENIGN_COLOR = "#2e9e4f";
const ADVERSARIAL_COLOR = "#e04444";
const CANVAS_EDGE = 352;

const api = new ApiClient();

function el<T extends HTMLElement>(id: string): T {
  const node = document.getElementById(id);
  if (!node) throw new Error(`missing element #${id}`);
  return node as T;
}

function canvasCtx(id: string): CanvasRenderingContext2D {
  const ctx = el<HTMLCanvasElement>(id).getContext("2d");
  if (!ctx) throw new Error(`no 2d context for #${id}`);
  ctx.imageSmoothingEnabled = false;
  return ctx;
}

interface App {
  state: UiState;
  session: SessionDoc;
  monitor: MonitorPayload | null;
  overlapToken: number;
  trajectoryToken: number;
  timer: number | null;
}

async function loadImage(url: string): Promise<HTMLImageElement> {
  return new Promise((resolve, reject) => {
    const img = new Image();
    img.onload = () => resolve(img);
    img.onerror = () => reject(new Error(`cannot load ${url}`));
    img.src = url;
  });
}

function geometry(session: SessionDoc): FrameGeometry {
  const scale = CANVAS_EDGE / Math.max(session.width, session.height);
  return { width: session.width, height: session.height, scale };
}

function showError(message: string): void {
  const banner = el<HTMLDivElement>("error-banner");
  banner.textContent = message;
  banner.style.display = message ? "block" : "none";
}

// --- overlap view -------------------------------------------------------------

async function renderOverlap(app: App): Promise<void> {
  const ctx = canvasCtx("overlap-canvas");
  const geo = geometry(app.session);
  const t = overlapFrame(app.state);
  el<HTMLSpanElement>("overlap-frame-label").textContent = `frame ${t}`;
  const token = ++app.overlapToken;
  if (!app.session.has_adversarial) {
    ctx.fillStyle = "#202020";
    ctx.fillRect(0, 0, CANVAS_EDGE, CANVAS_EDGE);
    el<HTMLDivElement>("attack-prompt").style.display = "block";
    return;
  }
  el<HTMLDivElement>("attack-prompt").style.display = "none";
  try {
    const [payload, image] = await Promise.all([
      api.getOverlap(app.state.clipId, t),
      loadImage(api.frameUrl(app.state.clipId, t, payloadVariant(app))),
    ]);
    if (token !== app.overlapToken) return; // superseded by a newer frame
    ctx.clearRect(0, 0, CANVAS_EDGE, CANVAS_EDGE);
    ctx.drawImage(image, 0, 0, geo.width * geo.scale, geo.height * geo.scale);
    drawSkeleton(ctx, payload.benign_pose, geo, BENIGN_COLOR);
    drawSkeleton(ctx, payload.adversarial_pose, geo, ADVERSARIAL_COLOR);
  } catch (err) {
    showError(String(err));
  }
}

function payloadVariant(app: App): Variant {
  // the overlap backdrop is the attacked frame; detections are drawn over it
  return app.session.has_adversarial ? "adversarial" : "benign";
}

// --- separate view --------------------------------------------------------------

async function renderSeparate(app: App): Promise<void> {
  const [from, to] = separateRange(app.state);
  el<HTMLSpanElement>("separate-range-label").textContent =
    `frames [${from}, ${to}) - ${app.session.joint_names[app.state.selectedJoint]}`;
  const token = ++app.trajectoryToken;
  const geo = geometry(app.session);
  const variants: { variant: Variant; canvas: string }[] = [
    { variant: "benign", canvas: "separate-benign" },
    { variant: "adversarial", canvas: "separate-adv" },
  ];
  for (const { variant, canvas } of variants) {
    const ctx = canvasCtx(canvas);
    ctx.fillStyle = "#181818";
    ctx.fillRect(0, 0, CANVAS_EDGE, CANVAS_EDGE / 2 + 60);
    if (variant === "adversarial" && !app.session.has_adversarial) continue;
    try {
      if (el<HTMLInputElement>("show-frame-toggle").checked) {
        const middle = Math.floor((from + to) / 2);
        const img = await loadImage(api.frameUrl(app.state.clipId, middle, variant));
        if (token !== app.trajectoryToken) return;
        ctx.globalAlpha = 0.35;
        ctx.drawImage(img, 0, 0, geo.width * geo.scale, geo.height * geo.scale);
        ctx.globalAlpha = 1;
      }
      const points = await api.getTrajectory(
        app.state.clipId, app.state.selectedJoint, from, to, variant,
      );
      if (token !== app.trajectoryToken) return;
      // dot opacities come straight from the payload's alpha ramp
      drawTrajectory(ctx, trajectoryDots(points), geo,
        variant === "benign" ? BENIGN_COLOR : ADVERSARIAL_COLOR);
    } catch (err) {
      showError(String(err));
    }
  }
}

// --- monitor view ---------------------------------------------------------------

function renderMonitorChart(app: App): void {
  const ctx = canvasCtx("monitor-chart");
  const width = el<HTMLCanvasElement>("monitor-chart").width;
  const height = el<HTMLCanvasElement>("monitor-chart").height;
  ctx.fillStyle = "#181818";
  ctx.fillRect(0, 0, width, height);
  if (!app.monitor) {
    ctx.fillStyle = "#888";
    ctx.fillText("attack not run - no monitor data", 16, 24);
    return;
  }
  const series = chartSeries(app.monitor);
  const defined = [...series.benign, ...series.adversarial].filter((v): v is number => v !== null);
  const maxValue = defined.length ? Math.max(...defined) : 1;
  const layout = { width, height, padLeft: 34, padBottom: 18, padTop: 8 };
  const scales = chartScales(layout, series.adversarial.length, maxValue);

  // selected segment shading: transitions wholly inside [start, end)
  const [s0, s1] = separateRange(app.state);
  ctx.fillStyle = "rgba(120, 120, 220, 0.18)";
  ctx.fillRect(scales.x(s0), layout.padTop, scales.x(Math.max(s1 - 2, s0)) - scales.x(s0),
    height - layout.padTop - layout.padBottom);

  // spike markers straight from the payload
  ctx.strokeStyle = "#d8c24a";
  for (const t of spikeMarkers(app.monitor)) {
    ctx.beginPath();
    ctx.moveTo(scales.x(t), layout.padTop);
    ctx.lineTo(scales.x(t), height - layout.padBottom);
    ctx.stroke();
  }

  drawSeries(ctx, series.benign, scales, BENIGN_COLOR);
  drawSeries(ctx, series.adversarial, scales, ADVERSARIAL_COLOR);

  // current frame cursor
  ctx.strokeStyle = "#eee";
  ctx.beginPath();
  ctx.moveTo(scales.x(Math.min(app.state.t, series.adversarial.length - 1)), layout.padTop);
  ctx.lineTo(scales.x(Math.min(app.state.t, series.adversarial.length - 1)), height - layout.padBottom);
  ctx.stroke();

  // axis hints
  ctx.fillStyle = "#aaa";
  ctx.fillText(maxValue.toFixed(2), 2, layout.padTop + 8);
  ctx.fillText("0", 2, height - layout.padBottom);
  ctx.fillText("transition", width / 2 - 20, height - 4);
}

function renderThumbnails(app: App): void {
  const strip = el<HTMLDivElement>("thumb-strip");
  strip.innerHTML = "";
  const count = segmentCount(app.state.frameCount, app.state.window);
  for (let i = 0; i < count; i++) {
    const img = document.createElement("img");
    img.src = api.thumbUrl(app.state.clipId, i);
    img.className = i === app.state.segment ? "thumb selected" : "thumb";
    img.title = `segment ${i}`;
    img.addEventListener("click", () => update(app, selectSegment(app.state, i)));
    strip.appendChild(img);
  }
}

function renderPredictions(app: App): void {
  const node = el<HTMLDivElement>("prediction-line");
  if (app.monitor) {
    node.textContent = predictionLine(app.monitor);
  } else if (app.session.benign_prediction) {
    node.textContent = `benign: ${app.session.benign_prediction.predicted_label}`;
  } else {
    node.textContent = "no predictions yet";
  }
}

// --- transport and wiring -------------------------------------------------------

function renderTransport(app: App): void {
  const slider = el<HTMLInputElement>("frame-slider");
  slider.max = String(app.state.frameCount - 1);
  slider.value = String(app.state.t);
  el<HTMLButtonElement>("btn-play").textContent = app.state.playing ? "Pause" : "Play";
  el<HTMLSpanElement>("frame-label").textContent =
    `${app.state.t} / ${app.state.frameCount - 1} (segment ${app.state.segment})`;
}

function render(app: App): void {
  renderTransport(app);
  renderThumbnails(app);
  renderMonitorChart(app);
  renderPredictions(app);
  void renderOverlap(app);
  void renderSeparate(app);
}

function update(app: App, next: UiState): void {
  const prev = app.state;
  app.state = next;
  if (next.playing && app.timer === null) {
    const interval = 1000 / (next.fps * next.playbackRate);
    app.timer = window.setInterval(() => dispatch(app, { kind: "tick" }), interval);
  }
  if (!next.playing && app.timer !== null) {
    window.clearInterval(app.timer);
    app.timer = null;
  }
  if (prev === next) return;
  render(app);
}

function dispatch(app: App, action: TransportAction): void {
  update(app, transport(app.state, action));
}

async function refreshMonitor(app: App): Promise<void> {
  try {
    app.monitor = await api.getMonitor(app.state.clipId);
  } catch {
    app.monitor = null; // benign-only session: chart shows its empty state
  }
}

async function runAttack(app: App): Promise<void> {
  try {
    const { job_id } = await api.startAttack(app.state.clipId, 0.03);
    const poll = window.setInterval(async () => {
      const job = await api.getJob(job_id);
      if (job.status === "done" || job.status === "failed") {
        window.clearInterval(poll);
        if (job.status === "failed") showError(`attack failed: ${job.error}`);
        app.session = await api.getSession(app.state.clipId);
        await refreshMonitor(app);
        render(app);
      }
    }, 250);
  } catch (err) {
    showError(String(err));
  }
}

async function boot(): Promise<void> {
  const clips = await api.listClips();
  if (!clips.length) {
    showError("no clips in the data root; run `skelespector demo` first");
    return;
  }
  const params = new URLSearchParams(window.location.search);
  const clipId = params.get("clip") ?? clips[0].clip_id;
  const session = await api.getSession(clipId);
  const app: App = {
    state: initialState({ clipId, frameCount: session.frame_count, fps: session.fps }),
    session,
    monitor: null,
    overlapToken: 0,
    trajectoryToken: 0,
    timer: null,
  };
  await refreshMonitor(app);

  const joints = el<HTMLSelectElement>("joint-picker");
  session.joint_names.forEach((name, i) => {
    const option = document.createElement("option");
    option.value = String(i);
    option.textContent = name;
    joints.appendChild(option);
  });
  joints.value = String(app.state.selectedJoint);
  joints.addEventListener("change", () => update(app, selectJoint(app.state, Number(joints.value))));

  el<HTMLButtonElement>("btn-play").addEventListener("click", () => dispatch(app, { kind: "play" }));
  el<HTMLButtonElement>("btn-step-fwd").addEventListener("click", () => dispatch(app, { kind: "step_fwd" }));
  el<HTMLButtonElement>("btn-step-back").addEventListener("click", () => dispatch(app, { kind: "step_back" }));
  el<HTMLButtonElement>("btn-fast-fwd").addEventListener("click", () => dispatch(app, { kind: "fast_fwd" }));
  el<HTMLButtonElement>("btn-fast-back").addEventListener("click", () => dispatch(app, { kind: "fast_back" }));
  el<HTMLInputElement>("frame-slider").addEventListener("input", (event) => {
    dispatch(app, { kind: "slider", t: Number((event.target as HTMLInputElement).value) });
  });
  el<HTMLInputElement>("show-frame-toggle").addEventListener("change", () => render(app));
  el<HTMLButtonElement>("btn-run-attack").addEventListener("click", () => void runAttack(app));

  render(app);
}

void boot();
