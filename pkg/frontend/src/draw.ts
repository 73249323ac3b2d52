// Canvas rendering for the three views. The functions take the 2D context
// plus a pixel scale so callers own canvas sizing; out-of-frame joints are
// clamped to the edge and drawn with a distinct marker.

import type { Dot } from "./data.js";
import type { PoseTriples } from "./types.js";

export const SKELETON_EDGES: [number, number][] = [
  [0, 1], [0, 2], [1, 3], [2, 4],
  [5, 6], [5, 7], [7, 9], [6, 8], [8, 10],
  [5, 11], [6, 12], [11, 12],
  [11, 13], [13, 15], [12, 14], [14, 16],
];

export interface FrameGeometry {
  width: number; // frame pixels
  height: number;
  scale: number; // canvas pixels per frame pixel
}

function clampToFrame(v: number, limit: number): { value: number; clamped: boolean } {
  if (v < 0) return { value: 0, clamped: true };
  if (v > limit) return { value: limit, clamped: true };
  return { value: v, clamped: false };
}

export function drawSkeleton(
  ctx: CanvasRenderingContext2D,
  pose: PoseTriples,
  geo: FrameGeometry,
  color: string,
): void {
  const placed = pose.map(([x, y]) => {
    const px = clampToFrame(x, geo.width - 1);
    const py = clampToFrame(y, geo.height - 1);
    return { x: px.value * geo.scale, y: py.value * geo.scale, offFrame: px.clamped || py.clamped };
  });

  ctx.strokeStyle = color;
  ctx.lineWidth = 2;
  for (const [a, b] of SKELETON_EDGES) {
    ctx.beginPath();
    ctx.moveTo(placed[a].x, placed[a].y);
    ctx.lineTo(placed[b].x, placed[b].y);
    ctx.stroke();
  }
  ctx.fillStyle = color;
  for (const p of placed) {
    if (p.offFrame) {
      // off-frame detections sit on the canvas edge as hollow squares
      ctx.strokeRect(p.x - 4, p.y - 4, 8, 8);
    } else {
      ctx.beginPath();
      ctx.arc(p.x, p.y, 3, 0, Math.PI * 2);
      ctx.fill();
    }
  }
}

export function drawTrajectory(
  ctx: CanvasRenderingContext2D,
  dots: Dot[],
  geo: FrameGeometry,
  color: string,
): void {
  for (const dot of dots) {
    const x = clampToFrame(dot.x, geo.width - 1).value * geo.scale;
    const y = clampToFrame(dot.y, geo.height - 1).value * geo.scale;
    ctx.globalAlpha = dot.alpha;
    ctx.fillStyle = color;
    ctx.beginPath();
    ctx.arc(x, y, 4, 0, Math.PI * 2);
    ctx.fill();
  }
  ctx.globalAlpha = 1;
}

export interface ChartLayout {
  width: number;
  height: number;
  padLeft: number;
  padBottom: number;
  padTop: number;
}

export function chartScales(
  layout: ChartLayout,
  transitions: number,
  maxValue: number,
): { x: (t: number) => number; y: (v: number) => number } {
  const innerW = layout.width - layout.padLeft - 8;
  const innerH = layout.height - layout.padTop - layout.padBottom;
  const span = Math.max(transitions - 1, 1);
  const top = maxValue > 0 ? maxValue : 1;
  return {
    x: (t) => layout.padLeft + (t / span) * innerW,
    y: (v) => layout.padTop + innerH - (v / top) * innerH,
  };
}

export function drawSeries(
  ctx: CanvasRenderingContext2D,
  values: (number | null)[],
  scales: { x: (t: number) => number; y: (v: number) => number },
  color: string,
): void {
  ctx.strokeStyle = color;
  ctx.lineWidth = 1.5;
  let open = false;
  ctx.beginPath();
  values.forEach((v, t) => {
    if (v === null) {
      open = false; // gaps break the line
      return;
    }
    if (open) {
      ctx.lineTo(scales.x(t), scales.y(v));
    } else {
      ctx.moveTo(scales.x(t), scales.y(v));
      open = true;
    }
  });
  ctx.stroke();
}
