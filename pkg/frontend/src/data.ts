// Verbatim extraction of drawable values from service payloads.
//
// The UI computes no metrics: chart values, spike positions and dot
// opacities are passed through exactly as served.

import type { MonitorPayload, TrajectoryPoint } from "./types.js";

export interface ChartData {
  benign: (number | null)[];
  adversarial: (number | null)[];
}

export function chartSeries(payload: MonitorPayload): ChartData {
  return {
    benign: payload.benign_series.values,
    adversarial: payload.adversarial_series.values,
  };
}

export function spikeMarkers(payload: MonitorPayload): number[] {
  return payload.spikes.flagged_transitions;
}

export function segmentRanges(payload: MonitorPayload): [number, number][] {
  return payload.segments.map((s) => [s.start, s.end]);
}

export interface Dot {
  x: number;
  y: number;
  alpha: number;
}

export function trajectoryDots(points: TrajectoryPoint[]): Dot[] {
  return points.map((p) => ({ x: p.x, y: p.y, alpha: p.alpha }));
}

export function predictionLine(payload: MonitorPayload): string {
  const b = payload.benign_prediction;
  const a = payload.adversarial_prediction;
  const pb = b.probabilities[b.predicted].toFixed(2);
  const pa = a.probabilities[a.predicted].toFixed(2);
  return `benign: ${b.predicted_label} (${pb})  |  adversarial: ${a.predicted_label} (${pa})`;
}
