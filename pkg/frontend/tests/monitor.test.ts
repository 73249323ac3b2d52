// The monitor view computes nothing: every drawable value must be verbatim
// from the recorded service response.

import { describe, expect, it } from "vitest";

import { chartSeries, predictionLine, segmentRanges, spikeMarkers } from "../src/data.js";
import type { MonitorPayload } from "../src/types.js";
import monitorFixture from "./fixtures/monitor.json";

const monitor = monitorFixture as unknown as MonitorPayload;

describe("chart data passthrough", () => {
  it("series values equal the recorded payload verbatim", () => {
    const series = chartSeries(monitor);
    expect(series.benign).toEqual(monitor.benign_series.values);
    expect(series.adversarial).toEqual(monitor.adversarial_series.values);
    expect(series.benign).toHaveLength(monitor.frame_count - 1);
    expect(series.adversarial).toHaveLength(monitor.frame_count - 1);
  });

  it("spike markers equal the recorded flag list verbatim", () => {
    expect(spikeMarkers(monitor)).toEqual(monitor.spikes.flagged_transitions);
  });

  it("the recorded demo spikes include an attacked transition", () => {
    expect(monitor.spikes.flagged_transitions.some((t) => t >= 10 && t <= 14)).toBe(true);
  });

  it("segment ranges tile the clip", () => {
    const ranges = segmentRanges(monitor);
    expect(ranges[0][0]).toBe(0);
    expect(ranges[ranges.length - 1][1]).toBe(monitor.frame_count);
    for (let i = 1; i < ranges.length; i++) {
      expect(ranges[i][0]).toBe(ranges[i - 1][1]);
    }
  });

  it("gaps stay null (chart breaks, not zeros)", () => {
    const withGap: MonitorPayload = {
      ...monitor,
      benign_series: { ...monitor.benign_series, values: [0.1, null, 0.3] },
    };
    expect(chartSeries(withGap).benign).toEqual([0.1, null, 0.3]);
  });
});

describe("prediction banner", () => {
  it("shows both labels from the payload", () => {
    const line = predictionLine(monitor);
    expect(line).toContain(monitor.benign_prediction.predicted_label);
    expect(line).toContain(monitor.adversarial_prediction.predicted_label);
  });

  it("the recorded demo flips lunge to exercising with exercise ball", () => {
    expect(monitor.benign_prediction.predicted_label).toBe("lunge");
    expect(monitor.adversarial_prediction.predicted_label).toBe("exercising with exercise ball");
  });
});
