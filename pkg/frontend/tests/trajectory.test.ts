// First-load separate view: the default joint is the left ankle and the dot
// opacities are the payload's alpha ramp, ending fully opaque.

import { describe, expect, it } from "vitest";

import { trajectoryDots } from "../src/data.js";
import { DEFAULT_JOINT } from "../src/state.js";
import type { TrajectoryPoint } from "../src/types.js";
import session from "./fixtures/session.json";
import benignFixture from "./fixtures/trajectory_left_ankle_benign.json";
import advFixture from "./fixtures/trajectory_left_ankle_adv.json";

const benign = benignFixture as TrajectoryPoint[];
const adversarial = advFixture as TrajectoryPoint[];

describe("first-load trajectory", () => {
  it("the default joint is the recorded left_ankle trajectory", () => {
    expect(session.joint_names[DEFAULT_JOINT]).toBe("left_ankle");
    expect(benign).toHaveLength(session.frame_count);
  });

  it.each([
    ["benign", benign],
    ["adversarial", adversarial],
  ])("%s dot opacities increase monotonically and end at alpha = 1", (_name, points) => {
    const dots = trajectoryDots(points);
    for (let i = 1; i < dots.length; i++) {
      expect(dots[i].alpha).toBeGreaterThan(dots[i - 1].alpha);
    }
    expect(dots[dots.length - 1].alpha).toBe(1.0);
    expect(dots[0].alpha).toBeGreaterThan(0);
  });

  it("dots pass coordinates and alphas through verbatim", () => {
    const dots = trajectoryDots(adversarial);
    dots.forEach((dot, i) => {
      expect(dot.x).toBe(adversarial[i].x);
      expect(dot.y).toBe(adversarial[i].y);
      expect(dot.alpha).toBe(adversarial[i].alpha);
    });
  });

  it("the attacked ankle leaves the benign track (recorded fixture)", () => {
    const deviations = adversarial.map((p, i) => Math.abs(p.x - benign[i].x));
    expect(Math.max(...deviations)).toBeGreaterThan(10);
  });
});
