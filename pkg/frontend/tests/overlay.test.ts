import { describe, expect, it } from "vitest";

import {
  DEFAULT_INTRINSICS, TrajectoryTrace, focalPx, labelToWorld, projectFromCar,
  waypointPixels,
} from "../src/overlay.js";

describe("camera projection", () => {
  it("matches the shared intrinsics (90deg hfov -> 160 px focal)", () => {
    expect(focalPx(DEFAULT_INTRINSICS)).toBeCloseTo(160, 12);
  });

  it("puts a point on the forward axis at the principal point", () => {
    const p = projectFromCar({ x: 0, y: 0, psi: 0 }, DEFAULT_INTRINSICS,
                             10, 0, 1.2);
    expect(p.px).toBeCloseTo(160, 9);
    expect(p.py).toBeCloseTo(90, 9);
    expect(p.depth).toBeCloseTo(10, 12);
  });

  it("moves rightward offsets to the right half of the image", () => {
    // heading +x: rightward is -y
    const p = projectFromCar({ x: 0, y: 0, psi: 0 }, DEFAULT_INTRINSICS,
                             10, -2, 1.2);
    expect(p.px).toBeCloseTo(160 + (160 * 2) / 10, 9);
  });

  it("reports ground points below the horizon", () => {
    const p = projectFromCar({ x: 0, y: 0, psi: 0 }, DEFAULT_INTRINSICS,
                             10, 0, 0);
    expect(p.py).toBeGreaterThan(90);
  });
});

describe("waypoint overlay", () => {
  it("maps label offsets back to world coordinates", () => {
    // car at origin heading +x: h=+1 (rightward) is y=-1, v=+4 is x=+4
    const w = labelToWorld({ x: 0, y: 0, psi: 0 }, 1, 4);
    expect(w.x).toBeCloseTo(4, 12);
    expect(w.y).toBeCloseTo(-1, 12);
  });

  it("projects a straight-ahead label onto the image center line", () => {
    const pose = { x: 3, y: -2, psi: 0.7 };
    const pts = waypointPixels(pose, DEFAULT_INTRINSICS,
                               [0, 2, 0, 4, 0, 6, 0, 8]);
    expect(pts).toHaveLength(4);
    for (const p of pts) expect(p.px).toBeCloseTo(160, 6);
    // nearer waypoints sit lower in the image
    expect(pts[0].py).toBeGreaterThan(pts[3].py);
  });

  it("culls waypoints behind the camera", () => {
    const pts = waypointPixels({ x: 0, y: 0, psi: 0 }, DEFAULT_INTRINSICS,
                               [0, -2, 0, 4]);
    expect(pts).toHaveLength(1);
  });
});

describe("trajectory trace", () => {
  it("grows one point per pose and clears", () => {
    const trace = new TrajectoryTrace();
    for (let i = 0; i < 5; i++) trace.push({ x: i, y: 0, psi: 0 });
    expect(trace.length).toBe(5);
    trace.clear();
    expect(trace.length).toBe(0);
  });
});
