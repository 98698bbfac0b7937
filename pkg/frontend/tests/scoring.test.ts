import { describe, expect, it } from "vitest";

import { N_BINS, scoreDeviations } from "../src/scoring.js";

describe("deviation scoring", () => {
  it("matches hand-computed values on a small series", () => {
    const s = scoreDeviations([0.0, 0.1, 0.3, 0.6, 1.2]);
    expect(s.n_frames).toBe(5);
    expect(s.mean_deviation_m).toBeCloseTo(0.44, 12);
    expect(s.max_deviation_m).toBe(1.2);
    expect(s.frac_within_25cm).toBe(2 / 5);
    expect(s.frac_within_50cm).toBe(3 / 5);
    expect(s.frac_within_1m).toBe(4 / 5);
    expect(s.critical_exit).toBe(true);
    expect(s.cumulative_histogram).toHaveLength(N_BINS);
    // 5 cm cumulative bins: 0.0 -> bin 0, 0.1 -> bin 1 (edge 0.10), ...
    expect(s.cumulative_histogram[0]).toBe(1 / 5);
    expect(s.cumulative_histogram[1]).toBe(2 / 5);
    expect(s.cumulative_histogram[N_BINS - 1]).toBe(1.0);
  });

  it("counts values on a bin edge as inside the bin", () => {
    const s = scoreDeviations([0.05, 0.25]);
    expect(s.cumulative_histogram[0]).toBe(0.5);
    expect(s.frac_within_25cm).toBe(1.0);
  });

  it("refuses an empty series", () => {
    expect(() => scoreDeviations([])).toThrowError(/empty/);
  });

  it("is monotone in the cumulative histogram", () => {
    const devs = Array.from({ length: 500 },
                            (_, i) => ((i * 7919) % 1000) / 400);
    const s = scoreDeviations(devs);
    for (let i = 1; i < s.cumulative_histogram.length; i++) {
      expect(s.cumulative_histogram[i])
        .toBeGreaterThanOrEqual(s.cumulative_histogram[i - 1]);
    }
  });
});
