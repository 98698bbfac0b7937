/** Deviation scoring, same algorithm and output fields as the simulator's
 * scorer so a cockpit session and a CLI replay of its log agree exactly. */

export const BIN_SIZE = 0.05;
export const HISTOGRAM_MAX = 2.0;
export const N_BINS = Math.round(HISTOGRAM_MAX / BIN_SIZE); // 40
export const CRITICAL_DEVIATION = 1.0;

export interface DriveScore {
  mean_deviation_m: number;
  max_deviation_m: number;
  frac_within_25cm: number;
  frac_within_50cm: number;
  frac_within_1m: number;
  critical_exit: boolean;
  n_frames: number;
  histogram_bin_m: number;
  cumulative_histogram: number[];
}

export function scoreDeviations(deviations: number[]): DriveScore {
  if (deviations.length === 0)
    throw new Error("cannot score an empty deviation series");
  const n = deviations.length;
  const cum: number[] = [];
  for (let i = 0; i < N_BINS; i++) {
    const edge = BIN_SIZE * (i + 1);
    let hits = 0;
    for (const d of deviations) if (d <= edge + 1e-12) hits += 1;
    cum.push(hits / n);
  }
  const within = (lim: number) => {
    let hits = 0;
    for (const d of deviations) if (d <= lim + 1e-12) hits += 1;
    return hits / n;
  };
  // sum in series order so the float64 result matches the reference scorer
  let sum = 0;
  let max = -Infinity;
  for (const d of deviations) {
    sum += d;
    if (d > max) max = d;
  }
  return {
    mean_deviation_m: sum / n,
    max_deviation_m: max,
    frac_within_25cm: within(0.25),
    frac_within_50cm: within(0.5),
    frac_within_1m: within(1.0),
    critical_exit: deviations.some((d) => d > CRITICAL_DEVIATION),
    n_frames: n,
    histogram_bin_m: BIN_SIZE,
    cumulative_histogram: cum,
  };
}
