"""Deviation scoring against the ideal pathway: mean Euclidean deviation,
5 cm cumulative histogram, and the +-1 m critical-region flag."""

from __future__ import annotations

from dataclasses import dataclass, field

BIN_SIZE = 0.05
HISTOGRAM_MAX = 2.0
N_BINS = int(round(HISTOGRAM_MAX / BIN_SIZE))  # 40 bins, upper edges 0.05..2.0
CRITICAL_DEVIATION = 1.0


@dataclass(frozen=True)
class DriveScore:
    mean_deviation: float
    max_deviation: float
    cumulative_histogram: tuple  # fraction of frames with deviation <= bin edge
    frac_within_25cm: float
    frac_within_50cm: float
    frac_within_1m: float
    critical_exit: bool
    n_frames: int
    bin_edges: tuple = field(default=tuple(
        round(BIN_SIZE * (i + 1), 10) for i in range(N_BINS)))

    def to_dict(self) -> dict:
        return {
            "mean_deviation_m": self.mean_deviation,
            "max_deviation_m": self.max_deviation,
            "frac_within_25cm": self.frac_within_25cm,
            "frac_within_50cm": self.frac_within_50cm,
            "frac_within_1m": self.frac_within_1m,
            "critical_exit": self.critical_exit,
            "n_frames": self.n_frames,
            "histogram_bin_m": BIN_SIZE,
            "cumulative_histogram": list(self.cumulative_histogram),
        }


def score_deviations(deviations) -> DriveScore:
    """Score a per-frame deviation series (meters)."""
    devs = list(deviations)
    if not devs:
        raise ValueError("cannot score an empty deviation series")
    n = len(devs)
    cum = []
    for i in range(N_BINS):
        edge = BIN_SIZE * (i + 1)
        cum.append(sum(1 for d in devs if d <= edge + 1e-12) / n)
    within = lambda lim: sum(1 for d in devs if d <= lim + 1e-12) / n
    return DriveScore(
        mean_deviation=sum(devs) / n,
        max_deviation=max(devs),
        cumulative_histogram=tuple(cum),
        frac_within_25cm=within(0.25),
        frac_within_50cm=within(0.50),
        frac_within_1m=within(1.0),
        critical_exit=any(d > CRITICAL_DEVIATION for d in devs),
        n_frames=n,
    )


def score_drive(log, path) -> DriveScore:
    """Score a SimLog against a pathway (Chain or OffsetPath): per-frame
    distance from the car position to the nearest path point."""
    records = log.records if hasattr(log, "records") else list(log)
    if not records:
        raise ValueError("cannot score an empty log")
    devs = []
    for rec in records:
        car = rec["car"]
        _, d = path.project(car["x"], car["y"])
        devs.append(d)
    return score_deviations(devs)
