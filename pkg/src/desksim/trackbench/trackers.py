"""Built-in reference trackers and the latest-frame delivery machinery.

A tracker consumes rendered frames (plus ground-truth metadata for the
white-box kinds) and emits at most one bounding box per consumed frame. A
processing latency in seconds models slow trackers: while busy, new frames
pile into a single-slot mailbox and only the newest survives."""

from __future__ import annotations

import numpy as np

from ..core import SeededRng
from ..render import BBox, Frame, gt_bbox


class FrameMailbox:
    """Single-slot, latest-wins frame channel with consume-at-most-once
    semantics: a slow consumer sees a strict subsequence, always the newest
    item at read time."""

    def __init__(self):
        self._slot = None

    def put(self, item) -> None:
        self._slot = item

    def take(self):
        item, self._slot = self._slot, None
        return item

    def peek_available(self) -> bool:
        return self._slot is not None


class Tracker:
    """Base tracker: zero latency, must be initialized before update."""

    latency = 0.0

    def init(self, frame: Frame, box: BBox) -> None:
        self._initialized = True

    def update(self, frame: Frame, true_box: BBox | None) -> BBox | None:
        raise NotImplementedError


class GroundTruthTracker(Tracker):
    """Echoes the true box; the servo-tuning reference."""

    def update(self, frame, true_box):
        return true_box


class DelayedTracker(Tracker):
    """Ground truth computed with a fixed processing latency, so the box the
    loop applies is always stale by at least that latency."""

    def __init__(self, latency_ms: float):
        self.latency = latency_ms / 1000.0

    def update(self, frame, true_box):
        return true_box


class NoisyTracker(Tracker):
    """Ground truth corrupted by seeded isotropic Gaussian center jitter."""

    def __init__(self, sigma_px: float, seed: int = 0):
        self.sigma = float(sigma_px)
        self.rng = SeededRng(seed)

    def update(self, frame, true_box):
        if true_box is None:
            return None
        dx = self.rng.normal(0.0, self.sigma)
        dy = self.rng.normal(0.0, self.sigma)
        return BBox(true_box.x + dx, true_box.y + dy, true_box.w, true_box.h)


def _gray(rgb: np.ndarray) -> np.ndarray:
    return rgb.astype(np.float64).mean(axis=2)


class NccTemplateTracker(Tracker):
    """Normalized cross-correlation template tracker: template captured at
    init, searched in a window around the last center, no model update."""

    def __init__(self, window_px: int = 48):
        self.window = int(window_px)
        self.template = None
        self.size = None
        self.center = None

    def init(self, frame: Frame, box: BBox) -> None:
        g = _gray(frame.rgb)
        x0, y0 = int(round(box.x)), int(round(box.y))
        w, h = max(2, int(round(box.w))), max(2, int(round(box.h)))
        x0 = max(0, min(x0, g.shape[1] - w))
        y0 = max(0, min(y0, g.shape[0] - h))
        self.template = g[y0:y0 + h, x0:x0 + w].copy()
        self.template -= self.template.mean()
        self.size = (w, h)
        self.center = (x0 + w / 2.0, y0 + h / 2.0)

    def update(self, frame, true_box=None):
        if self.template is None:
            raise RuntimeError("tracker not initialized")
        g = _gray(frame.rgb)
        H, W = g.shape
        w, h = self.size
        cx, cy = self.center
        x_lo = max(0, int(cx - w / 2) - self.window)
        x_hi = min(W - w, int(cx - w / 2) + self.window)
        y_lo = max(0, int(cy - h / 2) - self.window)
        y_hi = min(H - h, int(cy - h / 2) + self.window)
        if x_hi < x_lo or y_hi < y_lo:
            return None
        t = self.template
        t_norm = np.sqrt((t * t).sum()) + 1e-12
        best, best_xy = -2.0, None
        for y in range(y_lo, y_hi + 1):
            strip = g[y:y + h]
            for x in range(x_lo, x_hi + 1):
                patch = strip[:, x:x + w]
                p = patch - patch.mean()
                denom = np.sqrt((p * p).sum()) * t_norm + 1e-12
                score = float((p * t).sum()) / denom
                if score > best:
                    best, best_xy = score, (x, y)
        if best_xy is None:
            return None
        x, y = best_xy
        self.center = (x + w / 2.0, y + h / 2.0)
        return BBox(float(x), float(y), float(w), float(h))


class TrackerSession:
    """Virtual-time scheduler coupling a tracker to the frame stream.

    Frames are offered every frame; the tracker consumes the newest mailbox
    frame whenever idle, and its result becomes visible `latency` seconds
    after consumption (zero-order hold in between)."""

    def __init__(self, tracker: Tracker):
        self.tracker = tracker
        self.mailbox = FrameMailbox()
        self._pending = None  # (ready_time, result)
        self.latest = None
        self.latest_time = None
        self.consumed_frames: list = []

    def offer(self, t: float, frame: Frame, true_box: BBox | None,
              frame_index: int) -> None:
        self.mailbox.put((t, frame, true_box, frame_index))

    def poll(self, t: float) -> BBox | None:
        """Advance the session to sim time t; returns the newest visible box."""
        eps = 1e-9
        if self._pending is not None and t + eps >= self._pending[0]:
            self.latest_time, self.latest = self._pending[0], self._pending[1]
            self._pending = None
        if self._pending is None and self.mailbox.peek_available():
            ft, frame, true_box, idx = self.mailbox.take()
            result = self.tracker.update(frame, true_box)
            self.consumed_frames.append(idx)
            if self.tracker.latency <= eps:
                self.latest, self.latest_time = result, t
            else:
                self._pending = (ft + self.tracker.latency, result)
        return self.latest


def make_tracker(spec: str) -> Tracker:
    """Parse a tracker spec string: gt | delay:<ms> | noisy:<sigma>[:seed] |
    ncc[:<window>]."""
    name, _, arg = spec.partition(":")
    if name == "gt":
        return GroundTruthTracker()
    if name == "delay":
        return DelayedTracker(float(arg))
    if name == "noisy":
        parts = arg.split(":")
        return NoisyTracker(float(parts[0]),
                            int(parts[1]) if len(parts) > 1 else 0)
    if name == "ncc":
        return NccTemplateTracker(int(arg) if arg else 48)
    raise ValueError(f"unknown tracker spec {spec!r}")
