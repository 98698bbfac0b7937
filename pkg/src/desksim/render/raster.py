"""Deterministic software rasterizer: z-buffered triangles producing RGB,
planar depth, and 16-bit instance masks, plus mask-derived bounding boxes."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .camera import CameraIntrinsics, CameraPose

NEAR_PLANE = 0.05
BACKGROUND_ID = 0
SKY_COLOR = (132, 184, 228)


@dataclass
class Frame:
    frame_index: int
    sim_time: float
    rgb: np.ndarray | None = None        # (H, W, 3) uint8
    depth: np.ndarray | None = None      # (H, W) float32, meters (planar)
    instance: np.ndarray | None = None   # (H, W) uint16, 0 = background

    @property
    def width(self) -> int:
        for ch in (self.rgb, self.depth, self.instance):
            if ch is not None:
                return ch.shape[1]
        return 0

    @property
    def height(self) -> int:
        for ch in (self.rgb, self.depth, self.instance):
            if ch is not None:
                return ch.shape[0]
        return 0


@dataclass(frozen=True)
class BBox:
    """Pixel-space axis-aligned box, top-left origin."""

    x: float
    y: float
    w: float
    h: float

    def __post_init__(self):
        if self.w < 0 or self.h < 0:
            raise ValueError("bbox with negative size")

    @property
    def center(self) -> tuple[float, float]:
        return (self.x + self.w / 2.0, self.y + self.h / 2.0)

    @property
    def area(self) -> float:
        return self.w * self.h


def _clip_near(v: np.ndarray) -> list:
    """Clip one camera-space triangle (3,3) against Z = NEAR_PLANE.

    Returns a list of triangles (each (3,3)). Component order is
    (right, down, forward)."""
    inside = v[:, 2] > NEAR_PLANE
    n_in = int(inside.sum())
    if n_in == 0:
        return []
    if n_in == 3:
        return [v]
    poly = []
    for i in range(3):
        a, b = v[i], v[(i + 1) % 3]
        ain, bin_ = inside[i], inside[(i + 1) % 3]
        if ain:
            poly.append(a)
        if ain != bin_:
            t = (NEAR_PLANE - a[2]) / (b[2] - a[2])
            poly.append(a + t * (b - a))
    tris = []
    for i in range(1, len(poly) - 1):
        tris.append(np.stack([poly[0], poly[i], poly[i + 1]]))
    return tris


class Renderer:
    """Reentrant triangle renderer over immutable scene snapshots."""

    def __init__(self, intrinsics: CameraIntrinsics | None = None):
        self.intrinsics = intrinsics or CameraIntrinsics()

    def render(self, tris: np.ndarray, colors: np.ndarray, ids: np.ndarray,
               cam: CameraPose, frame_index: int = 0, sim_time: float = 0.0,
               channels: tuple = ("rgb", "depth", "instance")) -> Frame:
        """Rasterize world-space triangles (N,3,3) with per-triangle color
        (N,3) and object id (N,)."""
        intr = self.intrinsics
        W, H = intr.width, intr.height
        want_rgb = "rgb" in channels
        want_depth = "depth" in channels
        want_inst = "instance" in channels

        inv_zbuf = np.zeros((H, W), dtype=np.float64)
        rgb = np.empty((H, W, 3), dtype=np.uint8) if want_rgb else None
        if want_rgb:
            rgb[:] = SKY_COLOR
        inst = np.zeros((H, W), dtype=np.uint16) if want_inst else None

        if len(tris):
            right, down, forward = cam.basis()
            basis = np.stack([right, down, forward])  # rows
            v_cam = (tris.reshape(-1, 3) - cam.eye) @ basis.T
            v_cam = v_cam.reshape(-1, 3, 3)
            zs = v_cam[:, :, 2]
            fully_in = (zs > NEAR_PLANE).all(axis=1)
            partly_in = (zs > NEAR_PLANE).any(axis=1) & ~fully_in
            focal, cx, cy = intr.focal_px, intr.cx, intr.cy

            draw_list = []
            idx_full = np.nonzero(fully_in)[0]
            if len(idx_full):
                draw_list.append((v_cam[idx_full], idx_full))
            for i in np.nonzero(partly_in)[0]:
                clipped = _clip_near(v_cam[i])
                if clipped:
                    draw_list.append((np.stack(clipped),
                                      np.full(len(clipped), i, dtype=np.int64)))
            for verts, src in draw_list:
                z = verts[:, :, 2]
                px = cx + focal * verts[:, :, 0] / z
                py = cy + focal * verts[:, :, 1] / z
                inv_z = 1.0 / z
                self._raster_batch(px, py, inv_z, src, colors, ids,
                                   inv_zbuf, rgb, inst, W, H)

        depth = None
        if want_depth:
            with np.errstate(divide="ignore"):
                depth = np.where(inv_zbuf > 0.0, 1.0 / inv_zbuf, np.inf)
            depth = depth.astype(np.float32)
        return Frame(frame_index, sim_time, rgb=rgb, depth=depth, instance=inst)

    @staticmethod
    def _raster_batch(px, py, inv_z, src, colors, ids, inv_zbuf, rgb, inst, W, H):
        n = px.shape[0]
        x0 = np.maximum(np.floor(px.min(axis=1) - 0.5), 0).astype(np.int64)
        x1 = np.minimum(np.ceil(px.max(axis=1) + 0.5), W).astype(np.int64)
        y0 = np.maximum(np.floor(py.min(axis=1) - 0.5), 0).astype(np.int64)
        y1 = np.minimum(np.ceil(py.max(axis=1) + 0.5), H).astype(np.int64)
        ax, ay, bx, by, cx_, cy_ = (px[:, 0], py[:, 0], px[:, 1], py[:, 1],
                                    px[:, 2], py[:, 2])
        area = (bx - ax) * (cy_ - ay) - (by - ay) * (cx_ - ax)
        for i in range(n):
            if x1[i] <= x0[i] or y1[i] <= y0[i] or abs(area[i]) < 1e-12:
                continue
            xs = np.arange(x0[i], x1[i], dtype=np.float64) + 0.5
            ys = np.arange(y0[i], y1[i], dtype=np.float64) + 0.5
            gx = xs[None, :]
            gy = ys[:, None]
            w0 = (cx_[i] - bx[i]) * (gy - by[i]) - (cy_[i] - by[i]) * (gx - bx[i])
            w1 = (ax[i] - cx_[i]) * (gy - cy_[i]) - (ay[i] - cy_[i]) * (gx - cx_[i])
            w2 = (bx[i] - ax[i]) * (gy - ay[i]) - (by[i] - ay[i]) * (gx - ax[i])
            if area[i] > 0:
                mask = (w0 >= 0) & (w1 >= 0) & (w2 >= 0)
            else:
                mask = (w0 <= 0) & (w1 <= 0) & (w2 <= 0)
            if not mask.any():
                continue
            l0 = w0 / area[i]
            l1 = w1 / area[i]
            l2 = w2 / area[i]
            iz = l0 * inv_z[i, 0] + l1 * inv_z[i, 1] + l2 * inv_z[i, 2]
            sub = inv_zbuf[y0[i]:y1[i], x0[i]:x1[i]]
            upd = mask & (iz > sub)
            if not upd.any():
                continue
            sub[upd] = iz[upd]
            j = src[i]
            if rgb is not None:
                rgb[y0[i]:y1[i], x0[i]:x1[i]][upd] = colors[j]
            if inst is not None:
                inst[y0[i]:y1[i], x0[i]:x1[i]][upd] = ids[j]


def gt_bbox(frame: Frame, object_id: int) -> BBox | None:
    """Tight box over visible pixels of an instance id; None if fully
    occluded or absent."""
    if frame.instance is None:
        raise ValueError("frame has no instance channel")
    rows, cols = np.nonzero(frame.instance == object_id)
    if len(rows) == 0:
        return None
    x0, x1 = float(cols.min()), float(cols.max())
    y0, y1 = float(rows.min()), float(rows.max())
    return BBox(x0, y0, x1 - x0 + 1.0, y1 - y0 + 1.0)
