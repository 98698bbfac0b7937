/** Viewer overlays: pinhole projection of waypoints through the shared
 * camera model, plus a 2D trajectory trace of received car poses. */

export interface Intrinsics {
  width: number;
  height: number;
  hfov: number; // radians
}

export const DEFAULT_INTRINSICS: Intrinsics = {
  width: 320,
  height: 180,
  hfov: Math.PI / 2,
};

export function focalPx(intr: Intrinsics): number {
  return intr.width / 2 / Math.tan(intr.hfov / 2);
}

export const CAR_CAMERA_HEIGHT = 1.2;

export interface CarPose {
  x: number;
  y: number;
  psi: number; // heading, CCW from +x
}

export interface PixelPoint {
  px: number;
  py: number;
  depth: number;
}

/** Project a world point through the car's forward camera (hood height,
 * zero pitch). Points behind the camera get depth <= 0; cull them. */
export function projectFromCar(pose: CarPose, intr: Intrinsics,
                               wx: number, wy: number,
                               wz = 0): PixelPoint {
  const cy = Math.cos(pose.psi), sy = Math.sin(pose.psi);
  // camera basis: right = (sin psi, -cos psi, 0), forward = (cos, sin, 0),
  // down = forward x right = (0, 0, -1)
  const rx = wx - pose.x;
  const ry = wy - pose.y;
  const rz = wz - CAR_CAMERA_HEIGHT;
  const X = rx * sy - ry * cy;
  const Y = -rz;
  const Z = rx * cy + ry * sy;
  const f = focalPx(intr);
  return {
    px: intr.width / 2 + (f * X) / Z,
    py: intr.height / 2 + (f * Y) / Z,
    depth: Z,
  };
}

/** Waypoint label offsets (h rightward, v forward, meters) to world
 * coordinates relative to the car pose. */
export function labelToWorld(pose: CarPose, h: number, v: number):
    { x: number; y: number } {
  const cy = Math.cos(pose.psi), sy = Math.sin(pose.psi);
  return {
    x: pose.x + v * cy + h * sy,
    y: pose.y + v * sy - h * cy,
  };
}

/** Project a flat 8-number waypoint label (h1,v1..h4,v4) to culled pixel
 * points for drawing on the frame. */
export function waypointPixels(pose: CarPose, intr: Intrinsics,
                               offsets: number[]): PixelPoint[] {
  const out: PixelPoint[] = [];
  for (let i = 0; i + 1 < offsets.length; i += 2) {
    const w = labelToWorld(pose, offsets[i], offsets[i + 1]);
    const p = projectFromCar(pose, intr, w.x, w.y, 0);
    if (p.depth > 0) out.push(p);
  }
  return out;
}

/** Trajectory trace on the 2D map: one point per received pose. */
export class TrajectoryTrace {
  points: { x: number; y: number }[] = [];

  push(pose: CarPose): void {
    this.points.push({ x: pose.x, y: pose.y });
  }

  get length(): number {
    return this.points.length;
  }

  clear(): void {
    this.points.length = 0;
  }
}
