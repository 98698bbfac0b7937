/** Single-page cockpit: connects to the simulator websocket, renders the
 * latest frame with overlays, and wires the editor, keyboard driving, goal
 * buttons, and log download. */

import { EditorDocument, PALETTE } from "./editor.js";
import { InputState } from "./input.js";
import { verdict } from "./mapmodel.js";
import {
  CH_RGB8, MSG_CONFIG, encodeBody,
} from "./protocol.js";
import {
  DEFAULT_INTRINSICS, TrajectoryTrace, waypointPixels,
} from "./overlay.js";
import { CockpitSession, Role } from "./session.js";

const $ = (id: string) => document.getElementById(id)!;

let session: CockpitSession | null = null;
let socket: WebSocket | null = null;
const input = new InputState();
const trace = new TrajectoryTrace();
let lane: "right" | "left" = "right";

function connect(role: Role): void {
  const url = (($("server-url") as HTMLInputElement).value ||
               "ws://127.0.0.1:9001");
  socket = new WebSocket(url);
  socket.binaryType = "arraybuffer";
  socket.onopen = () => {
    session = new CockpitSession(
      { send: (b) => socket!.send(b as Uint8Array<ArrayBuffer>),
        close: () => socket!.close() }, role);
    $("status").textContent = `connected as ${role}`;
  };
  socket.onmessage = (ev) => {
    session?.onMessage(new Uint8Array(ev.data as ArrayBuffer));
    if (session?.lastError)
      $("status").textContent = `error: ${session.lastError.code}`;
    if (session?.latestState) trace.push(session.latestState.car);
  };
  socket.onclose = () => {
    $("status").textContent = "disconnected (reconnect to resume)";
    session = null;
  };
}

function drawFrame(): void {
  const canvas = $("viewer") as HTMLCanvasElement;
  const ctx = canvas.getContext("2d")!;
  const frame = session?.latestFrame;
  if (frame && frame.kind === CH_RGB8) {
    const img = ctx.createImageData(frame.width, frame.height);
    for (let i = 0, j = 0; i < frame.data.length; i += 3, j += 4) {
      img.data[j] = frame.data[i];
      img.data[j + 1] = frame.data[i + 1];
      img.data[j + 2] = frame.data[i + 2];
      img.data[j + 3] = 255;
    }
    ctx.putImageData(img, 0, 0);
  }
  const state = session?.latestState;
  if (state && session!.overlays.waypoints && lastWaypoints) {
    ctx.fillStyle = "#00ff88";
    for (const p of waypointPixels(state.car, DEFAULT_INTRINSICS,
                                   lastWaypoints)) {
      ctx.fillRect(p.px - 2, p.py - 2, 4, 4);
    }
  }
  $("stale").textContent = session?.isStale() ? "STALE" : "";
  const score = session?.liveScore();
  if (score) {
    $("score").textContent =
      `mean ${score.mean_deviation_m.toFixed(3)} m over ${score.n_frames}`;
  }
}

let lastWaypoints: number[] | null = null;

function driveTick(): void {
  if (session?.role === "manual" && session.helloAcked) {
    const pads = navigator.getGamepads?.() ?? [];
    const pad = pads.find((p) => p) ?? undefined;
    const c = input.control(pad as any);
    session.sendControl(c.steering, c.throttle);
  }
  drawFrame();
  requestAnimationFrame(driveTick);
}

function setupEditor(): void {
  let doc = new EditorDocument(8, 8);
  let brush = PALETTE[1];
  const paletteEl = $("palette");
  for (const token of PALETTE) {
    const b = document.createElement("button");
    b.textContent = token;
    b.onclick = () => { brush = token; };
    paletteEl.appendChild(b);
  }
  const grid = $("editor-grid") as HTMLCanvasElement;
  const cell = 28;
  const redraw = () => {
    const ctx = grid.getContext("2d")!;
    ctx.clearRect(0, 0, grid.width, grid.height);
    const faults = doc.faults();
    for (let r = 0; r < doc.map.height; r++) {
      for (let c = 0; c < doc.map.width; c++) {
        const k = doc.map.cells[r][c].kind;
        ctx.fillStyle = faults.has(`${r},${c}`) ? "#cc2222"
          : k === "empty" ? "#ddd"
          : k === "house" ? "#a0742c"
          : k === "tree" ? "#3d7a3d"
          : k === "obstacle" ? "#888822" : "#555";
        // row 0 is south: draw it at the bottom
        ctx.fillRect(c * cell, (doc.map.height - 1 - r) * cell,
                     cell - 1, cell - 1);
      }
    }
    $("editor-status").textContent = doc.isValid()
      ? "valid" : `invalid: ${faults.size} cell fault(s) or disconnected`;
  };
  grid.onclick = (ev) => {
    const rect = grid.getBoundingClientRect();
    const c = Math.floor((ev.clientX - rect.left) / cell);
    const r = doc.map.height - 1 - Math.floor((ev.clientY - rect.top) / cell);
    doc.place(r, c, brush);
    redraw();
  };
  ($("editor-undo") as HTMLButtonElement).onclick = () => {
    doc.undo();
    redraw();
  };
  ($("editor-export") as HTMLButtonElement).onclick = () => {
    try {
      download("map.json", doc.exportJson());
    } catch (e) {
      $("editor-status").textContent = `export blocked: ${e}`;
    }
  };
  ($("editor-import") as HTMLInputElement).onchange = async (ev) => {
    const file = (ev.target as HTMLInputElement).files?.[0];
    if (!file) return;
    const parsed = JSON.parse(await file.text());
    const v = verdict(parsed);
    if (!v.valid) {
      $("editor-status").textContent = `import rejected: ${v.error}`;
      return;
    }
    doc = EditorDocument.fromJson(parsed);
    redraw();
  };
  redraw();
}

function download(name: string, text: string): void {
  const a = document.createElement("a");
  a.href = URL.createObjectURL(new Blob([text], { type: "application/json" }));
  a.download = name;
  a.click();
}

export function start(): void {
  window.addEventListener("keydown", (e) => input.keyDown(e.key));
  window.addEventListener("keyup", (e) => input.keyUp(e.key));
  ($("connect-viewer") as HTMLButtonElement).onclick = () =>
    connect("viewer");
  ($("connect-manual") as HTMLButtonElement).onclick = () =>
    connect("manual");
  for (const v of [-1, 0, 1] as const) {
    ($(`goal-${v}`) as HTMLButtonElement).onclick = () =>
      session?.sendGoal(v);
  }
  ($("lane-toggle") as HTMLButtonElement).onclick = () => {
    lane = lane === "right" ? "left" : "right";
    socket?.send(encodeBody(MSG_CONFIG, { lane }) as Uint8Array<ArrayBuffer>);
    $("lane-toggle").textContent = `lane: ${lane}`;
  };
  ($("download-log") as HTMLButtonElement).onclick = () => {
    if (session) download("episode.jsonl", session.exportLog());
  };
  for (const name of ["gtBbox", "trackerBbox", "waypoints",
                      "idealPath"] as const) {
    const el = document.getElementById(`overlay-${name}`);
    if (el) (el as HTMLInputElement).onchange = () =>
      session?.toggleOverlay(name);
  }
  setupEditor();
  requestAnimationFrame(driveTick);
}

if (typeof document !== "undefined" && document.readyState !== "loading") {
  start();
} else if (typeof document !== "undefined") {
  document.addEventListener("DOMContentLoaded", start);
}
