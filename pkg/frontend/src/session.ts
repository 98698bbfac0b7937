/** Cockpit session: one socket, latest-wins frame buffer, manual-drive
 * control emission, live deviation score, and a downloadable episode log. */

import {
  DecodedMessage, FramePayload, MSG_CONTROL, MSG_ERROR, MSG_FRAME, MSG_GOAL,
  MSG_HELLO, MSG_LOG_EVENT, MSG_STATE, PROTOCOL_VERSION, decodeBody,
  decodeFramePayload, encodeBody,
} from "./protocol.js";
import { DriveScore, scoreDeviations } from "./scoring.js";

export type Role = "viewer" | "manual" | "editor";

/** Transport seam: the browser passes a WebSocket; tests pass a stub. */
export interface Transport {
  send(body: Uint8Array): void;
  close(): void;
}

export interface StateRecord {
  frame: number;
  t: number;
  car: { x: number; y: number; psi: number; v: number };
  s: number;
  deviation: number;
  mean_deviation: number;
  goal: number;
}

export interface OverlayToggles {
  gtBbox: boolean;
  trackerBbox: boolean;
  waypoints: boolean;
  idealPath: boolean;
}

export class CockpitSession {
  role: Role;
  helloAcked = false;
  lastError: { code: string; detail?: string } | null = null;
  events: string[] = [];
  latestFrame: FramePayload | null = null;
  latestState: StateRecord | null = null;
  overlays: OverlayToggles = {
    gtBbox: true, trackerBbox: true, waypoints: true, idealPath: false,
  };

  /** Wall-clock ms of the last received frame, for the stale indicator. */
  lastFrameAt = 0;
  staleAfterMs = 500;

  private transport: Transport;
  private deviations: number[] = [];
  private records: StateRecord[] = [];
  private outbound = 0;

  constructor(transport: Transport, role: Role) {
    this.transport = transport;
    this.role = role;
    this.transport.send(encodeBody(MSG_HELLO, {
      role, version: PROTOCOL_VERSION,
    }));
  }

  /** Feed one inbound websocket body. */
  onMessage(body: Uint8Array, nowMs = Date.now()): DecodedMessage {
    const msg = decodeBody(body);
    switch (msg.type) {
      case MSG_HELLO:
        this.helloAcked = true;
        break;
      case MSG_FRAME:
        this.latestFrame = decodeFramePayload(msg.payload);
        this.lastFrameAt = nowMs;
        break;
      case MSG_STATE: {
        const state = msg.json() as StateRecord;
        this.latestState = state;
        if (this.role === "manual") {
          this.deviations.push(state.deviation);
          this.records.push(state);
        }
        break;
      }
      case MSG_ERROR:
        this.lastError = msg.json();
        break;
      case MSG_LOG_EVENT:
        this.events.push(msg.json().event);
        break;
    }
    return msg;
  }

  isStale(nowMs = Date.now()): boolean {
    return this.lastFrameAt > 0 && nowMs - this.lastFrameAt > this.staleAfterMs;
  }

  /** Messages sent so far, excluding HELLO (viewer-purity check). */
  get inboundControlCount(): number {
    return this.outbound;
  }

  sendControl(steering: number, throttle: number): void {
    if (this.role !== "manual")
      throw new Error("only the manual role may send CONTROL");
    this.outbound += 1;
    this.transport.send(encodeBody(MSG_CONTROL, {
      frame: this.latestState?.frame ?? 0,
      steering,
      throttle,
    }));
  }

  /** Goal buttons: -1 / 0 / +1. Allowed from any role. */
  sendGoal(value: -1 | 0 | 1): void {
    this.outbound += 1;
    this.transport.send(encodeBody(MSG_GOAL, {
      frame: this.latestState?.frame ?? 0,
      value,
    }));
  }

  toggleOverlay(name: keyof OverlayToggles): void {
    this.overlays[name] = !this.overlays[name];
  }

  /** Live score readout over the deviations received so far. */
  liveScore(): DriveScore | null {
    return this.deviations.length ? scoreDeviations(this.deviations) : null;
  }

  /** Episode log as JSONL, same shape the CLI replay/scorer consumes. */
  exportLog(): string {
    const header = {
      type: "desksim-log", version: 1, kind: "drive", source: "cockpit",
    };
    const lines = [JSON.stringify(sortKeys(header))];
    for (const rec of this.records) {
      lines.push(JSON.stringify(sortKeys({
        frame: rec.frame,
        t: rec.t,
        car: rec.car,
        deviation: rec.deviation,
        goal: rec.goal,
      })));
    }
    return lines.join("\n") + "\n";
  }

  close(): void {
    this.transport.close();
  }
}

function sortKeys(v: any): any {
  if (Array.isArray(v)) return v.map(sortKeys);
  if (v !== null && typeof v === "object") {
    const out: Record<string, any> = {};
    for (const k of Object.keys(v).sort()) out[k] = sortKeys(v[k]);
    return out;
  }
  return v;
}
