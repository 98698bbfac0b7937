/** Wire protocol mirror: 11 message types over binary websocket messages
 * (type byte + payload; JSON except the binary FRAME). See
 * ../../docs/protocol.md for the normative layout. */

export const MSG_HELLO = 0x01;
export const MSG_FRAME = 0x02;
export const MSG_STATE = 0x03;
export const MSG_BBOX = 0x04;
export const MSG_WAYPOINTS = 0x05;
export const MSG_CONTROL = 0x06;
export const MSG_RESET = 0x07;
export const MSG_CONFIG = 0x08;
export const MSG_LOG_EVENT = 0x09;
export const MSG_GOAL = 0x0a;
export const MSG_ERROR = 0x0b;

export const PROTOCOL_VERSION = "1.0";
export const FRAME_HEADER_SIZE = 22;

export const CH_RGB8 = 0;
export const CH_DEPTH_F32 = 1;
export const CH_INSTANCE_U16 = 2;

export interface FramePayload {
  frame: number;
  t: number;
  width: number;
  height: number;
  kind: number;
  data: Uint8Array;
}

/** Canonical JSON bytes: sorted keys, no whitespace (matches the server). */
export function canonicalJson(obj: unknown): Uint8Array {
  const sorted = (v: any): any => {
    if (Array.isArray(v)) return v.map(sorted);
    if (v !== null && typeof v === "object") {
      const out: Record<string, any> = {};
      for (const k of Object.keys(v).sort()) out[k] = sorted(v[k]);
      return out;
    }
    return v;
  };
  return new TextEncoder().encode(JSON.stringify(sorted(obj)));
}

/** One websocket body: type byte followed by the payload. */
export function encodeBody(type: number, obj: unknown): Uint8Array {
  const payload = canonicalJson(obj ?? {});
  const body = new Uint8Array(1 + payload.length);
  body[0] = type;
  body.set(payload, 1);
  return body;
}

export interface DecodedMessage {
  type: number;
  payload: Uint8Array;
  json(): any;
}

export function decodeBody(body: Uint8Array): DecodedMessage {
  if (body.length < 1) throw new Error("BAD_LENGTH: empty body");
  const type = body[0];
  const payload = body.subarray(1);
  return {
    type,
    payload,
    json: () => JSON.parse(new TextDecoder().decode(payload)),
  };
}

export function decodeFramePayload(payload: Uint8Array): FramePayload {
  if (payload.length < FRAME_HEADER_SIZE)
    throw new Error("BAD_LENGTH: truncated frame header");
  const view = new DataView(payload.buffer, payload.byteOffset,
                            payload.byteLength);
  return {
    frame: Number(view.getBigUint64(0, true)),
    t: view.getFloat64(8, true),
    width: view.getUint16(16, true),
    height: view.getUint16(18, true),
    kind: view.getUint8(20),
    data: payload.subarray(FRAME_HEADER_SIZE),
  };
}
