"""Wire protocol: 11 message types, JSON payloads except the binary FRAME,
two transports with identical semantics (length-prefixed TCP stream and
binary websocket messages). See docs/protocol.md for the normative layout
and hex dumps."""

from __future__ import annotations

import json
import struct
from dataclasses import dataclass

MSG_HELLO = 0x01
MSG_FRAME = 0x02
MSG_STATE = 0x03
MSG_BBOX = 0x04
MSG_WAYPOINTS = 0x05
MSG_CONTROL = 0x06
MSG_RESET = 0x07
MSG_CONFIG = 0x08
MSG_LOG_EVENT = 0x09
MSG_GOAL = 0x0A
MSG_ERROR = 0x0B

MESSAGE_NAMES = {
    MSG_HELLO: "HELLO", MSG_FRAME: "FRAME", MSG_STATE: "STATE",
    MSG_BBOX: "BBOX", MSG_WAYPOINTS: "WAYPOINTS", MSG_CONTROL: "CONTROL",
    MSG_RESET: "RESET", MSG_CONFIG: "CONFIG", MSG_LOG_EVENT: "LOG_EVENT",
    MSG_GOAL: "GOAL", MSG_ERROR: "ERROR",
}

MAX_MESSAGE = 16 * 1024 * 1024   # type byte + payload
PROTOCOL_VERSION = "1.0"

# channel kinds for FRAME
CH_RGB8 = 0
CH_DEPTH_F32 = 1
CH_INSTANCE_U16 = 2
_BYTES_PER_PIXEL = {CH_RGB8: 3, CH_DEPTH_F32: 4, CH_INSTANCE_U16: 2}

FRAME_HEADER = struct.Struct("<QdHHBB")   # frame, time, w, h, kind, reserved
FRAME_HEADER_SIZE = FRAME_HEADER.size     # 22 bytes

# required JSON fields per type (value: type or tuple of types)
_NUM = (int, float)
SCHEMAS = {
    MSG_HELLO: {"role": str, "version": str},
    MSG_STATE: {"frame": _NUM},
    MSG_BBOX: {"frame": _NUM, "x": _NUM, "y": _NUM, "w": _NUM, "h": _NUM},
    MSG_WAYPOINTS: {"frame": _NUM, "offsets": list},
    MSG_CONTROL: {"frame": _NUM, "steering": _NUM, "throttle": _NUM},
    MSG_RESET: {},
    MSG_CONFIG: {},
    MSG_LOG_EVENT: {"event": str},
    MSG_GOAL: {"frame": _NUM, "value": _NUM},
    MSG_ERROR: {"code": str},
}
ROLES = ("tracker", "driver", "viewer", "manual", "editor")

# error codes
E_BAD_LENGTH = "BAD_LENGTH"
E_OVERSIZE = "OVERSIZE"
E_BAD_TYPE = "BAD_TYPE"
E_BAD_JSON = "BAD_JSON"
E_MISSING_FIELD = "MISSING_FIELD"
E_BAD_FIELD = "BAD_FIELD"
E_AUTHORITY = "AUTHORITY"
E_BAD_VERSION = "BAD_VERSION"
E_STALE = "STALE"


class ProtocolError(ValueError):
    def __init__(self, code: str, detail: str = ""):
        super().__init__(f"{code}: {detail}" if detail else code)
        self.code = code
        self.detail = detail


@dataclass(frozen=True)
class ProtocolMessage:
    type: int
    payload: bytes

    def json(self) -> dict:
        return decode_json_payload(self.type, self.payload)


def message(msg_type: int, obj: dict | None = None,
            payload: bytes | None = None) -> ProtocolMessage:
    """Build a message from a JSON object or raw payload bytes."""
    if payload is None:
        payload = json.dumps(obj or {}, sort_keys=True,
                             separators=(",", ":")).encode("utf-8")
    return ProtocolMessage(msg_type, payload)


def error_message(code: str, detail: str = "") -> ProtocolMessage:
    return message(MSG_ERROR, {"code": code, "detail": detail})


def validate_message(msg: ProtocolMessage) -> None:
    """Schema validation; raises ProtocolError on any violation."""
    if msg.type not in MESSAGE_NAMES:
        raise ProtocolError(E_BAD_TYPE, f"unknown message type 0x{msg.type:02X}")
    if len(msg.payload) + 1 > MAX_MESSAGE:
        raise ProtocolError(E_OVERSIZE, f"{len(msg.payload)} byte payload")
    if msg.type == MSG_FRAME:
        decode_frame_payload(msg.payload)
        return
    obj = decode_json_payload(msg.type, msg.payload)
    for name, typ in SCHEMAS[msg.type].items():
        if name not in obj:
            raise ProtocolError(E_MISSING_FIELD,
                                f"{MESSAGE_NAMES[msg.type]} missing {name!r}")
        if not isinstance(obj[name], typ) or isinstance(obj[name], bool):
            raise ProtocolError(E_BAD_FIELD,
                                f"{MESSAGE_NAMES[msg.type]}.{name} has wrong type")
    if msg.type == MSG_HELLO and obj["role"] not in ROLES:
        raise ProtocolError(E_BAD_FIELD, f"unknown role {obj['role']!r}")
    if msg.type == MSG_GOAL and obj["value"] not in (-1, 0, 1):
        raise ProtocolError(E_BAD_FIELD, "goal value must be -1, 0 or +1")


def decode_json_payload(msg_type: int, payload: bytes) -> dict:
    try:
        obj = json.loads(payload.decode("utf-8"))
    except (UnicodeDecodeError, json.JSONDecodeError) as exc:
        raise ProtocolError(E_BAD_JSON, str(exc)) from None
    if not isinstance(obj, dict):
        raise ProtocolError(E_BAD_JSON, "payload is not a JSON object")
    return obj


def encode_frame_payload(frame_index: int, sim_time: float, width: int,
                         height: int, kind: int, data: bytes) -> bytes:
    if kind not in _BYTES_PER_PIXEL:
        raise ProtocolError(E_BAD_FIELD, f"unknown channel kind {kind}")
    expected = width * height * _BYTES_PER_PIXEL[kind]
    if len(data) != expected:
        raise ProtocolError(E_BAD_LENGTH,
                            f"frame data {len(data)} bytes, expected {expected}")
    return FRAME_HEADER.pack(frame_index, sim_time, width, height, kind, 0) + data


def decode_frame_payload(payload: bytes) -> dict:
    if len(payload) < FRAME_HEADER_SIZE:
        raise ProtocolError(E_BAD_LENGTH, "frame payload shorter than header")
    frame_index, sim_time, width, height, kind, _ = \
        FRAME_HEADER.unpack_from(payload)
    if kind not in _BYTES_PER_PIXEL:
        raise ProtocolError(E_BAD_FIELD, f"unknown channel kind {kind}")
    data = payload[FRAME_HEADER_SIZE:]
    expected = width * height * _BYTES_PER_PIXEL[kind]
    if len(data) != expected:
        raise ProtocolError(E_BAD_LENGTH,
                            f"frame data {len(data)} bytes, expected {expected}")
    return {"frame": frame_index, "t": sim_time, "width": width,
            "height": height, "kind": kind, "data": data}


# ---------------------------------------------------------------- framing

def encode_stream(msg: ProtocolMessage) -> bytes:
    """Length-prefixed stream framing: LE u32 length of (type + payload)."""
    body = bytes([msg.type]) + msg.payload
    if len(body) > MAX_MESSAGE:
        raise ProtocolError(E_OVERSIZE, f"{len(body)} byte message")
    return struct.pack("<I", len(body)) + body


def encode_ws(msg: ProtocolMessage) -> bytes:
    """Message-transport body: type byte + payload, no length prefix."""
    body = bytes([msg.type]) + msg.payload
    if len(body) > MAX_MESSAGE:
        raise ProtocolError(E_OVERSIZE, f"{len(body)} byte message")
    return body


def decode_body(body: bytes) -> ProtocolMessage:
    """Decode a complete (type + payload) body; validates the schema."""
    if len(body) < 1:
        raise ProtocolError(E_BAD_LENGTH, "empty message body")
    if len(body) > MAX_MESSAGE:
        raise ProtocolError(E_OVERSIZE, f"{len(body)} byte message")
    msg = ProtocolMessage(body[0], bytes(body[1:]))
    validate_message(msg)
    return msg


class StreamDecoder:
    """Incremental decoder for the length-prefixed stream transport."""

    def __init__(self):
        self._buf = bytearray()

    def feed(self, data: bytes):
        """Consume bytes; yields ProtocolMessage per complete frame.
        Raises ProtocolError on unrecoverable framing errors."""
        self._buf.extend(data)
        out = []
        while True:
            if len(self._buf) < 4:
                break
            (length,) = struct.unpack_from("<I", self._buf)
            if length == 0:
                raise ProtocolError(E_BAD_LENGTH, "zero-length message")
            if length > MAX_MESSAGE:
                raise ProtocolError(E_OVERSIZE, f"declared length {length}")
            if len(self._buf) < 4 + length:
                break
            body = bytes(self._buf[4:4 + length])
            del self._buf[:4 + length]
            out.append(decode_body(body))
        return out
