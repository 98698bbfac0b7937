from .protocol import (CH_DEPTH_F32, CH_INSTANCE_U16, CH_RGB8,
                       FRAME_HEADER_SIZE, MAX_MESSAGE, MESSAGE_NAMES,
                       MSG_BBOX, MSG_CONFIG, MSG_CONTROL, MSG_ERROR,
                       MSG_FRAME, MSG_GOAL, MSG_HELLO, MSG_LOG_EVENT,
                       MSG_RESET, MSG_STATE, MSG_WAYPOINTS, PROTOCOL_VERSION,
                       ProtocolError, ProtocolMessage, StreamDecoder,
                       decode_body, decode_frame_payload, encode_frame_payload,
                       encode_stream, encode_ws, error_message, message,
                       validate_message)
from .server import (Mailbox, OUTBOUND_QUEUE_DEPTH, STALE_FRAME_LIMIT,
                     Session, SimServer)

__all__ = [
    "CH_DEPTH_F32", "CH_INSTANCE_U16", "CH_RGB8", "FRAME_HEADER_SIZE",
    "MAX_MESSAGE", "MESSAGE_NAMES", "MSG_BBOX", "MSG_CONFIG", "MSG_CONTROL",
    "MSG_ERROR", "MSG_FRAME", "MSG_GOAL", "MSG_HELLO", "MSG_LOG_EVENT",
    "MSG_RESET", "MSG_STATE", "MSG_WAYPOINTS", "PROTOCOL_VERSION",
    "ProtocolError", "ProtocolMessage", "StreamDecoder", "decode_body",
    "decode_frame_payload", "encode_frame_payload", "encode_stream",
    "encode_ws", "error_message", "message", "validate_message",
    "Mailbox", "OUTBOUND_QUEUE_DEPTH", "STALE_FRAME_LIMIT", "Session",
    "SimServer",
]
