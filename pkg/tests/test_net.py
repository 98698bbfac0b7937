import json
import socket
import struct
import time

import pytest

from desksim.net import (CH_DEPTH_F32, CH_INSTANCE_U16, CH_RGB8,
                         FRAME_HEADER_SIZE, MAX_MESSAGE, MSG_BBOX, MSG_CONFIG,
                         MSG_CONTROL, MSG_ERROR, MSG_FRAME, MSG_GOAL,
                         MSG_HELLO, MSG_LOG_EVENT, MSG_RESET, MSG_STATE,
                         MSG_WAYPOINTS, PROTOCOL_VERSION, ProtocolError,
                         ProtocolMessage, SimServer, StreamDecoder,
                         decode_body, decode_frame_payload,
                         encode_frame_payload, encode_stream, encode_ws,
                         message, validate_message)
from desksim.core import SeededRng


def jpayload(obj):
    return json.dumps(obj, sort_keys=True, separators=(",", ":")).encode()


# Golden wire bytes, hand-assembled from the documented layout:
# stream framing = LE u32 length of (type byte + payload), then the body.
GOLDEN = [
    (MSG_HELLO, {"role": "driver", "version": "1.0"}),
    (MSG_STATE, {"frame": 12, "goal": 0}),
    (MSG_BBOX, {"frame": 17, "x": 10.0, "y": 20.0, "w": 30.0, "h": 40.0}),
    (MSG_WAYPOINTS, {"frame": 3, "offsets": [0.0, 2.0, 0.1, 4.0,
                                             0.3, 6.0, 0.6, 8.0]}),
    (MSG_CONTROL, {"frame": 5, "steering": -0.25, "throttle": 1.0}),
    (MSG_RESET, {}),
    (MSG_CONFIG, {"speed": 6.0}),
    (MSG_LOG_EVENT, {"event": "stale-discard", "frame": 1, "current": 40}),
    (MSG_GOAL, {"frame": 9, "value": -1}),
    (MSG_ERROR, {"code": "BAD_JSON", "detail": "x"}),
]


class TestGoldenVectors:
    @pytest.mark.parametrize("msg_type,obj", GOLDEN)
    def test_stream_roundtrip(self, msg_type, obj):
        payload = jpayload(obj)
        expected = struct.pack("<I", 1 + len(payload)) + bytes([msg_type]) \
            + payload
        assert encode_stream(message(msg_type, obj)) == expected
        (decoded,) = StreamDecoder().feed(expected)
        assert decoded.type == msg_type
        assert decoded.json() == obj

    @pytest.mark.parametrize("msg_type,obj", GOLDEN)
    def test_ws_body(self, msg_type, obj):
        payload = jpayload(obj)
        assert encode_ws(message(msg_type, obj)) == bytes([msg_type]) + payload

    def test_frame_golden(self):
        """FRAME: 22-byte header (u64 frame, f64 t, u16 w, u16 h, u8 kind,
        u8 reserved, all little-endian) + raw channel data."""
        data = bytes(range(256)) * 675  # 320*180*3 = 172800 bytes
        payload = encode_frame_payload(7, 0.25, 320, 180, CH_RGB8, data)
        expected_header = struct.pack("<QdHHBB", 7, 0.25, 320, 180, 0, 0)
        assert payload[:22] == expected_header
        assert payload[22:] == data
        out = decode_frame_payload(payload)
        assert out["frame"] == 7 and out["t"] == 0.25
        assert out["width"] == 320 and out["kind"] == CH_RGB8
        assert out["data"] == data

    def test_frame_payload_sizes(self):
        assert FRAME_HEADER_SIZE == 22
        for kind, bpp in ((CH_RGB8, 3), (CH_DEPTH_F32, 4),
                          (CH_INSTANCE_U16, 2)):
            payload = encode_frame_payload(0, 0.0, 320, 180, kind,
                                           bytes(320 * 180 * bpp))
            assert len(payload) == 320 * 180 * bpp + 22

    def test_frame_bad_length(self):
        with pytest.raises(ProtocolError, match="BAD_LENGTH"):
            encode_frame_payload(0, 0.0, 320, 180, CH_RGB8, bytes(100))
        with pytest.raises(ProtocolError):
            decode_frame_payload(bytes(10))


class TestValidation:
    def test_missing_field(self):
        with pytest.raises(ProtocolError, match="MISSING_FIELD"):
            decode_body(bytes([MSG_BBOX]) + jpayload({"x": 1, "y": 2,
                                                      "w": 3, "h": 4}))

    def test_bool_is_not_a_number(self):
        with pytest.raises(ProtocolError, match="BAD_FIELD"):
            decode_body(bytes([MSG_GOAL]) + jpayload({"frame": 0,
                                                      "value": True}))

    def test_goal_value_range(self):
        with pytest.raises(ProtocolError):
            decode_body(bytes([MSG_GOAL]) + jpayload({"frame": 0, "value": 2}))

    def test_unknown_type(self):
        with pytest.raises(ProtocolError, match="BAD_TYPE"):
            decode_body(bytes([0x7F]) + jpayload({}))

    def test_non_object_payload(self):
        with pytest.raises(ProtocolError, match="BAD_JSON"):
            decode_body(bytes([MSG_RESET]) + b"[1,2,3]")

    def test_bad_utf8(self):
        with pytest.raises(ProtocolError, match="BAD_JSON"):
            decode_body(bytes([MSG_RESET]) + b"\xff\xfe")


class TestStreamDecoder:
    def test_byte_at_a_time(self):
        wire = b"".join(encode_stream(message(t, o)) for t, o in GOLDEN)
        dec = StreamDecoder()
        out = []
        for i in range(len(wire)):
            out.extend(dec.feed(wire[i:i + 1]))
        assert [(m.type, m.json()) for m in out] == GOLDEN

    def test_zero_length_rejected(self):
        with pytest.raises(ProtocolError, match="BAD_LENGTH"):
            StreamDecoder().feed(struct.pack("<I", 0))

    def test_oversize_rejected(self):
        with pytest.raises(ProtocolError, match="OVERSIZE"):
            StreamDecoder().feed(struct.pack("<I", MAX_MESSAGE + 1))

    def test_fuzz_never_hangs_or_crashes(self):
        rng = SeededRng(1)
        for _ in range(2000):
            dec = StreamDecoder()
            try:
                dec.feed(rng.bytes(rng.integers(0, 64)))
            except ProtocolError:
                pass


def stream_connect(port):
    sock = socket.create_connection(("127.0.0.1", port), timeout=5)
    return sock


def stream_send(sock, msg_type, obj):
    sock.sendall(encode_stream(message(msg_type, obj)))


def stream_recv(sock, dec=None):
    dec = dec or StreamDecoder()
    while True:
        data = sock.recv(4096)
        if not data:
            raise ConnectionError("server closed")
        msgs = dec.feed(data)
        if msgs:
            return msgs[0]


class TestServer:
    @pytest.fixture()
    def server(self):
        events = {"reset": 0, "config": []}
        srv = SimServer(on_reset=lambda m: events.__setitem__(
                            "reset", events["reset"] + 1),
                        on_config=lambda m: events["config"].append(m.json()))
        port = srv.listen_stream(port=0)
        yield srv, port, events
        srv.close()

    def hello(self, sock, role="driver"):
        stream_send(sock, MSG_HELLO, {"role": role,
                                      "version": PROTOCOL_VERSION})
        return stream_recv(sock)

    def test_hello_echo(self, server):
        srv, port, _ = server
        with stream_connect(port) as sock:
            reply = self.hello(sock)
            assert reply.type == MSG_HELLO
            assert reply.json() == {"role": "driver",
                                    "version": PROTOCOL_VERSION}

    def test_version_mismatch(self, server):
        srv, port, _ = server
        with stream_connect(port) as sock:
            stream_send(sock, MSG_HELLO, {"role": "driver", "version": "2.0"})
            reply = stream_recv(sock)
            assert reply.type == MSG_ERROR
            assert reply.json()["code"] == "BAD_VERSION"

    def test_hello_required_first(self, server):
        srv, port, _ = server
        with stream_connect(port) as sock:
            stream_send(sock, MSG_CONTROL,
                        {"frame": 0, "steering": 0.0, "throttle": 0.0})
            assert stream_recv(sock).json()["code"] == "BAD_TYPE"

    def test_control_reaches_mailbox(self, server):
        srv, port, _ = server
        with stream_connect(port) as sock:
            self.hello(sock)
            stream_send(sock, MSG_CONTROL,
                        {"frame": 0, "steering": 0.5, "throttle": 1.0})
            deadline = time.time() + 5
            msg = None
            while msg is None and time.time() < deadline:
                msg = srv.take(MSG_CONTROL)
            assert msg.json()["steering"] == 0.5

    def test_authority_conflict(self, server):
        srv, port, _ = server
        with stream_connect(port) as a, stream_connect(port) as b:
            assert self.hello(a).type == MSG_HELLO
            reply = self.hello(b)
            assert reply.type == MSG_ERROR
            assert reply.json()["code"] == "AUTHORITY"

    def test_authority_released_on_disconnect(self, server):
        srv, port, _ = server
        sock = stream_connect(port)
        self.hello(sock)
        sock.close()
        deadline = time.time() + 5
        while srv.authority["car"] is not None and time.time() < deadline:
            time.sleep(0.01)
        with stream_connect(port) as b:
            assert self.hello(b).type == MSG_HELLO

    def test_viewer_has_no_authority(self, server):
        srv, port, _ = server
        with stream_connect(port) as viewer, stream_connect(port) as driver:
            assert self.hello(viewer, "viewer").type == MSG_HELLO
            assert self.hello(driver, "driver").type == MSG_HELLO
            stream_send(viewer, MSG_CONTROL,
                        {"frame": 0, "steering": 1.0, "throttle": 1.0})
            assert stream_recv(viewer).json()["code"] == "AUTHORITY"

    def test_goal_exempt_from_authority(self, server):
        srv, port, _ = server
        with stream_connect(port) as viewer:
            self.hello(viewer, "viewer")
            stream_send(viewer, MSG_GOAL, {"frame": 0, "value": 1})
            deadline = time.time() + 5
            msg = None
            while msg is None and time.time() < deadline:
                msg = srv.take(MSG_GOAL)
            assert msg.json()["value"] == 1

    def test_stale_control_discarded(self, server):
        srv, port, _ = server
        srv.set_frame(100)
        with stream_connect(port) as sock:
            self.hello(sock)
            stream_send(sock, MSG_CONTROL,
                        {"frame": 1, "steering": 0.0, "throttle": 0.0})
            note = stream_recv(sock)
            assert note.type == MSG_LOG_EVENT
            assert note.json()["event"] == "stale-discard"
            assert srv.take(MSG_CONTROL) is None

    def test_reset_and_config_callbacks(self, server):
        srv, port, events = server
        with stream_connect(port) as sock:
            self.hello(sock)
            stream_send(sock, MSG_RESET, {})
            stream_send(sock, MSG_CONFIG, {"speed": 8.0})
            deadline = time.time() + 5
            while (events["reset"] < 1 or not events["config"]) \
                    and time.time() < deadline:
                time.sleep(0.01)
        assert events["reset"] == 1
        assert events["config"] == [{"speed": 8.0}]

    def test_server_to_client_types_rejected(self, server):
        srv, port, _ = server
        with stream_connect(port) as sock:
            self.hello(sock)
            stream_send(sock, MSG_STATE, {"frame": 1})
            assert stream_recv(sock).json()["code"] == "BAD_TYPE"

    def test_publish_reaches_roled_sessions(self, server):
        srv, port, _ = server
        with stream_connect(port) as sock:
            self.hello(sock, "viewer")
            srv.publish(message(MSG_STATE, {"frame": 4}))
            dec = StreamDecoder()
            msg = stream_recv(sock, dec)
            assert msg.type == MSG_STATE and msg.json()["frame"] == 4

    def test_malformed_framing_gets_error(self, server):
        srv, port, _ = server
        with stream_connect(port) as sock:
            sock.sendall(struct.pack("<I", 0))
            reply = stream_recv(sock)
            assert reply.type == MSG_ERROR


class TestWebsocket:
    def test_handshake_and_binary_roundtrip(self):
        srv = SimServer()
        port = srv.listen_ws(port=0)
        try:
            sock = socket.create_connection(("127.0.0.1", port), timeout=5)
            key = "dGhlIHNhbXBsZSBub25jZQ=="
            sock.sendall((
                "GET / HTTP/1.1\r\nHost: x\r\nUpgrade: websocket\r\n"
                "Connection: Upgrade\r\nSec-WebSocket-Key: " + key +
                "\r\nSec-WebSocket-Version: 13\r\n\r\n").encode())
            resp = b""
            while b"\r\n\r\n" not in resp:
                resp += sock.recv(4096)
            head = resp.decode("latin-1")
            assert "101" in head.splitlines()[0]
            assert "s3pPLMBiTxaQ9kYGzzhZRbK+xOo=" in head
            body = encode_ws(message(MSG_HELLO, {
                "role": "viewer", "version": PROTOCOL_VERSION}))
            mask = b"\x01\x02\x03\x04"
            masked = bytes(b ^ mask[i % 4] for i, b in enumerate(body))
            frame = bytes([0x82])
            assert len(body) < 126
            frame += bytes([0x80 | len(body)]) + mask + masked
            sock.sendall(frame)
            hdr = sock.recv(2)
            assert hdr[0] == 0x82  # FIN + binary, unmasked from server
            ln = hdr[1] & 0x7F
            if ln == 126:
                ln = struct.unpack(">H", sock.recv(2))[0]
            data = b""
            while len(data) < ln:
                data += sock.recv(ln - len(data))
            assert data[0] == MSG_HELLO
            assert json.loads(data[1:])["role"] == "viewer"
            sock.close()
        finally:
            srv.close()
