"""Simulation server: accepts external agents and viewers over the stream
(length-prefixed TCP) and message (websocket binary) transports, funnels
inbound control into latest-wins mailboxes read once per sim frame, and
fans out frame/state snapshots without ever blocking the sim loop."""

from __future__ import annotations

import base64
import hashlib
import socket
import struct
import threading
from collections import deque

from .protocol import (E_AUTHORITY, E_BAD_TYPE, E_BAD_VERSION, E_STALE,
                       MAX_MESSAGE, MESSAGE_NAMES, MSG_BBOX, MSG_CONTROL,
                       MSG_ERROR, MSG_FRAME, MSG_GOAL, MSG_HELLO,
                       MSG_LOG_EVENT, MSG_RESET, MSG_STATE, MSG_WAYPOINTS,
                       PROTOCOL_VERSION, ProtocolError, ProtocolMessage,
                       StreamDecoder, decode_body, encode_stream, encode_ws,
                       error_message, message)

STALE_FRAME_LIMIT = 30          # inbound older than current - 30 is discarded
OUTBOUND_QUEUE_DEPTH = 2        # drop-oldest snapshot queue per session
_WS_GUID = "258EAFA5-E914-47DA-95CA-C5AB0DC85B11"

# which sessions hold control authority, by vehicle
_AUTHORITY_ROLES = {"driver": "car", "manual": "car", "tracker": "uav"}
_INBOUND_CONTROL = (MSG_BBOX, MSG_WAYPOINTS, MSG_CONTROL, MSG_GOAL)


class Mailbox:
    """Thread-safe single-slot latest-wins channel."""

    def __init__(self):
        self._slot = None
        self._lock = threading.Lock()

    def put(self, item) -> None:
        with self._lock:
            self._slot = item

    def take(self):
        with self._lock:
            item, self._slot = self._slot, None
            return item


class Session:
    """One connected peer on either transport."""

    _next_id = [0]

    def __init__(self, server: "SimServer", encode, send_raw):
        self.server = server
        self.encode = encode          # ProtocolMessage -> transport bytes
        self._send_raw = send_raw     # bytes -> wire (may raise)
        self.role = None
        self.queue = deque()
        self.cv = threading.Condition()
        self.closed = False
        Session._next_id[0] += 1
        self.id = Session._next_id[0]

    def send(self, msg: ProtocolMessage) -> None:
        """Queue an outbound message (drop-oldest beyond the depth limit)."""
        with self.cv:
            if self.closed:
                return
            self.queue.append(msg)
            while len(self.queue) > OUTBOUND_QUEUE_DEPTH:
                self.queue.popleft()
            self.cv.notify()

    def writer_loop(self) -> None:
        while True:
            with self.cv:
                while not self.queue and not self.closed:
                    self.cv.wait(timeout=0.5)
                if self.closed and not self.queue:
                    return
                msg = self.queue.popleft()
            try:
                self._send_raw(self.encode(msg))
            except OSError:
                self.close()
                return

    def close(self) -> None:
        with self.cv:
            self.closed = True
            self.cv.notify_all()
        self.server._drop_session(self)


class SimServer:
    """Protocol endpoint shared by both transports.

    The sim loop calls take_control()/take_bbox()/... once per frame and
    publish_frame()/publish_state() after rendering; everything else happens
    on per-session threads.
    """

    def __init__(self, on_reset=None, on_config=None):
        self.mailboxes = {t: Mailbox() for t in _INBOUND_CONTROL}
        self.sessions: list = []
        self.authority: dict = {"car": None, "uav": None}
        self.current_frame = 0
        self.on_reset = on_reset
        self.on_config = on_config
        self._lock = threading.Lock()
        self._servers: list = []

    # ---------------------------------------------------------- sim side

    def set_frame(self, frame_index: int) -> None:
        self.current_frame = int(frame_index)

    def publish(self, msg: ProtocolMessage) -> None:
        with self._lock:
            targets = list(self.sessions)
        for s in targets:
            if s.role is not None:
                s.send(msg)

    def take(self, msg_type: int):
        item = self.mailboxes[msg_type].take()
        return item

    # ------------------------------------------------------ session side

    def _drop_session(self, session: Session) -> None:
        with self._lock:
            if session in self.sessions:
                self.sessions.remove(session)
            for vehicle, holder in self.authority.items():
                if holder is session:
                    self.authority[vehicle] = None

    def _add_session(self, session: Session) -> None:
        with self._lock:
            self.sessions.append(session)

    def handle_body(self, session: Session, body: bytes) -> None:
        """Decode and act on one inbound message body; never raises."""
        try:
            msg = decode_body(body)
        except ProtocolError as exc:
            session.send(error_message(exc.code, exc.detail))
            return
        try:
            self._dispatch(session, msg)
        except ProtocolError as exc:
            session.send(error_message(exc.code, exc.detail))
        except Exception as exc:  # never let a peer kill the server
            session.send(error_message("INTERNAL", type(exc).__name__))

    def _dispatch(self, session: Session, msg: ProtocolMessage) -> None:
        if msg.type == MSG_HELLO:
            obj = msg.json()
            if obj["version"].split(".")[0] != PROTOCOL_VERSION.split(".")[0]:
                raise ProtocolError(E_BAD_VERSION,
                                    f"server speaks {PROTOCOL_VERSION}")
            vehicle = _AUTHORITY_ROLES.get(obj["role"])
            with self._lock:
                if vehicle is not None:
                    holder = self.authority[vehicle]
                    if holder is not None and holder is not session:
                        raise ProtocolError(
                            E_AUTHORITY, f"{vehicle} already controlled")
                    self.authority[vehicle] = session
                session.role = obj["role"]
            session.send(message(MSG_HELLO, {
                "role": obj["role"], "version": PROTOCOL_VERSION}))
            return
        if session.role is None:
            raise ProtocolError(E_BAD_TYPE, "HELLO required first")
        if msg.type in _INBOUND_CONTROL:
            vehicle = "uav" if msg.type == MSG_BBOX else "car"
            if msg.type in (MSG_CONTROL, MSG_WAYPOINTS, MSG_GOAL, MSG_BBOX):
                with self._lock:
                    holder = self.authority.get(vehicle)
                if holder is not session and msg.type != MSG_GOAL:
                    raise ProtocolError(E_AUTHORITY,
                                        f"no {vehicle} authority")
            frame = msg.json().get("frame", self.current_frame)
            if frame < self.current_frame - STALE_FRAME_LIMIT:
                session.send(message(MSG_LOG_EVENT, {
                    "event": "stale-discard",
                    "frame": frame, "current": self.current_frame}))
                return
            self.mailboxes[msg.type].put(msg)
            return
        if msg.type == MSG_RESET:
            if self.on_reset is not None:
                self.on_reset(msg)
            return
        if msg.type == MSG_STATE or msg.type == MSG_FRAME \
                or msg.type == MSG_ERROR or msg.type == MSG_LOG_EVENT:
            raise ProtocolError(E_BAD_TYPE,
                                f"{MESSAGE_NAMES[msg.type]} is server-to-client")
        # CONFIG
        if self.on_config is not None:
            self.on_config(msg)

    # ------------------------------------------------------- transports

    def listen_stream(self, host: str = "127.0.0.1", port: int = 9000) -> int:
        """Start the length-prefixed TCP transport; returns the bound port."""
        srv = socket.create_server((host, port))
        self._servers.append(srv)
        threading.Thread(target=self._accept_loop,
                         args=(srv, self._stream_session), daemon=True).start()
        return srv.getsockname()[1]

    def listen_ws(self, host: str = "127.0.0.1", port: int = 9001) -> int:
        """Start the websocket transport; returns the bound port."""
        srv = socket.create_server((host, port))
        self._servers.append(srv)
        threading.Thread(target=self._accept_loop,
                         args=(srv, self._ws_session), daemon=True).start()
        return srv.getsockname()[1]

    def close(self) -> None:
        for srv in self._servers:
            try:
                srv.close()
            except OSError:
                pass
        with self._lock:
            sessions = list(self.sessions)
        for s in sessions:
            s.close()

    def _accept_loop(self, srv, handler) -> None:
        while True:
            try:
                conn, _ = srv.accept()
            except OSError:
                return
            threading.Thread(target=handler, args=(conn,), daemon=True).start()

    def _stream_session(self, conn: socket.socket) -> None:
        session = Session(self, encode_stream, conn.sendall)
        self._add_session(session)
        threading.Thread(target=session.writer_loop, daemon=True).start()
        decoder = StreamDecoder()
        try:
            while True:
                data = conn.recv(65536)
                if not data:
                    break
                try:
                    msgs_bodies = decoder.feed(data)
                except ProtocolError as exc:
                    session.send(error_message(exc.code, exc.detail))
                    break  # framing is unrecoverable on a byte stream
                for msg in msgs_bodies:
                    try:
                        self._dispatch(session, msg)
                    except ProtocolError as exc:
                        session.send(error_message(exc.code, exc.detail))
                    except Exception as exc:
                        session.send(error_message("INTERNAL",
                                                   type(exc).__name__))
        except OSError:
            pass
        finally:
            import time
            time.sleep(0.05)  # give the writer a chance to flush errors
            session.close()
            try:
                conn.close()
            except OSError:
                pass

    # websocket plumbing ------------------------------------------------

    def _ws_session(self, conn: socket.socket) -> None:
        try:
            if not _ws_handshake(conn):
                conn.close()
                return
        except OSError:
            return
        session = Session(self, encode_ws,
                          lambda b: conn.sendall(_ws_frame(b)))
        self._add_session(session)
        threading.Thread(target=session.writer_loop, daemon=True).start()
        try:
            for body in _ws_messages(conn):
                self.handle_body(session, body)
        except OSError:
            pass
        finally:
            session.close()
            try:
                conn.close()
            except OSError:
                pass


def _ws_handshake(conn: socket.socket) -> bool:
    data = b""
    while b"\r\n\r\n" not in data:
        chunk = conn.recv(4096)
        if not chunk or len(data) > 65536:
            return False
        data += chunk
    headers = {}
    for line in data.split(b"\r\n")[1:]:
        if b":" in line:
            k, v = line.split(b":", 1)
            headers[k.strip().lower()] = v.strip()
    key = headers.get(b"sec-websocket-key")
    if key is None:
        return False
    accept = base64.b64encode(
        hashlib.sha1(key + _WS_GUID.encode()).digest()).decode()
    conn.sendall((
        "HTTP/1.1 101 Switching Protocols\r\n"
        "Upgrade: websocket\r\nConnection: Upgrade\r\n"
        f"Sec-WebSocket-Accept: {accept}\r\n\r\n").encode())
    return True


def _ws_frame(payload: bytes, opcode: int = 2) -> bytes:
    """Server-to-client websocket frame (unmasked)."""
    head = bytes([0x80 | opcode])
    n = len(payload)
    if n < 126:
        head += bytes([n])
    elif n < 65536:
        head += bytes([126]) + struct.pack(">H", n)
    else:
        head += bytes([127]) + struct.pack(">Q", n)
    return head + payload


def _recv_exact(conn: socket.socket, n: int) -> bytes | None:
    buf = b""
    while len(buf) < n:
        chunk = conn.recv(n - len(buf))
        if not chunk:
            return None
        buf += chunk
    return buf


def _ws_messages(conn: socket.socket):
    """Yield complete binary message bodies from a websocket connection."""
    fragments = []
    while True:
        head = _recv_exact(conn, 2)
        if head is None:
            return
        fin = head[0] & 0x80
        opcode = head[0] & 0x0F
        masked = head[1] & 0x80
        n = head[1] & 0x7F
        if n == 126:
            ext = _recv_exact(conn, 2)
            if ext is None:
                return
            n = struct.unpack(">H", ext)[0]
        elif n == 127:
            ext = _recv_exact(conn, 8)
            if ext is None:
                return
            n = struct.unpack(">Q", ext)[0]
        if n > MAX_MESSAGE + 1:
            return
        mask = _recv_exact(conn, 4) if masked else b"\x00" * 4
        if mask is None:
            return
        data = _recv_exact(conn, n) if n else b""
        if data is None:
            return
        if masked:
            data = bytes(b ^ mask[i % 4] for i, b in enumerate(data))
        if opcode == 8:       # close
            return
        if opcode in (9, 10):  # ping/pong: reply to ping, ignore pong
            if opcode == 9:
                try:
                    conn.sendall(_ws_frame(data, opcode=10))
                except OSError:
                    return
            continue
        fragments.append(data)
        if fin:
            yield b"".join(fragments)
            fragments = []
