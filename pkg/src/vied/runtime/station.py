"""Station-bus server: newline-delimited JSON over TCP.

Operations: get-config, set-settings, subscribe, unsubscribe, ping.
Every reply copies the request's correlation id.  Malformed input gets
a structured error reply and the connection stays open.  Subscriptions
stream protection events as they happen and measurement snapshots at
10 Hz; a slow subscriber drops oldest snapshots rather than blocking
the pipeline.
"""

from __future__ import annotations

import json
import socket
import threading
from collections import deque

from .config import ConfigError
from .relay import Relay

MAX_LINE_BYTES = 65536
STREAMS = ("events", "measurements")


class StationServer:
    def __init__(self, relay: Relay, address: str = "127.0.0.1", port: int = 0):
        self.relay = relay
        self._sock = socket.socket(socket.AF_INET, socket.SOCK_STREAM)
        self._sock.setsockopt(socket.SOL_SOCKET, socket.SO_REUSEADDR, 1)
        self._sock.bind((address, port))
        self._sock.listen(8)
        self.address, self.port = self._sock.getsockname()
        self._stop = threading.Event()
        self._thread = threading.Thread(target=self._accept_loop, daemon=True)
        self._conns: set[socket.socket] = set()
        self._lock = threading.Lock()

    def start(self) -> "StationServer":
        self._thread.start()
        return self

    def stop(self) -> None:
        self._stop.set()
        try:
            self._sock.close()
        except OSError:
            pass
        with self._lock:
            conns = list(self._conns)
        for c in conns:
            try:
                c.close()
            except OSError:
                pass
        self._thread.join(timeout=2.0)

    def _accept_loop(self) -> None:
        while not self._stop.is_set():
            try:
                conn, _peer = self._sock.accept()
            except OSError:
                return
            with self._lock:
                self._conns.add(conn)
            threading.Thread(
                target=self._serve, args=(conn,), daemon=True
            ).start()

    def _serve(self, conn: socket.socket) -> None:
        session = _Session(self.relay, conn)
        try:
            session.run(self._stop)
        finally:
            session.teardown()
            with self._lock:
                self._conns.discard(conn)
            try:
                conn.close()
            except OSError:
                pass


class _Session:
    def __init__(self, relay: Relay, conn: socket.socket):
        self.relay = relay
        self.conn = conn
        self.wlock = threading.Lock()
        self.queues: dict[str, deque] = {}
        self._event_cb = None
        self._meas_cb = None
        self._pump: threading.Thread | None = None
        self._pump_stop = threading.Event()

    def run(self, stop: threading.Event) -> None:
        buf = b""
        self.conn.settimeout(0.5)
        while not stop.is_set():
            try:
                chunk = self.conn.recv(4096)
            except socket.timeout:
                continue
            except OSError:
                return
            if not chunk:
                return
            buf += chunk
            if len(buf) > MAX_LINE_BYTES:
                self._send({"id": None, "ok": False, "error": "line-too-long"})
                return
            while b"\n" in buf:
                line, buf = buf.split(b"\n", 1)
                if line.strip():
                    self._handle(line)

    def _handle(self, line: bytes) -> None:
        try:
            msg = json.loads(line)
        except json.JSONDecodeError:
            self._send({"id": None, "ok": False, "error": "malformed-message"})
            return
        if not isinstance(msg, dict):
            self._send({"id": None, "ok": False, "error": "malformed-message"})
            return
        corr = msg.pop("id", None)
        op = msg.pop("op", None)
        try:
            if op == "ping":
                self._reject_extra(msg)
                stats = self.relay.stats()
                self._send(
                    {
                        "id": corr,
                        "ok": True,
                        "uptime_s": round(stats["uptime_s"], 3),
                        "samples": stats["samples"],
                    }
                )
            elif op == "get-config":
                self._reject_extra(msg)
                self._send({"id": corr, "ok": True, "config": self.relay.config_dict()})
            elif op == "set-settings":
                applied = self.relay.apply_settings(msg)
                self._send({"id": corr, "ok": True, "applied": applied})
            elif op == "subscribe":
                stream = msg.pop("stream", None)
                self._reject_extra(msg)
                self._subscribe(stream)
                self._send({"id": corr, "ok": True, "stream": stream})
            elif op == "unsubscribe":
                stream = msg.pop("stream", None)
                self._reject_extra(msg)
                self._unsubscribe(stream)
                self._send({"id": corr, "ok": True, "stream": stream})
            else:
                self._send({"id": corr, "ok": False, "error": "unknown-op"})
        except ConfigError as exc:
            self._send({"id": corr, "ok": False, "error": "bad-request", "detail": str(exc)})
        except _BadRequest as exc:
            self._send({"id": corr, "ok": False, "error": str(exc)})

    def _reject_extra(self, msg: dict) -> None:
        if msg:
            raise _BadRequest(f"unknown-field:{sorted(msg)[0]}")

    def _subscribe(self, stream) -> None:
        if stream not in STREAMS:
            raise _BadRequest("unknown-stream")
        if stream in self.queues:
            raise _BadRequest("already-subscribed")
        q: deque = deque(maxlen=256)  # drop-oldest backpressure
        self.queues[stream] = q
        if stream == "events":
            cb = lambda ev: q.append({"stream": "events", "event": json.loads(ev.to_json())})
            self._event_cb = cb
            self.relay.events.add_listener(cb)
        else:
            cb = lambda snap: q.append({"stream": "measurements", "data": snap})
            self._meas_cb = cb
            self.relay.add_measurement_listener(cb)
        if self._pump is None:
            self._pump = threading.Thread(target=self._pump_loop, daemon=True)
            self._pump.start()

    def _unsubscribe(self, stream) -> None:
        if stream not in self.queues:
            raise _BadRequest("not-subscribed")
        del self.queues[stream]
        if stream == "events" and self._event_cb:
            self.relay.events.remove_listener(self._event_cb)
            self._event_cb = None
        if stream == "measurements" and self._meas_cb:
            self.relay.remove_measurement_listener(self._meas_cb)
            self._meas_cb = None

    def _pump_loop(self) -> None:
        while not self._pump_stop.wait(0.02):
            for q in list(self.queues.values()):
                while q:
                    if not self._send(q.popleft()):
                        return

    def _send(self, obj: dict) -> bool:
        data = (json.dumps(obj, separators=(",", ":")) + "\n").encode()
        try:
            with self.wlock:
                self.conn.sendall(data)
            return True
        except OSError:
            return False

    def teardown(self) -> None:
        self._pump_stop.set()
        if self._event_cb:
            self.relay.events.remove_listener(self._event_cb)
        if self._meas_cb:
            self.relay.remove_measurement_listener(self._meas_cb)
        if self._pump:
            self._pump.join(timeout=1.0)


class _BadRequest(Exception):
    pass


class StationClient:
    """Blocking line-JSON client used by the test set and tests."""

    def __init__(self, address: str, port: int, timeout: float = 5.0):
        self.sock = socket.create_connection((address, port), timeout=timeout)
        self._buf = b""
        self._next_id = 1

    def request(self, op: str, **fields) -> dict:
        corr = self._next_id
        self._next_id += 1
        msg = {"id": corr, "op": op, **fields}
        self.sock.sendall((json.dumps(msg) + "\n").encode())
        while True:
            reply = self.read_message()
            if reply.get("id") == corr:
                return reply

    def read_message(self) -> dict:
        while b"\n" not in self._buf:
            chunk = self.sock.recv(4096)
            if not chunk:
                raise ConnectionError("station connection closed")
            self._buf += chunk
        line, self._buf = self._buf.split(b"\n", 1)
        return json.loads(line)

    def close(self) -> None:
        try:
            self.sock.close()
        except OSError:
            pass
