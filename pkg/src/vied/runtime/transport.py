"""Process-bus transports.

Simulated mode carries frames over two loopback UDP sockets standing in
for the two redundant LANs; raw mode uses kernel packet sockets bound to
two interfaces (needs CAP_NET_RAW).  Either way the transport owns the
redundancy duplication on transmit: every published frame goes out on
both LANs with the redundancy trailer; receive-side duplicate discard
happens inside the relay.
"""

from __future__ import annotations

import socket
import threading

from ..codec import PrpSender
from .config import TransportConfig
from .relay import Relay


class UdpProcessBus:
    """Two UDP "LANs" feeding one relay; publishes GOOSE to fixed endpoints."""

    def __init__(self, cfg: TransportConfig):
        self.cfg = cfg
        self._rx_a = self._bind(cfg.bind_address, cfg.lan_a_port)
        self._rx_b = self._bind(cfg.bind_address, cfg.lan_b_port)
        self._tx = socket.socket(socket.AF_INET, socket.SOCK_DGRAM)
        self._prp = PrpSender()
        self._threads: list[threading.Thread] = []
        self._stop = threading.Event()

    @staticmethod
    def _bind(address: str, port: int) -> socket.socket:
        s = socket.socket(socket.AF_INET, socket.SOCK_DGRAM)
        s.setsockopt(socket.SOL_SOCKET, socket.SO_REUSEADDR, 1)
        s.bind((address, port))
        s.settimeout(0.25)
        return s

    @property
    def ports(self) -> tuple[int, int]:
        return (self._rx_a.getsockname()[1], self._rx_b.getsockname()[1])

    def start(self, relay: Relay) -> None:
        for sock in (self._rx_a, self._rx_b):
            t = threading.Thread(
                target=self._rx_loop, args=(sock, relay), daemon=True
            )
            t.start()
            self._threads.append(t)

    def _rx_loop(self, sock: socket.socket, relay: Relay) -> None:
        while not self._stop.is_set():
            try:
                buf, _peer = sock.recvfrom(2048)
            except socket.timeout:
                continue
            except OSError:
                return
            for frame in relay.process_frame(buf):
                self.publish(frame)

    def publish(self, inner_frame: bytes) -> None:
        a, b = self._prp.send(inner_frame)
        cfg = self.cfg
        try:
            self._tx.sendto(a.to_bytes(), (cfg.goose_host, cfg.goose_port_a))
            self._tx.sendto(b.to_bytes(), (cfg.goose_host, cfg.goose_port_b))
        except OSError:
            pass  # transport loss is tolerated; the pipeline continues

    def stop(self) -> None:
        self._stop.set()
        for t in self._threads:
            t.join(timeout=1.0)
        for s in (self._rx_a, self._rx_b, self._tx):
            try:
                s.close()
            except OSError:
                pass


ETH_P_ALL = 0x0003


class RawEthernetBus:
    """Packet-socket transport bound to two physical/virtual interfaces."""

    def __init__(self, cfg: TransportConfig):
        if not (cfg.lan_a_device and cfg.lan_b_device):
            raise ValueError("raw transport needs lan_a_device and lan_b_device")
        self.cfg = cfg
        self._socks = []
        for dev in (cfg.lan_a_device, cfg.lan_b_device):
            s = socket.socket(
                socket.AF_PACKET, socket.SOCK_RAW, socket.htons(ETH_P_ALL)
            )
            s.bind((dev, 0))
            s.settimeout(0.25)
            self._socks.append(s)
        self._prp = PrpSender()
        self._threads: list[threading.Thread] = []
        self._stop = threading.Event()

    def start(self, relay: Relay) -> None:
        for sock in self._socks:
            t = threading.Thread(
                target=self._rx_loop, args=(sock, relay), daemon=True
            )
            t.start()
            self._threads.append(t)

    def _rx_loop(self, sock, relay: Relay) -> None:
        while not self._stop.is_set():
            try:
                buf = sock.recv(2048)
            except socket.timeout:
                continue
            except OSError:
                return
            for frame in relay.process_frame(buf):
                self.publish(frame)

    def publish(self, inner_frame: bytes) -> None:
        a, b = self._prp.send(inner_frame)
        for sock, frame in zip(self._socks, (a, b)):
            try:
                sock.send(frame.to_bytes())
            except OSError:
                pass

    def stop(self) -> None:
        self._stop.set()
        for t in self._threads:
            t.join(timeout=1.0)
        for s in self._socks:
            try:
                s.close()
            except OSError:
                pass


def make_transport(cfg: TransportConfig):
    if cfg.mode == "raw":
        return RawEthernetBus(cfg)
    return UdpProcessBus(cfg)
