"""UDP process-bus transport and the event-log file, end to end."""

import json
import socket
import time

import pytest

from vied.codec import decode_goose, parse_trailer
from vied.runtime import Relay, RelayConfig
from vied.runtime.transport import UdpProcessBus
from vied.testkit import (
    FaultScenario,
    LineModel,
    SvStreamer,
    fault_phasors,
    prp_wrap,
    synthesize_waveform,
)


@pytest.fixture
def fault_lans():
    line = LineModel()
    scn = FaultScenario(fault_type="ABC", duration_s=0.2)
    sol = fault_phasors(line, scn)
    wf = synthesize_waveform(line, scn, sol, 4800.0, prefault_s=1.0)
    return prp_wrap(SvStreamer().encode_waveform(wf.data))


def test_udp_bus_receives_dedups_and_publishes(fault_lans):
    cfg = RelayConfig()
    cfg.transport.lan_a_port = 0  # ephemeral
    cfg.transport.lan_b_port = 0
    rx_goose = socket.socket(socket.AF_INET, socket.SOCK_DGRAM)
    rx_goose.bind(("127.0.0.1", 0))
    rx_goose.settimeout(5.0)
    cfg.transport.goose_port_a = rx_goose.getsockname()[1]
    cfg.transport.goose_port_b = rx_goose.getsockname()[1]

    relay = Relay(cfg)
    bus = UdpProcessBus(cfg.transport)
    bus.start(relay)
    port_a, port_b = bus.ports
    tx = socket.socket(socket.AF_INET, socket.SOCK_DGRAM)
    lan_a, lan_b = fault_lans
    try:
        for a, b in zip(lan_a, lan_b):
            tx.sendto(a, ("127.0.0.1", port_a))
            tx.sendto(b, ("127.0.0.1", port_b))
        # wait for the pipeline to chew through the stream
        deadline = time.time() + 20.0
        trip_seen = False
        while time.time() < deadline and not trip_seen:
            try:
                buf, _peer = rx_goose.recvfrom(2048)
            except socket.timeout:
                break
            prp = parse_trailer(buf)
            assert prp is not None  # published frames carry the trailer
            goose = decode_goose(prp.payload)
            if goose.entry("TRIP"):
                trip_seen = True
        assert trip_seen
        stats = relay.stats()
        assert stats["samples"] > 0
        assert stats["discarded_duplicates"] >= stats["samples"] // 2
    finally:
        tx.close()
        bus.stop()
        rx_goose.close()
        relay.close()


def test_event_log_file_is_line_json(tmp_path, fault_lans):
    log_path = tmp_path / "events.jsonl"
    relay = Relay(RelayConfig(), event_log_path=str(log_path))
    lan_a, _ = fault_lans
    for a in lan_a:
        relay.process_frame(a)
    relay.events.flush()
    lines = log_path.read_text().splitlines()
    assert lines
    records = [json.loads(line) for line in lines]
    assert any(
        r["function"] == "PIOC" and r["transition"] == "trip-rise" for r in records
    )
    stamps = [r["t_ns"] for r in records]
    assert stamps == sorted(stamps)
    relay.close()
