"""Networked scenario execution against a running relay daemon.

Frames stream over UDP to the daemon's two LAN ports in real time
(paced in 10 ms blocks); trip GOOSE is collected from the daemon's
publish endpoints and latency measured on the wall clock, as a hardware
test set would.  Wall-clock numbers are host-dependent; the simulated
in-process mode is the reproducible path.
"""

from __future__ import annotations

import math
import random
import socket
import time
from dataclasses import dataclass

from ..codec import DecodeError, decode_goose
from ..protection import FUNCTION_ORDER
from ..runtime import RelayConfig
from .campaign import _TRIP_FLAGS, LatencyRecord
from .expectations import expected_behavior, plan_window_s
from .faults import fault_phasors
from .line import FaultScenario, LineModel
from .streamer import SvStreamer, prp_wrap


@dataclass(slots=True)
class RelayEndpoint:
    host: str = "127.0.0.1"
    lan_a_port: int = 15102
    lan_b_port: int = 15103
    goose_port_a: int = 15104
    goose_port_b: int = 15105


def parse_relay_spec(spec: str) -> RelayEndpoint:
    """HOST[:lanA:lanB:gooseA:gooseB] with the daemon's defaults."""
    parts = spec.split(":")
    ep = RelayEndpoint(host=parts[0])
    if len(parts) > 1:
        ports = [int(p) for p in parts[1:]]
        if len(ports) != 4:
            raise ValueError("relay spec needs HOST or HOST:pA:pB:gA:gB")
        ep.lan_a_port, ep.lan_b_port, ep.goose_port_a, ep.goose_port_b = ports
    return ep


def run_scenario_udp(
    endpoint: RelayEndpoint,
    line: LineModel,
    scenario: FaultScenario,
    relay_config: RelayConfig,
    seed: int = 1,
    scenario_index: int = 0,
    prefault_s: float = 1.0,
) -> list[LatencyRecord]:
    fs = float(relay_config.samples_per_second)
    solution = fault_phasors(line, scenario)
    window = plan_window_s(solution, relay_config.settings, scenario.duration_s)
    expectations = expected_behavior(solution, relay_config.settings, window)
    streamer = SvStreamer(
        sv_id=relay_config.sv_subscription.sv_id,
        app_id=relay_config.sv_subscription.app_id,
        samples_per_second=relay_config.samples_per_second,
    )
    effective = FaultScenario(
        fault_type=scenario.fault_type,
        location_fraction=scenario.location_fraction,
        resistance_ohm=scenario.resistance_ohm,
        inception_angle_deg=scenario.inception_angle_deg,
        duration_s=window,
        repeats=scenario.repeats,
    )

    tx = socket.socket(socket.AF_INET, socket.SOCK_DGRAM)
    rx = socket.socket(socket.AF_INET, socket.SOCK_DGRAM)
    rx.setsockopt(socket.SOL_SOCKET, socket.SO_REUSEADDR, 1)
    rx.bind(("", endpoint.goose_port_a))
    rx.setblocking(False)
    dst_a = (endpoint.host, endpoint.lan_a_port)
    dst_b = (endpoint.host, endpoint.lan_b_port)
    records: list[LatencyRecord] = []
    block = 48  # 10 ms of samples per pacing block

    try:
        from ..testkit.waveform import synthesize_waveform

        for repeat in range(scenario.repeats):
            rng = random.Random(seed * 1_000_003 + scenario_index * 1_009 + repeat)
            phase = rng.uniform(0.0, 2.0 * math.pi)
            wf = synthesize_waveform(
                line, effective, solution, fs, prefault_s=prefault_s,
                phase_offset_rad=phase,
            )
            lan_a, lan_b = prp_wrap(streamer.encode_waveform(wf.data))
            trips: dict[str, float] = {}
            t0 = time.monotonic()
            t_inc_wall = t0 + wf.t_inception_s
            n = len(lan_a)
            for start in range(0, n, block):
                target = t0 + start / fs
                delay = target - time.monotonic()
                if delay > 0:
                    time.sleep(delay)
                for k in range(start, min(start + block, n)):
                    tx.sendto(lan_a[k], dst_a)
                    tx.sendto(lan_b[k], dst_b)
                _drain(rx, trips, t_inc_wall)
            deadline = time.monotonic() + 0.1
            while time.monotonic() < deadline:
                _drain(rx, trips, t_inc_wall)
                time.sleep(0.005)
            for fn in FUNCTION_ORDER:
                exp = expectations[fn]
                if fn in trips:
                    t_op = trips[fn]
                    t_exp = exp.t_expected_s if exp.operates else None
                    records.append(
                        LatencyRecord(
                            effective.scenario_id, fn, repeat, t_op, t_exp,
                            (t_op - t_exp) if t_exp is not None else None, True,
                        )
                    )
                else:
                    records.append(
                        LatencyRecord(
                            effective.scenario_id, fn, repeat, None, None, None,
                            False,
                        )
                    )
    finally:
        tx.close()
        rx.close()
    return records


def _drain(rx: socket.socket, trips: dict, t_inc_wall: float) -> None:
    while True:
        try:
            buf, _peer = rx.recvfrom(2048)
        except BlockingIOError:
            return
        except OSError:
            return
        now = time.monotonic()
        # published frames carry a redundancy trailer; strip if present
        if len(buf) > 20 and buf[-2] == 0x88 and buf[-1] == 0xFB:
            buf = buf[:-6]
        try:
            goose = decode_goose(buf)
        except DecodeError:
            continue
        for fn, flag in _TRIP_FLAGS.items():
            if fn not in trips and goose.entry(flag):
                trips[fn] = now - t_inc_wall
