"""The relay pipeline: frames in, protection decisions and GOOSE out.

Per received sampled-value frame: redundancy duplicate discard, decode,
scaling to engineering units, one frequency-tracker step, eight phasor
steps, six protection steps, then GOOSE publication whenever any output
changed (with burst retransmission) plus the stable heartbeat.

The pipeline is strictly sequential per sample and owns all its state;
the station server interacts only under `lock`, so settings changes
apply atomically between samples.  In simulated mode time is virtual
(sample_index / sample_rate), making runs bit-reproducible.
"""

from __future__ import annotations

import copy
import threading
import time
from typing import Callable

from ..codec import DecodeError, DuplicateDiscard
from ..codec.sv import SvStreamDecoder
from ..dsp import ChannelBank
from ..protection import FUNCTION_ORDER, FunctionOutput, ProtectionSet

_ALL_FALSE = (False,) * 13
from .config import ConfigError, RelayConfig, config_to_dict, update_dataclass
from .events import EventLog, ProtectionEvent
from .goose_pub import GoosePublisher

_IDLE = FunctionOutput()


class Relay:
    def __init__(
        self,
        config: RelayConfig,
        clock: str = "virtual",
        event_log_path: str | None = None,
    ):
        config.validate()
        self.config = config
        self.lock = threading.Lock()
        self.sample_rate = float(config.samples_per_second)
        self.dt = 1.0 / self.sample_rate
        self._wall = clock == "wall"
        self._t0 = time.monotonic() if self._wall else 0.0
        self.bank = ChannelBank(
            nominal_hz=config.nominal_frequency_hz,
            sample_rate_hz=self.sample_rate,
            nominal_current_a=config.nominal_current_a,
            nominal_voltage_v=config.nominal_voltage_v,
            fll_gamma=config.fll_gamma,
            process_noise_scale=config.phasor_process_noise_scale,
            measurement_noise_scale=config.phasor_measurement_noise_scale,
        )
        self.protection = ProtectionSet()
        self.publisher = GoosePublisher(config.goose_publication)
        self.dedup = DuplicateDiscard()
        self._decoder = SvStreamDecoder()
        self.events = EventLog(event_log_path or (config.event_log_path or None))
        self.samples_processed = 0
        self.frames_discarded = 0
        self.frames_ignored = 0
        self.decode_errors = 0
        self.sample_gaps = 0
        self._expected_smp_cnt: int | None = None
        self._outputs: dict[str, FunctionOutput] = {f: _IDLE for f in FUNCTION_ORDER}
        self._trip = False
        self._i_scale = config.current_scale_a_per_count
        self._v_scale = config.voltage_scale_v_per_count
        self._snapshot_every = max(1, int(self.sample_rate // 10))  # 10 Hz
        self._blanking = config.boot_blanking_samples
        self._snapshot: dict = {}
        self._measurement_listeners: list[Callable[[dict], None]] = []
        self.started_monotonic = time.monotonic()

    # -- time ---------------------------------------------------------------

    def now(self) -> float:
        if self._wall:
            return time.monotonic() - self._t0
        return self.samples_processed * self.dt

    # -- station-facing surface (thread-safe under self.lock) ----------------

    def apply_settings(self, partial: dict) -> dict:
        """Strict partial update; returns the applied settings as a dict.

        The update lands on a copy first so a rejected request cannot
        leave half-applied values behind; the swap happens between
        samples (the pipeline holds the same lock per sample).
        """
        with self.lock:
            candidate = copy.deepcopy(self.config.settings)
            update_dataclass(candidate, partial, "settings")
            try:
                candidate.validate()
            except ValueError as exc:
                raise ConfigError(str(exc)) from None
            self.config.settings = candidate
            return config_to_dict(self.config)["settings"]

    def config_dict(self) -> dict:
        with self.lock:
            return config_to_dict(self.config)

    def snapshot(self) -> dict:
        with self.lock:
            return dict(self._snapshot) if self._snapshot else self._build_snapshot()

    def add_measurement_listener(self, cb: Callable[[dict], None]) -> None:
        with self.lock:
            self._measurement_listeners.append(cb)

    def remove_measurement_listener(self, cb) -> None:
        with self.lock:
            if cb in self._measurement_listeners:
                self._measurement_listeners.remove(cb)

    def stats(self) -> dict:
        with self.lock:
            return {
                "samples": self.samples_processed,
                "discarded_duplicates": self.frames_discarded,
                "ignored_frames": self.frames_ignored,
                "decode_errors": self.decode_errors,
                "sample_gaps": self.sample_gaps,
                "uptime_s": time.monotonic() - self.started_monotonic,
            }

    # -- the pipeline ---------------------------------------------------------

    def process_frame(self, buf: bytes) -> list[bytes]:
        """One received process-bus frame -> GOOSE frames to publish now."""
        with self.lock:
            return self._process_locked(buf)

    def _process_locked(self, buf: bytes) -> list[bytes]:
        now = (
            self.samples_processed * self.dt
            if not self._wall
            else time.monotonic() - self._t0
        )
        payload = self.dedup.deliver(buf, now)
        if payload is None:
            self.frames_discarded += 1
            return []
        if len(payload) < 14 or payload[12] != 0x88 or payload[13] != 0xBA:
            self.frames_ignored += 1  # not sampled values (e.g. inbound GOOSE)
            return []
        try:
            smp_cnt, c, sv_id, app_id = self._decoder.fields(payload)
        except DecodeError:
            self.decode_errors += 1
            return []
        sub = self.config.sv_subscription
        if sv_id != sub.sv_id or app_id != sub.app_id:
            self.frames_ignored += 1
            return []

        expected = self._expected_smp_cnt
        if expected is not None and smp_cnt != expected:
            self.sample_gaps += 1
            self._system_event("sample-gap", {"expected": expected, "got": smp_cnt})
        self._expected_smp_cnt = (smp_cnt + 1) % self.config.samples_per_second

        i_s = self._i_scale
        v_s = self._v_scale
        ps = self.bank.step(
            (
                c[0] * i_s,
                c[1] * i_s,
                c[2] * i_s,
                c[3] * i_s,
                c[4] * v_s,
                c[5] * v_s,
                c[6] * v_s,
                c[7] * v_s,
            )
        )
        outputs = self.protection.step(self.config.settings, ps, self.dt)
        sample_index = self.samples_processed
        self.samples_processed += 1
        now = (
            self.samples_processed * self.dt
            if not self._wall
            else time.monotonic() - self._t0
        )
        if sample_index < self._blanking:
            # outputs disarmed while the estimators acquire the signal
            outputs = {name: _IDLE for name in FUNCTION_ORDER}

        prev = self._outputs
        trip_any = False
        changed = False
        for name in FUNCTION_ORDER:
            out = outputs[name]
            was = prev[name]
            if out is was:
                continue  # both idle singletons: nothing asserted
            if out.trip:
                trip_any = True
            if out.pickup != was.pickup or out.trip != was.trip:
                changed = True
                self._transition_events(name, was, out, ps, sample_index)
        self._outputs = outputs
        self._trip = trip_any

        if changed or not self.samples_processed % self._snapshot_every:
            self._build_snapshot(ps)
            if self._measurement_listeners and (
                not self.samples_processed % self._snapshot_every
            ):
                snap = dict(self._snapshot)
                for cb in self._measurement_listeners:
                    cb(snap)

        if not (changed or trip_any) and self._entries_idle(outputs):
            return self.publisher.update(_ALL_FALSE, now)
        o_pioc = outputs["PIOC"]
        o_ptoc = outputs["PTOC"]
        o_pdis = outputs["PDIS"]
        o_pdir = outputs["PDIR"]
        o_ptov = outputs["PTOV"]
        o_ptuv = outputs["PTUV"]
        entries = (
            trip_any,
            o_pioc.pickup,
            o_pioc.trip,
            o_ptoc.pickup,
            o_ptoc.trip,
            o_pdis.pickup,
            o_pdis.trip,
            o_pdir.pickup,
            o_pdir.trip,
            o_ptov.pickup,
            o_ptov.trip,
            o_ptuv.pickup,
            o_ptuv.trip,
        )
        return self.publisher.update(entries, now)

    @staticmethod
    def _entries_idle(outputs) -> bool:
        for out in outputs.values():
            if out.pickup or out.trip:
                return False
        return True

    # -- internals ------------------------------------------------------------

    def _transition_events(self, name, was, out, ps, sample_index) -> None:
        t_ns = round(sample_index * self.dt * 1e9) if not self._wall else round(
            (time.monotonic() - self._t0) * 1e9
        )
        mags = {
            "ia": round(abs(ps.i_a), 3),
            "ib": round(abs(ps.i_b), 3),
            "ic": round(abs(ps.i_c), 3),
            "va": round(abs(ps.v_a), 1),
            "vb": round(abs(ps.v_b), 1),
            "vc": round(abs(ps.v_c), 1),
            "frequency": round(ps.frequency, 4),
        }
        if out.pickup and not was.pickup:
            self.events.append(
                ProtectionEvent(t_ns, sample_index, name, "pickup-rise", out.loop_id, mags)
            )
        if out.trip and not was.trip:
            self.events.append(
                ProtectionEvent(t_ns, sample_index, name, "trip-rise", out.loop_id, mags)
            )
        if was.trip and not out.trip:
            self.events.append(
                ProtectionEvent(t_ns, sample_index, name, "trip-fall", out.loop_id, mags)
            )
        if was.pickup and not out.pickup:
            self.events.append(
                ProtectionEvent(t_ns, sample_index, name, "pickup-fall", out.loop_id, mags)
            )

    def _system_event(self, kind: str, detail: dict) -> None:
        t_ns = round(self.samples_processed * self.dt * 1e9) if not self._wall else round(
            (time.monotonic() - self._t0) * 1e9
        )
        self.events.append(
            ProtectionEvent(t_ns, self.samples_processed, "SYSTEM", kind, None, detail)
        )

    def _build_snapshot(self, ps=None) -> dict:
        if ps is None:
            mags = [self.bank.channel_rms(i) for i in range(8)]
            freq = self.bank.fll.frequency
        else:
            mags = [
                abs(ps.i_a),
                abs(ps.i_b),
                abs(ps.i_c),
                abs(ps.i_n),
                abs(ps.v_a),
                abs(ps.v_b),
                abs(ps.v_c),
                abs(ps.v_n),
            ]
            freq = ps.frequency
        outs = self._outputs
        self._snapshot = {
            "sample_index": self.samples_processed,
            "t_s": round(self.now(), 9),
            "frequency_hz": round(freq, 4),
            "rms": {
                name: round(mags[i], 3)
                for i, name in enumerate(
                    ("IA", "IB", "IC", "IN", "VA", "VB", "VC", "VN")
                )
            },
            "functions": {
                name: {"pickup": outs[name].pickup, "trip": outs[name].trip}
                for name in FUNCTION_ORDER
            },
            "trip": self._trip,
        }
        return self._snapshot

    def close(self) -> None:
        self.events.close()
