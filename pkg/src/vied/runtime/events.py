"""Protection event records and the append-only event log."""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass
from pathlib import Path

TRANSITIONS = ("pickup-rise", "pickup-fall", "trip-rise", "trip-fall")


@dataclass(frozen=True, slots=True)
class ProtectionEvent:
    t_ns: int  # monotonic since relay start
    sample_index: int
    function: str
    transition: str
    loop_id: str | None
    magnitudes: dict

    def to_json(self) -> str:
        return json.dumps(asdict(self), separators=(",", ":"), sort_keys=True)


class EventLog:
    """In-memory record list with optional line-JSON file append."""

    def __init__(self, path: str | Path | None = None, keep: int = 100_000):
        self.events: list[ProtectionEvent] = []
        self._keep = keep
        self._fh = open(path, "a", encoding="utf-8") if path else None
        self._listeners: list = []

    def add_listener(self, callback) -> None:
        self._listeners.append(callback)

    def remove_listener(self, callback) -> None:
        if callback in self._listeners:
            self._listeners.remove(callback)

    def append(self, event: ProtectionEvent) -> None:
        if self.events and event.t_ns < self.events[-1].t_ns:
            raise ValueError("event timestamps must be non-decreasing")
        self.events.append(event)
        if len(self.events) > self._keep:
            del self.events[: -self._keep]
        if self._fh:
            self._fh.write(event.to_json() + "\n")
        for cb in self._listeners:
            cb(event)

    def flush(self) -> None:
        if self._fh:
            self._fh.flush()

    def close(self) -> None:
        if self._fh:
            self._fh.close()
            self._fh = None
