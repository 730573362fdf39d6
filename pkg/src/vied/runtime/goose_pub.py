"""GOOSE publication state machine.

On any dataset change: state number increments, sequence number resets,
one frame goes out immediately and a retransmission burst follows at
the configured offsets (2, 4, 8, 16 ms by default), then the stable
heartbeat interval (1000 ms) takes over.  Unchanged data is repeated at
the stable interval with an incrementing sequence number.  ttl is set
to twice the gap to the next scheduled transmission.
"""

from __future__ import annotations

from ..codec import DATASET_NAMES, GooseFrame, encode_goose
from .config import GoosePublication

_NOTHING: list = []


class GoosePublisher:
    def __init__(self, pub: GoosePublication, dataset_names=DATASET_NAMES):
        self._pub = pub
        self._names = dataset_names
        self._dst = pub.dst_mac_bytes()
        self._src = pub.src_mac_bytes()
        self._burst_s = tuple(ms / 1000.0 for ms in pub.retransmission_ms)
        self._stable_s = pub.stable_interval_ms / 1000.0
        self.st_num = 0
        self.sq_num = 0
        self._values: tuple[bool, ...] | None = None
        self._pending: list[float] = []  # scheduled retransmission times
        self._next_stable: float | None = None
        self._next_due: float = -1.0

    def update(self, values: tuple[bool, ...], now_s: float) -> list[bytes]:
        """Feed the current dataset; returns frames due at this instant."""
        if values == self._values and now_s < self._next_due:
            return _NOTHING
        out = []
        if values != self._values:
            self._values = values
            self.st_num = (self.st_num + 1) & 0xFFFFFFFF
            self.sq_num = 0
            self._pending = [now_s + dt for dt in self._burst_s]
            self._next_stable = (
                self._pending[-1] if self._pending else now_s
            ) + self._stable_s
            out.append(self._emit(now_s, first=True))
        out.extend(self.poll(now_s))
        return out

    def poll(self, now_s: float) -> list[bytes]:
        """Retransmissions whose schedule time has arrived."""
        if self._values is None:
            return []
        out = []
        while self._pending and self._pending[0] <= now_s:
            self._pending.pop(0)
            out.append(self._emit(now_s))
        while self._next_stable is not None and self._next_stable <= now_s:
            self._next_stable += self._stable_s
            out.append(self._emit(now_s))
        nxt = self._pending[0] if self._pending else None
        if nxt is None or (self._next_stable is not None and self._next_stable < nxt):
            nxt = self._next_stable
        self._next_due = nxt if nxt is not None else float("inf")
        return out

    def _ttl_ms(self, now_s: float) -> int:
        nxt = self._pending[0] if self._pending else self._next_stable
        if nxt is None:
            return int(2 * self._stable_s * 1000)
        return max(10, int(round(2 * max(nxt - now_s, 0.001) * 1000)))

    def _emit(self, now_s: float, first: bool = False) -> bytes:
        if not first:
            self.sq_num = (self.sq_num + 1) & 0xFFFFFFFF
        frame = GooseFrame(
            dst_mac=self._dst,
            src_mac=self._src,
            app_id=self._pub.app_id,
            go_id=self._pub.go_id,
            gocb_ref=self._pub.gocb_ref,
            dataset_ref=self._pub.dataset_ref,
            st_num=self.st_num,
            sq_num=self.sq_num,
            ttl_ms=self._ttl_ms(now_s),
            entries=tuple(zip(self._names, self._values)),
        )
        return encode_goose(frame)
