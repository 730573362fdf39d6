"""Parallel-redundancy trailer handling and duplicate discard.

Every frame is sent once per LAN with a 6-byte redundancy trailer
appended to the inner Ethernet frame:

    seq_nr(u16)  lan_id(4 bits) lsdu_size(12 bits)  suffix 0x88FB

``lsdu_size`` counts the payload plus the trailer itself (mod 4096).
A receiver delivers the first copy of each (src_mac, seq_nr) and
discards the second; entries are forgotten after 400 ms or once a
source has 1024 outstanding sequence numbers, whichever comes first.
Frames without a consistent trailer are treated as non-redundant and
delivered as-is.
"""

from __future__ import annotations

from collections import OrderedDict
from dataclasses import dataclass

from .ber import StructureError

TRAILER_SUFFIX = 0x88FB
TRAILER_BYTES = 6
MAX_PAYLOAD_BYTES = 1470
LAN_A = "A"
LAN_B = "B"
_LAN_ID = {LAN_A: 0xA, LAN_B: 0xB}
_LAN_NAME = {0xA: LAN_A, 0xB: LAN_B}

DISCARD_WINDOW_S = 0.4
DISCARD_MAX_PER_SOURCE = 1024
_NEVER = float("-inf")


@dataclass(frozen=True, slots=True)
class PrpFrame:
    """Inner Ethernet frame plus redundancy-trailer fields."""

    payload: bytes
    lan_id: str
    seq_nr: int
    lsdu_size: int

    def to_bytes(self) -> bytes:
        lan = _LAN_ID[self.lan_id]
        return self.payload + bytes(
            (
                (self.seq_nr >> 8) & 0xFF,
                self.seq_nr & 0xFF,
                (lan << 4) | ((self.lsdu_size >> 8) & 0x0F),
                self.lsdu_size & 0xFF,
                0x88,
                0xFB,
            )
        )


def make_frames(payload: bytes, seq_nr: int) -> tuple[PrpFrame, PrpFrame]:
    """Duplicate one payload onto both LANs with a shared sequence number."""
    if len(payload) > MAX_PAYLOAD_BYTES:
        raise StructureError(
            f"payload {len(payload)} bytes exceeds {MAX_PAYLOAD_BYTES}"
        )
    if not 0 <= seq_nr <= 0xFFFF:
        raise StructureError("seq_nr outside u16 range")
    lsdu = (len(payload) + TRAILER_BYTES) & 0xFFF
    return (
        PrpFrame(payload, LAN_A, seq_nr, lsdu),
        PrpFrame(payload, LAN_B, seq_nr, lsdu),
    )


def parse_trailer(buf: bytes) -> PrpFrame | None:
    """Strip and validate the trailer; None when the frame is not redundant."""
    if len(buf) < TRAILER_BYTES + 14:
        return None
    if buf[-2] != 0x88 or buf[-1] != 0xFB:
        return None
    lan = buf[-4] >> 4
    if lan not in _LAN_NAME:
        return None
    lsdu = ((buf[-4] & 0x0F) << 8) | buf[-3]
    if lsdu != len(buf) & 0xFFF:
        return None
    return PrpFrame(
        payload=buf[:-TRAILER_BYTES],
        lan_id=_LAN_NAME[lan],
        seq_nr=(buf[-6] << 8) | buf[-5],
        lsdu_size=lsdu,
    )


class PrpSender:
    """Per-publisher sequence counter wrapping at 16 bits."""

    __slots__ = ("next_seq",)

    def __init__(self, start: int = 0):
        self.next_seq = start & 0xFFFF

    def send(self, payload: bytes) -> tuple[PrpFrame, PrpFrame]:
        frames = make_frames(payload, self.next_seq)
        self.next_seq = (self.next_seq + 1) & 0xFFFF
        return frames


class DuplicateDiscard:
    """Receiver-side discard table keyed on (src_mac, seq_nr).

    One insertion-ordered table per source; stale entries are purged
    lazily from the front of the visited source's table (insertion order
    is time order), so the per-frame cost stays O(1).
    """

    __slots__ = ("window_s", "max_per_source", "_sources")

    def __init__(
        self,
        window_s: float = DISCARD_WINDOW_S,
        max_per_source: int = DISCARD_MAX_PER_SOURCE,
    ):
        self.window_s = window_s
        self.max_per_source = max_per_source
        self._sources: dict[bytes, OrderedDict[int, float]] = {}

    def deliver(self, buf: bytes, now_s: float) -> bytes | None:
        """First copy: inner payload. Duplicate: None. Non-redundant: as-is."""
        frame = parse_trailer(buf)
        if frame is None:
            return buf
        payload = frame.payload
        src = payload[6:12]
        table = self._sources.get(src)
        if table is None:
            table = self._sources[src] = OrderedDict()
        horizon = now_s - self.window_s
        seq_nr = frame.seq_nr
        if table.get(seq_nr, _NEVER) >= horizon:
            return None
        # stale entries fail the freshness test above, so physical cleanup
        # can ride on the size cap alone
        table[seq_nr] = now_s
        table.move_to_end(seq_nr)
        if len(table) > self.max_per_source:
            table.popitem(last=False)
        return payload
