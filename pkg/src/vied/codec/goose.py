"""GOOSE Ethernet frame codec.

Wire format (all integers big-endian):

    dst_mac(6) src_mac(6) ethertype=0x88B8
    appid(u16) length(u16) reserved1(u16) reserved2(u16)
    0x61 {
        0x80 gocb_ref (ascii)
        0x81 ttl_ms (u32)
        0x82 dataset_ref (ascii)
        0x83 go_id (ascii)
        0x85 st_num (u32)
        0x86 sq_num (u32)
        0x8A entry count (u16)
        0xAB { 0x83 boolean(1) ... }        dataset values, fixed order
    }

The wire carries booleans positionally; entry names come from the
subscriber's dataset map (decode defaults to the publisher's canonical
13-flag dataset when the count matches, positional names otherwise).
"""

from __future__ import annotations

import struct
from dataclasses import dataclass

from .ber import (
    BadStructure,
    LengthError,
    Reader,
    StructureError,
    TruncatedFrame,
    WrongEtherType,
    encode_tlv,
)

ETHERTYPE_GOOSE = 0x88B8
GOOSE_APPID_DEFAULT = 0x0001
MAX_IDENT_BYTES = 65
_U32_MAX = (1 << 32) - 1

# Canonical publisher dataset: overall trip first, then per-function
# pickup/trip pairs in fixed function order.
DATASET_NAMES = (
    "TRIP",
    "PIOC.pickup",
    "PIOC.trip",
    "PTOC.pickup",
    "PTOC.trip",
    "PDIS.pickup",
    "PDIS.trip",
    "PDIR.pickup",
    "PDIR.trip",
    "PTOV.pickup",
    "PTOV.trip",
    "PTUV.pickup",
    "PTUV.trip",
)

_HDR = struct.Struct(">HHHH")


@dataclass(frozen=True, slots=True)
class GooseFrame:
    """One GOOSE frame: state/sequence numbers plus a named boolean dataset."""

    dst_mac: bytes
    src_mac: bytes
    app_id: int = GOOSE_APPID_DEFAULT
    go_id: str = "VIED/GO1"
    gocb_ref: str = "VIED/LLN0$GO$GO1"
    dataset_ref: str = "VIED/LLN0$Protection"
    st_num: int = 1
    sq_num: int = 0
    ttl_ms: int = 2000
    entries: tuple[tuple[str, bool], ...] = ()

    def validate(self) -> None:
        if len(self.dst_mac) != 6 or len(self.src_mac) != 6:
            raise StructureError("MAC addresses must be 6 bytes")
        if not 0 <= self.app_id <= 0xFFFF:
            raise StructureError("app_id outside u16 range")
        for ident in (self.go_id, self.gocb_ref, self.dataset_ref):
            if len(ident.encode("ascii")) > MAX_IDENT_BYTES:
                raise LengthError(f"identifier longer than {MAX_IDENT_BYTES} bytes")
        for n in (self.st_num, self.sq_num, self.ttl_ms):
            if not 0 <= n <= _U32_MAX:
                raise StructureError("st_num/sq_num/ttl_ms outside u32 range")
        if len(self.entries) > 256:
            raise StructureError("more than 256 dataset entries")

    def entry(self, name: str) -> bool:
        for n, v in self.entries:
            if n == name:
                return v
        raise KeyError(name)

    def values(self) -> tuple[bool, ...]:
        return tuple(v for _, v in self.entries)


def encode_goose(frame: GooseFrame) -> bytes:
    frame.validate()
    all_data = b"".join(
        encode_tlv(0x83, b"\xff" if value else b"\x00") for _, value in frame.entries
    )
    pdu = encode_tlv(
        0x61,
        encode_tlv(0x80, frame.gocb_ref.encode("ascii"))
        + encode_tlv(0x81, struct.pack(">I", frame.ttl_ms))
        + encode_tlv(0x82, frame.dataset_ref.encode("ascii"))
        + encode_tlv(0x83, frame.go_id.encode("ascii"))
        + encode_tlv(0x85, struct.pack(">I", frame.st_num))
        + encode_tlv(0x86, struct.pack(">I", frame.sq_num))
        + encode_tlv(0x8A, struct.pack(">H", len(frame.entries)))
        + encode_tlv(0xAB, all_data),
    )
    return (
        frame.dst_mac
        + frame.src_mac
        + b"\x88\xb8"
        + _HDR.pack(frame.app_id, len(pdu) + 8, 0, 0)
        + pdu
    )


def _ident(rd: Reader, what: str) -> str:
    if rd.remaining() > MAX_IDENT_BYTES:
        raise BadStructure(f"{what} too long", rd.pos)
    try:
        return rd.value().decode("ascii")
    except UnicodeDecodeError:
        raise BadStructure(f"{what} is not ascii", rd.pos) from None


def decode_goose(buf: bytes, entry_names: tuple[str, ...] | None = None) -> GooseFrame:
    """Decode wire bytes; names assigned from ``entry_names`` or defaults."""
    if len(buf) < 22:
        raise TruncatedFrame("truncated header", len(buf))
    if buf[12] != 0x88 or buf[13] != 0xB8:
        raise WrongEtherType(
            f"EtherType 0x{buf[12]:02X}{buf[13]:02X} is not 0x88B8", 12
        )
    app_id, length, _r1, _r2 = _HDR.unpack_from(buf, 14)
    if length != len(buf) - 14:
        raise BadStructure(f"header length {length} != payload {len(buf) - 14}", 16)
    rd = Reader(buf, 22, len(buf))
    pdu = rd.tlv(0x61)
    rd.expect_exhausted()
    gocb_ref = _ident(pdu.tlv(0x80), "gocb_ref")
    ttl_r = pdu.tlv(0x81)
    if ttl_r.remaining() != 4:
        raise BadStructure("ttl must be 4 bytes", ttl_r.pos)
    ttl_ms = ttl_r.uint()
    dataset_ref = _ident(pdu.tlv(0x82), "dataset_ref")
    go_id = _ident(pdu.tlv(0x83), "go_id")
    st_r = pdu.tlv(0x85)
    if st_r.remaining() != 4:
        raise BadStructure("st_num must be 4 bytes", st_r.pos)
    st_num = st_r.uint()
    sq_r = pdu.tlv(0x86)
    if sq_r.remaining() != 4:
        raise BadStructure("sq_num must be 4 bytes", sq_r.pos)
    sq_num = sq_r.uint()
    cnt_r = pdu.tlv(0x8A)
    if cnt_r.remaining() != 2:
        raise BadStructure("entry count must be 2 bytes", cnt_r.pos)
    declared = cnt_r.uint()
    data = pdu.tlv(0xAB)
    pdu.expect_exhausted()
    values = []
    while data.remaining():
        b = data.tlv(0x83)
        if b.remaining() != 1:
            raise BadStructure("boolean must be 1 byte", b.pos)
        values.append(b.uint() != 0)
    if len(values) != declared:
        raise BadStructure(
            f"declared {declared} entries, found {len(values)}", data.pos
        )
    if entry_names is None:
        if len(values) == len(DATASET_NAMES):
            entry_names = DATASET_NAMES
        else:
            entry_names = tuple(f"entry{i}" for i in range(len(values)))
    elif len(entry_names) != len(values):
        raise BadStructure(
            f"name map has {len(entry_names)} entries, frame {len(values)}", data.pos
        )
    return GooseFrame(
        dst_mac=buf[0:6],
        src_mac=buf[6:12],
        app_id=app_id,
        go_id=go_id,
        gocb_ref=gocb_ref,
        dataset_ref=dataset_ref,
        st_num=st_num,
        sq_num=sq_num,
        ttl_ms=ttl_ms,
        entries=tuple(zip(entry_names, values)),
    )
