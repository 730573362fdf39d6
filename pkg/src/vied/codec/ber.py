"""BER TLV primitives (definite-length only) shared by the SV and GOOSE codecs.

Decoding is total: every malformed input raises a :class:`DecodeError`
subclass carrying the byte offset of the defect, never anything else.
"""

from __future__ import annotations


class DecodeError(ValueError):
    """Malformed frame. ``offset`` points at the offending byte."""

    def __init__(self, message: str, offset: int):
        super().__init__(f"{message} (offset {offset})")
        self.offset = offset


class TruncatedFrame(DecodeError):
    """Frame ends before a declared field does."""


class WrongEtherType(DecodeError):
    """Frame is not of the expected EtherType."""


class BadTag(DecodeError):
    """Unexpected TLV tag."""


class BadLength(DecodeError):
    """Length field is indefinite, oversized, or inconsistent."""


class BadStructure(DecodeError):
    """Well-formed TLVs that violate the frame's structural contract."""


class EncodeError(ValueError):
    """Frame fields violate the encoder's preconditions."""


class StructureError(EncodeError):
    """Wrong element count (e.g. channel count != 8)."""


class LengthError(EncodeError):
    """A variable-length field exceeds its limit."""


def encode_tlv(tag: int, payload: bytes) -> bytes:
    n = len(payload)
    if n < 0x80:
        return bytes((tag, n)) + payload
    ext = n.to_bytes((n.bit_length() + 7) // 8, "big")
    return bytes((tag, 0x80 | len(ext))) + ext + payload


def read_tlv(buf: bytes, pos: int, end: int, want: int) -> tuple[int, int]:
    """Consume one TLV with the expected tag; returns (value_start, value_end).

    Allocation-free companion to :class:`Reader` for hot decode paths.
    """
    if pos + 2 > end:
        raise TruncatedFrame("truncated TLV header", pos)
    tag = buf[pos]
    if tag != want:
        raise BadTag(f"expected tag 0x{want:02X}, found 0x{tag:02X}", pos)
    first = buf[pos + 1]
    if first < 0x80:
        vstart = pos + 2
        vend = vstart + first
    elif first == 0x80:
        raise BadLength("indefinite length not allowed", pos + 1)
    else:
        n_ext = first & 0x7F
        if n_ext > 4:
            raise BadLength(f"length-of-length {n_ext} too large", pos + 1)
        vstart = pos + 2 + n_ext
        if vstart > end:
            raise TruncatedFrame("truncated long-form length", pos + 1)
        vend = vstart + int.from_bytes(buf[pos + 2 : vstart], "big")
    if vend > end:
        raise TruncatedFrame("TLV value exceeds frame", vstart)
    return vstart, vend


class Reader:
    """Sequential TLV reader over one byte buffer.

    All reads are bounds-checked; the reader never indexes past ``end``.
    """

    __slots__ = ("buf", "pos", "end")

    def __init__(self, buf: bytes, pos: int, end: int):
        self.buf = buf
        self.pos = pos
        self.end = end

    def tlv(self, expect_tag: int) -> "Reader":
        """Consume one TLV with the given tag, returning a reader over its value."""
        buf = self.buf
        pos = self.pos
        if pos + 2 > self.end:
            raise TruncatedFrame("truncated TLV header", pos)
        tag = buf[pos]
        if tag != expect_tag:
            raise BadTag(f"expected tag 0x{expect_tag:02X}, found 0x{tag:02X}", pos)
        first = buf[pos + 1]
        if first < 0x80:
            length = first
            vstart = pos + 2
        elif first == 0x80:
            raise BadLength("indefinite length not allowed", pos + 1)
        else:
            n_ext = first & 0x7F
            if n_ext > 4:
                raise BadLength(f"length-of-length {n_ext} too large", pos + 1)
            vstart = pos + 2 + n_ext
            if vstart > self.end:
                raise TruncatedFrame("truncated long-form length", pos + 1)
            length = int.from_bytes(buf[pos + 2 : vstart], "big")
        vend = vstart + length
        if vend > self.end:
            raise TruncatedFrame("TLV value exceeds frame", vstart)
        self.pos = vend
        return Reader(buf, vstart, vend)

    def value(self) -> bytes:
        return self.buf[self.pos : self.end]

    def uint(self) -> int:
        return int.from_bytes(self.buf[self.pos : self.end], "big")

    def remaining(self) -> int:
        return self.end - self.pos

    def expect_exhausted(self) -> None:
        if self.pos != self.end:
            raise BadStructure("trailing bytes inside constructed value", self.pos)
