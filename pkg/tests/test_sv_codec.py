"""Sampled-value frame codec: round-trips, field encoding, malformed input."""

import struct

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from vied.codec import (
    DecodeError,
    LengthError,
    SampledValueFrame,
    StructureError,
    TruncatedFrame,
    WrongEtherType,
    decode_sv,
    encode_sv,
)

DST = bytes.fromhex("010ccd040001")
SRC = bytes.fromhex("0030a7000001")


def make_frame(**kw):
    base = dict(
        dst_mac=DST,
        src_mac=SRC,
        app_id=0x4000,
        sv_id="VMU0001",
        smp_cnt=0,
        smp_synch=1,
        conf_rev=1,
        channels=(0,) * 8,
        quality=(0,) * 8,
    )
    base.update(kw)
    return SampledValueFrame(**base)


def test_round_trip_zero_frame():
    f = make_frame()
    assert decode_sv(encode_sv(f)) == f


def test_channel_field_is_big_endian_signed_32bit():
    # oracle: struct.pack('>i', 6_275_500) == 00 5F C1 AC
    f = make_frame(channels=(6_275_500, 0, 0, 0, 0, 0, 0, 0))
    wire = encode_sv(f)
    expected = struct.pack(">i", 6_275_500)
    assert expected == bytes.fromhex("005fc1ac")
    assert expected in wire
    assert decode_sv(wire).channels[0] == 6_275_500


def test_negative_channel_round_trip():
    f = make_frame(channels=(-6_275_500, -1, 0, 0, 0, 0, 0, 0))
    assert decode_sv(encode_sv(f)).channels == (-6_275_500, -1, 0, 0, 0, 0, 0, 0)


def test_smp_cnt_at_rate_rejected():
    with pytest.raises(StructureError):
        encode_sv(make_frame(smp_cnt=4800))
    # last valid count encodes fine
    assert decode_sv(encode_sv(make_frame(smp_cnt=4799))).smp_cnt == 4799


def test_wrong_channel_count_rejected():
    with pytest.raises(StructureError):
        encode_sv(make_frame(channels=(0,) * 7))
    with pytest.raises(StructureError):
        encode_sv(make_frame(quality=(0,) * 9))


def test_long_sv_id_rejected():
    with pytest.raises(LengthError):
        encode_sv(make_frame(sv_id="X" * 35))
    assert decode_sv(encode_sv(make_frame(sv_id="X" * 34))).sv_id == "X" * 34


def test_empty_input_is_truncated_header():
    with pytest.raises(TruncatedFrame):
        decode_sv(b"")


def test_wrong_ethertype():
    wire = bytearray(encode_sv(make_frame()))
    wire[12:14] = b"\x08\x00"
    with pytest.raises(WrongEtherType) as exc:
        decode_sv(bytes(wire))
    assert exc.value.offset == 12


def test_truncation_always_typed_error():
    wire = encode_sv(make_frame(channels=(1, -2, 3, -4, 5, -6, 7, -8)))
    for cut in range(len(wire)):
        with pytest.raises(DecodeError):
            decode_sv(wire[:cut])


def test_scaling_to_engineering_units():
    f = make_frame(channels=(6_275_500, 0, 0, 0, 28_867_513, 0, 0, 0))
    eng = f.engineering_units()
    assert eng[0] == pytest.approx(6275.5)  # 1 mA per count
    assert eng[4] == pytest.approx(288675.13)  # 10 mV per count


channels_st = st.tuples(
    *[st.integers(min_value=-(2**31), max_value=2**31 - 1)] * 8
)
quality_st = st.tuples(*[st.integers(min_value=0, max_value=2**32 - 1)] * 8)


@settings(max_examples=300, deadline=None)
@given(
    app_id=st.integers(min_value=0, max_value=0xFFFF),
    sv_id=st.text(
        alphabet=st.characters(min_codepoint=32, max_codepoint=126),
        min_size=0,
        max_size=34,
    ),
    smp_cnt=st.integers(min_value=0, max_value=4799),
    smp_synch=st.integers(min_value=0, max_value=255),
    conf_rev=st.integers(min_value=0, max_value=2**32 - 1),
    channels=channels_st,
    quality=quality_st,
    dst=st.binary(min_size=6, max_size=6),
    src=st.binary(min_size=6, max_size=6),
)
def test_round_trip_property(
    app_id, sv_id, smp_cnt, smp_synch, conf_rev, channels, quality, dst, src
):
    f = SampledValueFrame(
        dst_mac=dst,
        src_mac=src,
        app_id=app_id,
        sv_id=sv_id,
        smp_cnt=smp_cnt,
        smp_synch=smp_synch,
        conf_rev=conf_rev,
        channels=channels,
        quality=quality,
    )
    wire = encode_sv(f)
    assert len(wire) <= 1522
    assert decode_sv(wire) == f


@settings(max_examples=500, deadline=None)
@given(st.binary(min_size=0, max_size=200))
def test_decode_total_on_random_bytes(buf):
    try:
        decode_sv(buf)
    except DecodeError:
        pass
