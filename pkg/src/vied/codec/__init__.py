"""Bit-exact process-bus frame codecs: sampled values, GOOSE, redundancy."""

from .ber import (
    BadLength,
    BadStructure,
    BadTag,
    DecodeError,
    EncodeError,
    LengthError,
    StructureError,
    TruncatedFrame,
    WrongEtherType,
)
from .goose import (
    DATASET_NAMES,
    ETHERTYPE_GOOSE,
    GOOSE_APPID_DEFAULT,
    GooseFrame,
    decode_goose,
    encode_goose,
)
from .prp import (
    DISCARD_WINDOW_S,
    LAN_A,
    LAN_B,
    DuplicateDiscard,
    PrpFrame,
    PrpSender,
    make_frames,
    parse_trailer,
)
from .sv import (
    CHANNEL_NAMES,
    CURRENT_LSB_A,
    ETHERTYPE_SV,
    SAMPLES_PER_SECOND_DEFAULT,
    SV_APPID_DEFAULT,
    VOLTAGE_LSB_V,
    SampledValueFrame,
    decode_sv,
    encode_sv,
)

__all__ = [
    "BadLength",
    "BadStructure",
    "BadTag",
    "CHANNEL_NAMES",
    "CURRENT_LSB_A",
    "DATASET_NAMES",
    "DISCARD_WINDOW_S",
    "DecodeError",
    "ETHERTYPE_GOOSE",
    "ETHERTYPE_SV",
    "EncodeError",
    "GOOSE_APPID_DEFAULT",
    "GooseFrame",
    "LAN_A",
    "LAN_B",
    "LengthError",
    "DuplicateDiscard",
    "PrpFrame",
    "PrpSender",
    "SAMPLES_PER_SECOND_DEFAULT",
    "SV_APPID_DEFAULT",
    "SampledValueFrame",
    "StructureError",
    "TruncatedFrame",
    "VOLTAGE_LSB_V",
    "WrongEtherType",
    "decode_goose",
    "decode_sv",
    "encode_goose",
    "encode_sv",
    "make_frames",
    "parse_trailer",
]
