"""Protection functions: overcurrent, distance, directional, voltage."""

from .curves import u1_operate_time
from .directional import Direction, direction_of
from .functions import (
    FUNCTION_ORDER,
    FunctionOutput,
    Pdir,
    Pdis,
    Pioc,
    ProtectionSet,
    Ptoc,
    Ptov,
    Ptuv,
)
from .impedance import LOOPS, apparent_impedances, zone_contains, zone_of
from .settings import (
    FunctionSettings,
    PdirSettings,
    PdisSettings,
    PiocSettings,
    PtocSettings,
    PtovSettings,
    PtuvSettings,
    QuadSettings,
    ground_compensation,
)

__all__ = [
    "Direction",
    "FUNCTION_ORDER",
    "FunctionOutput",
    "FunctionSettings",
    "LOOPS",
    "Pdir",
    "PdirSettings",
    "Pdis",
    "PdisSettings",
    "Pioc",
    "PiocSettings",
    "ProtectionSet",
    "Ptoc",
    "PtocSettings",
    "Ptov",
    "PtovSettings",
    "Ptuv",
    "PtuvSettings",
    "QuadSettings",
    "apparent_impedances",
    "direction_of",
    "ground_compensation",
    "u1_operate_time",
    "zone_contains",
    "zone_of",
]
