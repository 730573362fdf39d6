"""Per-function parameterization with field defaults from the reference setup:
instantaneous overcurrent 2500 A / 0 s, inverse-time overcurrent 1300 A on the
U1 curve with time dial 1, distance mho at 100% of line impedance / 0 s,
undervoltage 0.9 pu / 0.1 s.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

NOMINAL_VOLTAGE_V = 500e3 / math.sqrt(3.0)  # phase-ground RMS of a 500 kV system
NOMINAL_CURRENT_A = 1000.0

DEFAULT_LINE_Z1_OHM = complex(2.8, 32.5)  # 100 km at 0.028+j0.325 ohm/km
DEFAULT_LINE_Z0_OHM = complex(30.0, 100.0)


def ground_compensation(z1_line: complex, z0_line: complex) -> complex:
    """Residual compensation factor k0 = (Z0 - Z1) / (3*Z1)."""
    return (z0_line - z1_line) / (3.0 * z1_line)


@dataclass(slots=True)
class PiocSettings:
    pickup_a: float = 2500.0
    delay_s: float = 0.0
    enabled: bool = True


@dataclass(slots=True)
class PtocSettings:
    pickup_a: float = 1300.0
    curve: str = "U1"
    time_dial: float = 1.0
    enabled: bool = True


@dataclass(slots=True)
class QuadSettings:
    r_reach_ohm: float = 32.0
    x_reach_ohm: float = 32.5


@dataclass(slots=True)
class PdisSettings:
    reach_fraction: float = 1.0
    line_impedance_ohm: complex = DEFAULT_LINE_Z1_OHM
    characteristic: str = "mho"  # impedance | mho | reactance | quadrilateral
    k0: complex = field(
        default_factory=lambda: ground_compensation(
            DEFAULT_LINE_Z1_OHM, DEFAULT_LINE_Z0_OHM
        )
    )
    delay_s: float = 0.0
    quad: QuadSettings = field(default_factory=QuadSettings)
    nominal_current_a: float = NOMINAL_CURRENT_A
    # starting reach fraction right after a disturbance; the effective
    # reach ramps from this up to 100% as the estimators converge,
    # guarding against transient overreach near the rim
    transient_reach_factor: float = 0.5
    enabled: bool = True

    @property
    def reach_impedance(self) -> complex:
        return self.reach_fraction * self.line_impedance_ohm

    @property
    def current_floor_a(self) -> float:
        # loops with less measuring current than this are not evaluated
        return 0.05 * self.nominal_current_a


@dataclass(slots=True)
class PdirSettings:
    pickup_a: float = 2500.0
    rca_deg: float = 30.0
    delay_s: float = 0.0
    nominal_voltage_v: float = NOMINAL_VOLTAGE_V
    enabled: bool = True

    @property
    def polarizing_floor_v(self) -> float:
        # 1% of the phase-phase nominal; the polarizing quantity is phase-phase
        return 0.01 * math.sqrt(3.0) * self.nominal_voltage_v


@dataclass(slots=True)
class PtovSettings:
    pickup_pu: float = 1.1
    nominal_v: float = NOMINAL_VOLTAGE_V
    delay_s: float = 0.1
    enabled: bool = True


@dataclass(slots=True)
class PtuvSettings:
    pickup_pu: float = 0.9
    nominal_v: float = NOMINAL_VOLTAGE_V
    delay_s: float = 0.1
    dead_line_pu: float = 0.05
    enabled: bool = True


_CHARACTERISTICS = ("impedance", "mho", "reactance", "quadrilateral")


@dataclass(slots=True)
class FunctionSettings:
    # overcurrent elements act on the lowest current estimate of this
    # many consecutive samples: a security window that keeps estimator
    # reset transients from operating the instantaneous elements; faults
    # barely above pickup must also hold above it through the window,
    # which is what makes operate time grow with fault resistance
    confirmation_samples: int = 24
    pioc: PiocSettings = field(default_factory=PiocSettings)
    ptoc: PtocSettings = field(default_factory=PtocSettings)
    pdis: PdisSettings = field(default_factory=PdisSettings)
    pdir: PdirSettings = field(default_factory=PdirSettings)
    ptov: PtovSettings = field(default_factory=PtovSettings)
    ptuv: PtuvSettings = field(default_factory=PtuvSettings)

    def validate(self) -> None:
        if self.confirmation_samples < 1:
            raise ValueError("confirmation_samples must be at least 1")
        if self.pioc.pickup_a <= 0 or self.ptoc.pickup_a <= 0 or self.pdir.pickup_a <= 0:
            raise ValueError("current pickups must be positive")
        if self.ptov.pickup_pu <= 0 or self.ptuv.pickup_pu <= 0:
            raise ValueError("voltage pickups must be positive")
        if not 0 < self.pdis.reach_fraction <= 2:
            raise ValueError("reach_fraction must be in (0, 2]")
        if self.pdis.characteristic not in _CHARACTERISTICS:
            raise ValueError(f"characteristic must be one of {_CHARACTERISTICS}")
        for delay in (
            self.pioc.delay_s,
            self.pdis.delay_s,
            self.pdir.delay_s,
            self.ptov.delay_s,
            self.ptuv.delay_s,
        ):
            if delay < 0:
                raise ValueError("delays must be non-negative")
        if self.ptoc.time_dial <= 0:
            raise ValueError("time_dial must be positive")
        if self.ptuv.dead_line_pu < 0 or self.ptuv.dead_line_pu >= self.ptuv.pickup_pu:
            raise ValueError("dead_line_pu must be in [0, pickup_pu)")
