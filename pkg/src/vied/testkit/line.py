"""Transmission-line and fault-scenario models.

Defaults describe a 500 kV, 100 km line on a single series-impedance
section (shunt capacitance neglected: <2% effect on relaying quantities
at this length), fed from equal 500 kV grid equivalents 10 degrees
apart, 30 ohm (60 ohm zero-sequence) inductive sources at both ends.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

FAULT_TYPES = ("AG", "BC", "BCG", "ABC")
RESISTANCES_OHM = (0.0, 15.0, 30.0, 50.0)
INCEPTION_ANGLES_DEG = (0.0, 45.0, 90.0)


@dataclass(slots=True)
class SourceModel:
    emf_kv: float = 500.0  # phase-phase RMS
    angle_deg: float = 0.0
    z1_ohm: complex = 30j
    z0_ohm: complex = 60j

    @property
    def emf_phase_v(self) -> complex:
        mag = self.emf_kv * 1e3 / math.sqrt(3.0)
        return complex(
            mag * math.cos(math.radians(self.angle_deg)),
            mag * math.sin(math.radians(self.angle_deg)),
        )


@dataclass(slots=True)
class LineModel:
    nominal_kv: float = 500.0
    length_km: float = 100.0
    z1_ohm_per_km: complex = complex(0.028, 0.325)
    z0_ohm_per_km: complex = complex(0.30, 1.00)
    source_s: SourceModel = field(default_factory=lambda: SourceModel(angle_deg=10.0))
    source_r: SourceModel = field(default_factory=SourceModel)
    frequency_hz: float = 60.0

    def validate(self) -> None:
        if self.length_km <= 0:
            raise ValueError("line length must be positive")
        for z in (
            self.z1_ohm_per_km,
            self.z0_ohm_per_km,
            self.source_s.z1_ohm,
            self.source_s.z0_ohm,
            self.source_r.z1_ohm,
            self.source_r.z0_ohm,
        ):
            if z.real < 0:
                raise ValueError("impedances must have non-negative real part")

    @property
    def z1_total(self) -> complex:
        return self.z1_ohm_per_km * self.length_km

    @property
    def z0_total(self) -> complex:
        return self.z0_ohm_per_km * self.length_km

    @property
    def nominal_phase_v(self) -> float:
        return self.nominal_kv * 1e3 / math.sqrt(3.0)

    @property
    def omega(self) -> float:
        return 2.0 * math.pi * self.frequency_hz


@dataclass(slots=True)
class FaultScenario:
    fault_type: str = "AG"
    location_fraction: float = 0.5
    resistance_ohm: float = 0.0
    inception_angle_deg: float = 0.0
    duration_s: float = 1.6
    repeats: int = 50

    def validate(self) -> None:
        if self.fault_type not in FAULT_TYPES:
            raise ValueError(f"fault_type must be one of {FAULT_TYPES}")
        if not 0.0 < self.location_fraction < 1.0:
            raise ValueError("location_fraction must lie strictly inside (0, 1)")
        if self.resistance_ohm < 0:
            raise ValueError("fault resistance must be non-negative")
        if self.duration_s <= 0 or self.repeats < 1:
            raise ValueError("duration must be positive, repeats at least 1")

    @property
    def scenario_id(self) -> str:
        return (
            f"{self.fault_type}"
            f"_R{self.resistance_ohm:g}"
            f"_A{self.inception_angle_deg:g}"
        )


def all_scenarios(
    duration_s: float = 1.6, repeats: int = 50, location_fraction: float = 0.5
) -> list[FaultScenario]:
    """The full campaign matrix: 4 types x 4 resistances x 3 angles = 48."""
    out = []
    for ftype in FAULT_TYPES:
        for rf in RESISTANCES_OHM:
            for angle in INCEPTION_ANGLES_DEG:
                out.append(
                    FaultScenario(
                        fault_type=ftype,
                        location_fraction=location_fraction,
                        resistance_ohm=rf,
                        inception_angle_deg=angle,
                        duration_s=duration_s,
                        repeats=repeats,
                    )
                )
    return out


def find_scenario(scenario_id: str, scenarios=None) -> FaultScenario:
    for s in scenarios or all_scenarios():
        if s.scenario_id == scenario_id:
            return s
    raise KeyError(f"unknown scenario {scenario_id!r}")


def _complex_of(v):
    if isinstance(v, (list, tuple)) and len(v) == 2:
        return complex(v[0], v[1])
    if isinstance(v, (int, float)):
        return complex(v, 0.0)
    raise ValueError(f"expected [re, im], got {v!r}")


def line_from_dict(data: dict) -> LineModel:
    line = LineModel()
    for key in ("nominal_kv", "length_km", "frequency_hz"):
        if key in data:
            setattr(line, key, float(data[key]))
    for key in ("z1_ohm_per_km", "z0_ohm_per_km"):
        if key in data:
            setattr(line, key, _complex_of(data[key]))
    for name, src in (("source_s", line.source_s), ("source_r", line.source_r)):
        for key, value in data.get(name, {}).items():
            if key in ("emf_kv", "angle_deg"):
                setattr(src, key, float(value))
            elif key in ("z1_ohm", "z0_ohm"):
                setattr(src, key, _complex_of(value))
            else:
                raise ValueError(f"{name}: unknown field {key!r}")
    known = {
        "nominal_kv", "length_km", "frequency_hz", "z1_ohm_per_km",
        "z0_ohm_per_km", "source_s", "source_r",
    }
    unknown = set(data) - known
    if unknown:
        raise ValueError(f"line model: unknown field {sorted(unknown)}")
    line.validate()
    return line


def scenarios_from_list(items: list) -> list[FaultScenario]:
    out = []
    for item in items:
        s = FaultScenario()
        for key, value in item.items():
            if not hasattr(s, key):
                raise ValueError(f"scenario: unknown field {key!r}")
            setattr(s, key, value)
        s.validate()
        out.append(s)
    return out
