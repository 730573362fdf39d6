"""Steady-state fault solution by symmetrical components.

The faulted network is solved in the sequence domain: Thevenin
impedances at the fault point (both line halves with their sources in
parallel), the textbook sequence connection per fault type, current
division back to the sending-end relay, and superposition with the
pre-fault load flow.  Fault resistance enters as the ground-path
resistance for AG/BCG, the phase-phase resistance for BC, and a
per-phase star resistance for ABC.

Relay quantities are phase-domain RMS phasors at the sending bus;
convention x(t) = sqrt(2)*|X|*sin(w*t + angle(X)).
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

from .line import FaultScenario, LineModel

_A = cmath.exp(2j * math.pi / 3)
_A2 = _A * _A


class FaultConfigurationError(ValueError):
    """The network as configured has no solution (singular loop)."""


@dataclass(frozen=True, slots=True)
class PhasorSolution:
    """Relay-side phasors before and during the fault (RMS, phase A ref)."""

    prefault_i: tuple[complex, complex, complex]
    prefault_v: tuple[complex, complex, complex]
    fault_i: tuple[complex, complex, complex]
    fault_v: tuple[complex, complex, complex]
    fault_point_prefault_v: complex  # phase A at the fault location
    dc_loop_impedance: complex  # positive-sequence loop + fault resistance

    def max_fault_current(self) -> float:
        return max(abs(z) for z in self.fault_i)

    def min_fault_voltage(self) -> float:
        return min(abs(z) for z in self.fault_v)


def _phases(x0: complex, x1: complex, x2: complex) -> tuple[complex, complex, complex]:
    return (
        x0 + x1 + x2,
        x0 + _A2 * x1 + _A * x2,
        x0 + _A * x1 + _A2 * x2,
    )


def fault_phasors(line: LineModel, scenario: FaultScenario) -> PhasorSolution:
    line.validate()
    scenario.validate()
    m = scenario.location_fraction
    rf = complex(scenario.resistance_ohm, 0.0)

    es = line.source_s.emf_phase_v
    er = line.source_r.emf_phase_v
    zs1_s = line.source_s.z1_ohm
    zs0_s = line.source_s.z0_ohm
    zs1_r = line.source_r.z1_ohm
    zs0_r = line.source_r.z0_ohm
    z1l = line.z1_total
    z0l = line.z0_total

    a1 = zs1_s + m * z1l  # sending branch to the fault point
    b1 = zs1_r + (1.0 - m) * z1l
    a0 = zs0_s + m * z0l
    b0 = zs0_r + (1.0 - m) * z0l

    loop = zs1_s + z1l + zs1_r
    if abs(loop) == 0.0:
        raise FaultConfigurationError("zero positive-sequence loop impedance")
    i_pre = (es - er) / loop
    eth = es - a1 * i_pre  # pre-fault voltage at the fault point

    z1 = a1 * b1 / (a1 + b1)
    z2 = z1
    z0 = a0 * b0 / (a0 + b0)

    ftype = scenario.fault_type
    if ftype == "ABC":
        denom = z1 + rf
        if abs(denom) == 0.0:
            raise FaultConfigurationError("singular three-phase fault loop")
        i1 = eth / denom
        i2 = i0 = 0j
    elif ftype == "AG":
        denom = z1 + z2 + z0 + 3.0 * rf
        if abs(denom) == 0.0:
            raise FaultConfigurationError("singular ground-fault loop")
        i1 = i2 = i0 = eth / denom
    elif ftype == "BC":
        denom = z1 + z2 + rf
        if abs(denom) == 0.0:
            raise FaultConfigurationError("singular phase-fault loop")
        i1 = eth / denom
        i2 = -i1
        i0 = 0j
    elif ftype == "BCG":
        zg = z0 + 3.0 * rf
        denom = z1 + z2 * zg / (z2 + zg)
        if abs(denom) == 0.0:
            raise FaultConfigurationError("singular double-ground loop")
        i1 = eth / denom
        i2 = -i1 * zg / (z2 + zg)
        i0 = -i1 * z2 / (z2 + zg)
    else:
        raise FaultConfigurationError(f"unknown fault type {ftype!r}")

    # current division: the sending branch carries the remote-side share
    k1 = b1 / (a1 + b1)
    k0 = b0 / (a0 + b0)
    i1_rel = i_pre + i1 * k1
    i2_rel = i2 * k1
    i0_rel = i0 * k0
    v1_rel = es - zs1_s * i1_rel
    v2_rel = -zs1_s * i2_rel
    v0_rel = -zs0_s * i0_rel

    return PhasorSolution(
        prefault_i=_phases(0j, i_pre, 0j),
        prefault_v=_phases(0j, es - zs1_s * i_pre, 0j),
        fault_i=_phases(i0_rel, i1_rel, i2_rel),
        fault_v=_phases(v0_rel, v1_rel, v2_rel),
        fault_point_prefault_v=eth,
        dc_loop_impedance=z1 + rf,
    )
