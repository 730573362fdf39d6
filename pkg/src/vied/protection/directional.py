"""Current-direction classification by quadrature polarization.

The faulted phase current is compared against the quadrature
phase-phase voltage rotated +90 deg (phase A polarized by VBC, B by
VCA, C by VAB).  With the relay characteristic angle added, the current
is Forward when the resulting angle lies strictly inside (-90, +90) deg
and Reverse otherwise.  Without a usable polarizing voltage (magnitude
under the floor) the direction is Undetermined.
"""

from __future__ import annotations

import enum
import math


class Direction(enum.Enum):
    FORWARD = "forward"
    REVERSE = "reverse"
    UNDETERMINED = "undetermined"


_PI = math.pi
_HALF_PI = math.pi / 2.0


def direction_of(
    current: complex,
    polarizing_voltage: complex,
    rca_deg: float = 30.0,
    voltage_floor: float = 0.0,
) -> Direction:
    if abs(polarizing_voltage) <= voltage_floor:
        return Direction.UNDETERMINED
    ref = math.atan2(polarizing_voltage.imag, polarizing_voltage.real) + _HALF_PI
    theta = math.atan2(current.imag, current.real) - ref + math.radians(rca_deg)
    theta = math.remainder(theta, 2.0 * _PI)  # wrap to (-pi, pi]
    return Direction.FORWARD if -_HALF_PI < theta < _HALF_PI else Direction.REVERSE
