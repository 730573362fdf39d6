"""Inverse-time operate curves.

Only the US moderately-inverse (U1) curve is configured here:

    t(M) = TD * (0.0226 + 0.0104 / (M^0.02 - 1))   for M > 1

with M the measured current as a multiple of pickup and TD the time
dial.  At or below pickup the element never operates (returns None).
"""

from __future__ import annotations

U1_A = 0.0226
U1_B = 0.0104
U1_P = 0.02


def u1_operate_time(multiple: float, time_dial: float = 1.0) -> float | None:
    if multiple < 0:
        raise ValueError("multiple of pickup must be non-negative")
    if multiple <= 1.0:
        return None
    return time_dial * (U1_A + U1_B / (multiple**U1_P - 1.0))
