"""Analytic operate/no-operate oracle per protection function.

Built from the fault solution plus the function definitions themselves
(same loop equations, zone geometry, and curve the relay uses), so the
campaign can check the relay's behavior cell by cell.  A function is
expected to operate only if its analytic operate time also fits inside
the fault window.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from ..dsp import PhasorSet
from ..protection import (
    Direction,
    FunctionSettings,
    LOOPS,
    apparent_impedances,
    direction_of,
    u1_operate_time,
    zone_of,
)
from .faults import PhasorSolution

# trip must land this far before the fault window closes to count as expected
WINDOW_MARGIN_S = 0.06


@dataclass(frozen=True, slots=True)
class FunctionExpectation:
    operates: bool
    t_expected_s: float | None  # analytic operate time when it operates


def _phasor_set(solution: PhasorSolution) -> PhasorSet:
    ia, ib, ic = solution.fault_i
    va, vb, vc = solution.fault_v
    return PhasorSet(
        ia, ib, ic, ia + ib + ic, va, vb, vc, va + vb + vc, 60.0, 0
    )


def expected_behavior(
    solution: PhasorSolution,
    settings: FunctionSettings,
    fault_window_s: float,
) -> dict[str, FunctionExpectation]:
    ps = _phasor_set(solution)
    i_max = max(abs(z) for z in solution.fault_i)
    out: dict[str, FunctionExpectation] = {}

    def fits(t: float) -> bool:
        return t <= fault_window_s - WINDOW_MARGIN_S

    # instantaneous overcurrent
    s = settings.pioc
    if s.enabled and i_max > s.pickup_a and fits(s.delay_s):
        out["PIOC"] = FunctionExpectation(True, s.delay_s)
    else:
        out["PIOC"] = FunctionExpectation(False, None)

    # inverse-time overcurrent
    s = settings.ptoc
    t_curve = (
        u1_operate_time(i_max / s.pickup_a, s.time_dial) if s.enabled else None
    )
    if t_curve is not None and fits(t_curve):
        out["PTOC"] = FunctionExpectation(True, t_curve)
    else:
        out["PTOC"] = FunctionExpectation(False, None)

    # distance
    s = settings.pdis
    in_zone = False
    if s.enabled:
        loops = apparent_impedances(ps, s.k0, s.current_floor_a)
        in_zone = any(
            loops[name] is not None and zone_of(s, loops[name]) for name in LOOPS
        )
    if in_zone and fits(s.delay_s):
        out["PDIS"] = FunctionExpectation(True, s.delay_s)
    else:
        out["PDIS"] = FunctionExpectation(False, None)

    # directional overcurrent
    s = settings.pdir
    forward = False
    if s.enabled:
        floor = s.polarizing_floor_v
        for i_ph, (hi, lo) in (
            (ps.i_a, (ps.v_b, ps.v_c)),
            (ps.i_b, (ps.v_c, ps.v_a)),
            (ps.i_c, (ps.v_a, ps.v_b)),
        ):
            if abs(i_ph) > s.pickup_a and (
                direction_of(i_ph, hi - lo, s.rca_deg, floor) is Direction.FORWARD
            ):
                forward = True
                break
    if forward and fits(s.delay_s):
        out["PDIR"] = FunctionExpectation(True, s.delay_s)
    else:
        out["PDIR"] = FunctionExpectation(False, None)

    # voltage elements
    s = settings.ptov
    v_mags = [abs(z) for z in solution.fault_v]
    if s.enabled and max(v_mags) > s.pickup_pu * s.nominal_v and fits(s.delay_s):
        out["PTOV"] = FunctionExpectation(True, s.delay_s)
    else:
        out["PTOV"] = FunctionExpectation(False, None)

    s = settings.ptuv
    sagging = any(
        s.dead_line_pu * s.nominal_v < v < s.pickup_pu * s.nominal_v for v in v_mags
    )
    if s.enabled and sagging and fits(s.delay_s):
        out["PTUV"] = FunctionExpectation(True, s.delay_s)
    else:
        out["PTUV"] = FunctionExpectation(False, None)

    return out


def required_window_s(
    expectations: dict[str, FunctionExpectation], minimum_s: float = 0.35
) -> float:
    """Fault window long enough for every expected trip plus margin."""
    need = minimum_s
    for exp in expectations.values():
        if exp.operates and exp.t_expected_s is not None:
            need = max(need, exp.t_expected_s + 5 * WINDOW_MARGIN_S)
    return need


def plan_window_s(
    solution: PhasorSolution,
    settings: FunctionSettings,
    max_window_s: float,
    minimum_s: float = 0.35,
) -> float:
    """Fixed-point of window size vs which functions fit inside it."""
    window = max_window_s
    for _ in range(4):
        exps = expected_behavior(solution, settings, window)
        needed = min(required_window_s(exps, minimum_s), max_window_s)
        if math.isclose(needed, window, rel_tol=0.0, abs_tol=1e-9):
            break
        window = needed
    return window
