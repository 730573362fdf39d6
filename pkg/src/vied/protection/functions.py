"""The six protection functions as deterministic per-sample state machines.

Each function owns its timer state; a step is a pure function of
(state, settings, phasor set, dt).  Pickups use strict '>' (or '<' for
undervoltage); definite-time elements trip once pickup has been held
for the configured delay, measured from the sample on which pickup
asserts (a 0 s delay trips on that same sample); any dropout resets
timers and accumulators instantly.

The steps run once per sample per function, so the common no-pickup
path is kept allocation-free (a shared idle output) and the distance
scan divides only for loops that could possibly reach the zone.
"""

from __future__ import annotations

from dataclasses import dataclass

from .curves import u1_operate_time
from .directional import Direction, direction_of
from .impedance import zone_contains
from .settings import (
    FunctionSettings,
    PdirSettings,
    PdisSettings,
    PiocSettings,
    PtocSettings,
    PtovSettings,
    PtuvSettings,
)

FUNCTION_ORDER = ("PIOC", "PTOC", "PDIS", "PDIR", "PTOV", "PTUV")

_EPS_S = 1e-9


@dataclass(slots=True, eq=True)
class FunctionOutput:
    pickup: bool = False
    trip: bool = False
    timer_elapsed_s: float = 0.0
    loop_id: str | None = None


_IDLE = FunctionOutput()


class _DefiniteTime:
    """Shared pickup-hold timer; held time is counted in whole samples."""

    __slots__ = ("held", "picked")

    def __init__(self):
        self.held = 0
        self.picked = False

    def reset(self) -> None:
        self.held = 0
        self.picked = False

    def advance(self, picked: bool, dt: float, delay_s: float) -> tuple[float, bool]:
        if not picked:
            self.reset()
            return 0.0, False
        if self.picked:
            self.held += 1
        else:
            self.picked = True
            self.held = 0
        elapsed = self.held * dt
        return elapsed, elapsed + _EPS_S >= delay_s


class Pioc:
    """Instantaneous (or fixed-delay) overcurrent on the highest phase."""

    __slots__ = ("timer",)

    def __init__(self):
        self.timer = _DefiniteTime()

    def step(self, settings: PiocSettings, ps, dt: float, i_max=None) -> FunctionOutput:
        if not settings.enabled:
            self.timer.reset()
            return _IDLE
        if i_max is None:
            i_max = max(abs(ps.i_a), abs(ps.i_b), abs(ps.i_c))
        if not i_max > settings.pickup_a:
            self.timer.reset()
            return _IDLE
        elapsed, trip = self.timer.advance(True, dt, settings.delay_s)
        return FunctionOutput(True, trip, elapsed)


class Ptoc:
    """Inverse-time overcurrent integrating dt / t_op(M) while picked up."""

    __slots__ = ("timer", "accumulator")

    def __init__(self):
        self.timer = _DefiniteTime()
        self.accumulator = 0.0

    def step(self, settings: PtocSettings, ps, dt: float, i_max=None) -> FunctionOutput:
        if not settings.enabled:
            self.timer.reset()
            self.accumulator = 0.0
            return _IDLE
        if i_max is None:
            i_max = max(abs(ps.i_a), abs(ps.i_b), abs(ps.i_c))
        if not i_max > settings.pickup_a:
            self.timer.reset()
            self.accumulator = 0.0
            return _IDLE
        elapsed, _ = self.timer.advance(True, dt, float("inf"))
        t_op = u1_operate_time(i_max / settings.pickup_a, settings.time_dial)
        if t_op is not None:
            self.accumulator += dt / t_op
        return FunctionOutput(True, self.accumulator >= 1.0 - 1e-12, elapsed)


class Pdis:
    """Distance element over six measuring loops with a definite-time delay.

    The scan computes each loop's apparent impedance only when the
    measuring current clears the floor and the impedance magnitude bound
    |num| <= |den| * r_outer can still place it inside the zone; the
    bound is exact for circular zones, conservative otherwise.

    Right after a disturbance the element is held off entirely (the
    estimates are transient garbage), then the reach ramps from the
    transient factor up to 100% as the estimates converge: the standard
    guard against dynamic overreach: faults deep inside the zone commit
    early, rim-marginal ones are decided at full reach on steady
    estimates.
    """

    __slots__ = ("timer", "loop_id", "_geom_key", "_geom")

    def __init__(self):
        self.timer = _DefiniteTime()
        self.loop_id = None
        self._geom_key = None
        self._geom = None

    def _geometry(self, settings: PdisSettings, convergence: float):
        """Zone geometry for the effective reach, memoized on its inputs."""
        key = (
            settings.characteristic,
            settings.reach_fraction,
            settings.line_impedance_ohm,
            settings.transient_reach_factor,
            convergence,
        )
        if key == self._geom_key:
            return self._geom
        zr = settings.reach_impedance
        if convergence < 1.0:
            f0 = settings.transient_reach_factor
            zr *= f0 + (1.0 - f0) * convergence
        mho = settings.characteristic == "mho"
        if mho:
            half = 0.5 * zr
            geom = (zr, True, half, abs(half), abs(zr))
        elif settings.characteristic == "impedance":
            geom = (zr, False, None, None, abs(zr))
        elif settings.characteristic == "quadrilateral":
            q = settings.quad
            geom = (zr, False, None, None, (q.r_reach_ohm**2 + q.x_reach_ohm**2) ** 0.5)
        else:  # reactance: a half-plane, no magnitude bound
            geom = (zr, False, None, None, None)
        self._geom_key = key
        self._geom = geom
        return geom

    def step(
        self, settings: PdisSettings, ps, dt: float, mags=None
    ) -> FunctionOutput:
        if not settings.enabled:
            self.timer.reset()
            return _IDLE
        if ps.settling:
            # estimates re-converging after a disturbance: impedance ratios
            # of two transient estimates are meaningless, hold the element
            if not self.timer.picked:
                return _IDLE
            self.timer.reset()
            return FunctionOutput()
        zr, mho, half, radius, r_outer = self._geometry(settings, ps.convergence)
        ia = ps.i_a
        ib = ps.i_b
        ic = ps.i_c
        va = ps.v_a
        vb = ps.v_b
        vc = ps.v_c
        if r_outer is not None and mags is not None:
            # sound pre-gate: no loop can reach the zone unless its
            # numerator is at most (max possible denominator) * r_outer
            i_bound = max(mags[0]) * (2.0 + 3.0 * abs(settings.k0)) * r_outer
            if (
                min(mags[1]) > i_bound
                and abs(va - vb) > i_bound
                and abs(vb - vc) > i_bound
                and abs(vc - va) > i_bound
            ):
                if not self.timer.picked:
                    return _IDLE
                self.timer.reset()
                return FunctionOutput()
        res = settings.k0 * (ia + ib + ic)
        floor = settings.current_floor_a
        loop_id = None
        for name, num, den in (
            ("AG", va, ia + res),
            ("BG", vb, ib + res),
            ("CG", vc, ic + res),
            ("AB", va - vb, ia - ib),
            ("BC", vb - vc, ib - ic),
            ("CA", vc - va, ic - ia),
        ):
            ad = abs(den)
            if ad < floor:
                continue
            if r_outer is not None and abs(num) > ad * r_outer:
                continue
            z = num / den
            if mho:
                if abs(z - half) <= radius:
                    loop_id = name
                    break
            elif zone_contains(settings.characteristic, zr, z, settings.quad):
                loop_id = name
                break
        if loop_id is None:
            if not self.timer.picked:
                return _IDLE
            self.timer.reset()
            return FunctionOutput()
        self.loop_id = loop_id
        elapsed, trip = self.timer.advance(True, dt, settings.delay_s)
        return FunctionOutput(True, trip, elapsed, loop_id)


_PHASE_ID = ("A", "B", "C")


class Pdir:
    """Directional overcurrent: overcurrent AND forward flow on the phase."""

    __slots__ = ("timer",)

    def __init__(self):
        self.timer = _DefiniteTime()

    def step(self, settings: PdirSettings, ps, dt: float, i_mags=None) -> FunctionOutput:
        if not settings.enabled:
            self.timer.reset()
            return _IDLE
        if i_mags is None:
            i_mags = (abs(ps.i_a), abs(ps.i_b), abs(ps.i_c))
        pickup_a = settings.pickup_a
        loop_id = None
        if i_mags[0] > pickup_a or i_mags[1] > pickup_a or i_mags[2] > pickup_a:
            floor = settings.polarizing_floor_v
            for idx, i_ph, v_hi, v_lo in (
                (0, ps.i_a, ps.v_b, ps.v_c),
                (1, ps.i_b, ps.v_c, ps.v_a),
                (2, ps.i_c, ps.v_a, ps.v_b),
            ):
                if i_mags[idx] <= pickup_a:
                    continue
                direction = direction_of(
                    i_ph, v_hi - v_lo, settings.rca_deg, floor
                )
                if direction is Direction.FORWARD:
                    loop_id = _PHASE_ID[idx]
                    break
        if loop_id is None:
            self.timer.reset()
            return _IDLE
        elapsed, trip = self.timer.advance(True, dt, settings.delay_s)
        return FunctionOutput(True, trip, elapsed, loop_id)


class Ptov:
    """Overvoltage on any phase above pickup_pu * nominal."""

    __slots__ = ("timer",)

    def __init__(self):
        self.timer = _DefiniteTime()

    def step(self, settings: PtovSettings, ps, dt: float, v_mags=None) -> FunctionOutput:
        if not settings.enabled:
            self.timer.reset()
            return _IDLE
        if v_mags is None:
            v_mags = (abs(ps.v_a), abs(ps.v_b), abs(ps.v_c))
        threshold = settings.pickup_pu * settings.nominal_v
        if not (
            v_mags[0] > threshold or v_mags[1] > threshold or v_mags[2] > threshold
        ):
            self.timer.reset()
            return _IDLE
        elapsed, trip = self.timer.advance(True, dt, settings.delay_s)
        return FunctionOutput(True, trip, elapsed)


class Ptuv:
    """Undervoltage on any phase inside (dead-line floor, pickup) * nominal.

    The dead-line floor keeps a de-energized input from tripping.
    """

    __slots__ = ("timer",)

    def __init__(self):
        self.timer = _DefiniteTime()

    def step(self, settings: PtuvSettings, ps, dt: float, v_mags=None) -> FunctionOutput:
        if not settings.enabled:
            self.timer.reset()
            return _IDLE
        if v_mags is None:
            v_mags = (abs(ps.v_a), abs(ps.v_b), abs(ps.v_c))
        threshold = settings.pickup_pu * settings.nominal_v
        floor = settings.dead_line_pu * settings.nominal_v
        picked = (
            floor < v_mags[0] < threshold
            or floor < v_mags[1] < threshold
            or floor < v_mags[2] < threshold
        )
        if not picked:
            self.timer.reset()
            return _IDLE
        elapsed, trip = self.timer.advance(True, dt, settings.delay_s)
        return FunctionOutput(True, trip, elapsed)


class ProtectionSet:
    """All six functions stepped together against one settings object.

    The overcurrent elements receive confirmed phase-current magnitudes:
    the minimum over the last ``confirmation_samples`` estimates.  A
    short-lived estimator transient therefore cannot operate them: the
    measured current must hold above pickup for the whole window.
    """

    __slots__ = ("pioc", "ptoc", "pdis", "pdir", "ptov", "ptuv", "_minwin", "_k")

    def __init__(self):
        self.pioc = Pioc()
        self.ptoc = Ptoc()
        self.pdis = Pdis()
        self.pdir = Pdir()
        self.ptov = Ptov()
        self.ptuv = Ptuv()
        # per-phase monotonic deques (parallel index/value lists) for the
        # sliding-window minimum, amortized O(1) per sample
        self._minwin = tuple(([], []) for _ in range(3))
        self._k = 0

    def _confirmed(self, i_mags, window: int):
        k = self._k
        self._k = k + 1
        horizon = k - window
        out = []
        for idx in range(3):
            ks, vs = self._minwin[idx]
            mag = i_mags[idx]
            while vs and vs[-1] >= mag:
                vs.pop()
                ks.pop()
            ks.append(k)
            vs.append(mag)
            if ks[0] <= horizon:
                del ks[0]
                del vs[0]
            out.append(vs[0])
        return out

    def step(
        self, settings: FunctionSettings, ps, dt: float
    ) -> dict[str, FunctionOutput]:
        i_mags = (abs(ps.i_a), abs(ps.i_b), abs(ps.i_c))
        v_mags = (abs(ps.v_a), abs(ps.v_b), abs(ps.v_c))
        confirmed = self._confirmed(i_mags, settings.confirmation_samples)
        i_max = max(confirmed)
        return {
            "PIOC": self.pioc.step(settings.pioc, ps, dt, i_max),
            "PTOC": self.ptoc.step(settings.ptoc, ps, dt, i_max),
            "PDIS": self.pdis.step(settings.pdis, ps, dt, (i_mags, v_mags)),
            "PDIR": self.pdir.step(settings.pdir, ps, dt, confirmed),
            "PTOV": self.ptov.step(settings.ptov, ps, dt, v_mags),
            "PTUV": self.ptuv.step(settings.ptuv, ps, dt, v_mags),
        }
