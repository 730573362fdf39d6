"""Time-domain waveform synthesis from phasor solutions.

Pre-fault sinusoids run up to the inception instant; from there each
current channel continues as the faulted steady state plus a decaying
DC offset equal to the switching discontinuity,

    i_dc(t) = (i_pre(t_inc) - i_ss(t_inc)) * exp(-(t - t_inc)/tau),

with tau = L/R of the faulted positive-sequence loop, so every current
is continuous at inception by construction.  Voltages step to their
faulted values.  The inception angle is measured on the fault-point
phase-A voltage with the convention x(t) = sqrt(2)*|X|*sin(w t + ang(X)).

Channel order matches the process-bus dataset: IA IB IC IN VA VB VC VN.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .faults import PhasorSolution
from .line import FaultScenario, LineModel

CHANNELS = ("IA", "IB", "IC", "IN", "VA", "VB", "VC", "VN")
CSV_HEADER = "t_s,IA,IB,IC,IN,VA,VB,VC,VN"

_SQRT2 = math.sqrt(2.0)


@dataclass(frozen=True, slots=True)
class Waveform:
    data: np.ndarray  # shape (n, 8), engineering units, channel order above
    sample_rate_hz: float
    t_inception_s: float

    @property
    def n_samples(self) -> int:
        return self.data.shape[0]

    def channel(self, name: str) -> np.ndarray:
        return self.data[:, CHANNELS.index(name)]

    def times(self) -> np.ndarray:
        return np.arange(self.n_samples) / self.sample_rate_hz


def _sine(t: np.ndarray, omega: float, phasor: complex, phase_offset: float):
    return (
        _SQRT2
        * abs(phasor)
        * np.sin(omega * t + np.angle(phasor) + phase_offset)
    )


def inception_time(
    line: LineModel,
    scenario: FaultScenario,
    solution: PhasorSolution,
    min_time_s: float,
    phase_offset_rad: float = 0.0,
) -> float:
    """Earliest instant >= min_time_s where the fault-point voltage phase
    equals the scenario's inception angle."""
    omega = line.omega
    target = math.radians(scenario.inception_angle_deg)
    base = np.angle(solution.fault_point_prefault_v) + phase_offset_rad
    # solve (omega*t + base) mod 2pi == target
    t = (target - base) / omega
    period = 2.0 * math.pi / omega
    n = math.ceil((min_time_s - t) / period - 1e-12)
    return t + n * period


def synthesize_waveform(
    line: LineModel,
    scenario: FaultScenario,
    solution: PhasorSolution,
    sample_rate_hz: float = 4800.0,
    prefault_s: float = 1.0,
    phase_offset_rad: float = 0.0,
) -> Waveform:
    omega = line.omega
    t_inc = inception_time(line, scenario, solution, prefault_s, phase_offset_rad)
    n_total = int(round((t_inc + scenario.duration_s) * sample_rate_hz))
    t = np.arange(n_total) / sample_rate_hz
    pre = t < t_inc
    post = ~pre
    tp = t[post]

    z_loop = solution.dc_loop_impedance
    if z_loop.real > 1e-9:
        tau = z_loop.imag / (omega * z_loop.real)
    else:
        tau = math.inf
    decay = np.exp(-(tp - t_inc) / tau) if math.isfinite(tau) else np.ones_like(tp)

    data = np.empty((n_total, 8))
    i_cols = []
    for idx in range(3):
        ph_pre = solution.prefault_i[idx]
        ph_fault = solution.fault_i[idx]
        col = np.empty(n_total)
        col[pre] = _sine(t[pre], omega, ph_pre, phase_offset_rad)
        i_pre_inc = _sine(np.array([t_inc]), omega, ph_pre, phase_offset_rad)[0]
        i_ss_inc = _sine(np.array([t_inc]), omega, ph_fault, phase_offset_rad)[0]
        col[post] = _sine(tp, omega, ph_fault, phase_offset_rad) + (
            i_pre_inc - i_ss_inc
        ) * decay
        data[:, idx] = col
        i_cols.append(col)
    data[:, 3] = i_cols[0] + i_cols[1] + i_cols[2]

    v_cols = []
    for idx in range(3):
        col = np.empty(n_total)
        col[pre] = _sine(t[pre], omega, solution.prefault_v[idx], phase_offset_rad)
        col[post] = _sine(tp, omega, solution.fault_v[idx], phase_offset_rad)
        data[:, 4 + idx] = col
        v_cols.append(col)
    data[:, 7] = v_cols[0] + v_cols[1] + v_cols[2]

    return Waveform(data=data, sample_rate_hz=sample_rate_hz, t_inception_s=t_inc)


def write_csv(waveform: Waveform, path) -> None:
    t = waveform.times().reshape(-1, 1)
    np.savetxt(
        path,
        np.hstack([t, waveform.data]),
        delimiter=",",
        header=CSV_HEADER,
        comments="",
        fmt="%.9g",
    )


def read_csv(path) -> Waveform:
    """Replay externally produced waveforms; sample rate inferred from t_s."""
    raw = np.loadtxt(path, delimiter=",", skiprows=1)
    if raw.ndim == 1:
        raw = raw.reshape(1, -1)
    if raw.shape[1] != 9:
        raise ValueError(f"expected 9 columns ({CSV_HEADER}), got {raw.shape[1]}")
    t = raw[:, 0]
    if len(t) > 1:
        fs = 1.0 / float(np.median(np.diff(t)))
    else:
        fs = 4800.0
    return Waveform(data=raw[:, 1:], sample_rate_hz=fs, t_inception_s=0.0)
