"""Waveform synthesis: continuity, DC offset, inception angle, CSV round-trip."""

import math

import numpy as np
import pytest

from vied.testkit.faults import fault_phasors
from vied.testkit.line import FaultScenario, LineModel, all_scenarios
from vied.testkit.waveform import (
    CHANNELS,
    inception_time,
    read_csv,
    synthesize_waveform,
    write_csv,
)

LINE = LineModel()
FS = 4800.0
LSB_A = 0.001  # campaign current quantization, 1 mA per count


def synth(scenario, phase_offset=0.0, prefault_s=0.2):
    sol = fault_phasors(LINE, scenario)
    return synthesize_waveform(
        LINE, scenario, sol, FS, prefault_s=prefault_s, phase_offset_rad=phase_offset
    )


@pytest.mark.parametrize(
    "scenario",
    all_scenarios(duration_s=0.1),
    ids=lambda s: s.scenario_id,
)
def test_current_continuity_at_inception(scenario):
    """Both formulas evaluated at t_inc agree to well under one LSB."""
    sol = fault_phasors(LINE, scenario)
    wf = synthesize_waveform(LINE, scenario, sol, FS, prefault_s=0.2)
    t_inc = wf.t_inception_s
    omega = LINE.omega
    sqrt2 = math.sqrt(2.0)
    for idx in range(3):
        pre_val = (
            sqrt2
            * abs(sol.prefault_i[idx])
            * math.sin(omega * t_inc + np.angle(sol.prefault_i[idx]))
        )
        ss_val = (
            sqrt2
            * abs(sol.fault_i[idx])
            * math.sin(omega * t_inc + np.angle(sol.fault_i[idx]))
        )
        post_val = ss_val + (pre_val - ss_val)  # offset at t_inc
        assert abs(post_val - pre_val) < LSB_A
    # and the sampled stream shows no super-physical jump across inception
    k_inc = int(math.ceil(t_inc * FS))
    ia = wf.channel("IA")
    jump = abs(ia[k_inc] - ia[k_inc - 1])
    di_max = (
        sqrt2 * max(abs(z) for z in sol.fault_i) * (omega / FS)
        + 2 * sqrt2 * abs(sol.fault_i[0] - sol.prefault_i[0])
    )
    assert jump <= di_max


def test_inception_angle_is_hit_on_fault_point_voltage():
    for angle in (0.0, 45.0, 90.0):
        scenario = FaultScenario(fault_type="AG", inception_angle_deg=angle)
        sol = fault_phasors(LINE, scenario)
        t_inc = inception_time(LINE, scenario, sol, 0.2, 0.31)
        phase = (
            LINE.omega * t_inc + np.angle(sol.fault_point_prefault_v) + 0.31
        ) % (2 * math.pi)
        assert phase == pytest.approx(math.radians(angle) % (2 * math.pi), abs=1e-9)
        assert t_inc >= 0.2


def test_90_degree_inception_minimizes_dc_offset():
    """Mid-band check of the offset formula: on the mostly inductive loop,
    inception at voltage peak gives a far smaller phase-A offset than at
    the zero crossing."""

    def offset_at(angle):
        scenario = FaultScenario(fault_type="ABC", inception_angle_deg=angle)
        sol = fault_phasors(LINE, scenario)
        t_inc = inception_time(LINE, scenario, sol, 0.2)
        omega = LINE.omega
        sqrt2 = math.sqrt(2.0)
        i_pre = (
            sqrt2
            * abs(sol.prefault_i[0])
            * math.sin(omega * t_inc + np.angle(sol.prefault_i[0]))
        )
        i_ss = (
            sqrt2
            * abs(sol.fault_i[0])
            * math.sin(omega * t_inc + np.angle(sol.fault_i[0]))
        )
        return abs(i_pre - i_ss)

    peak = math.sqrt(2.0) * abs(
        fault_phasors(LINE, FaultScenario(fault_type="ABC")).fault_i[0]
    )
    assert offset_at(90.0) < 0.12 * peak
    assert offset_at(0.0) > 0.8 * peak


def test_huge_resistance_keeps_prefault_waveform():
    scenario = FaultScenario(fault_type="AG", resistance_ohm=1e6, duration_s=0.1)
    wf = synth(scenario)
    sol = fault_phasors(LINE, scenario)
    t = wf.times()
    omega = LINE.omega
    expected = (
        math.sqrt(2.0)
        * abs(sol.prefault_i[0])
        * np.sin(omega * t + np.angle(sol.prefault_i[0]))
    )
    assert np.max(np.abs(wf.channel("IA") - expected)) < 1e-3 * abs(
        sol.prefault_i[0]
    )


def test_neutral_channels_are_sums():
    wf = synth(FaultScenario(fault_type="BCG", resistance_ohm=15.0, duration_s=0.1))
    i_sum = wf.channel("IA") + wf.channel("IB") + wf.channel("IC")
    v_sum = wf.channel("VA") + wf.channel("VB") + wf.channel("VC")
    assert np.allclose(wf.channel("IN"), i_sum, atol=1e-9)
    assert np.allclose(wf.channel("VN"), v_sum, atol=1e-9)


def test_dc_offset_decays_with_loop_time_constant():
    scenario = FaultScenario(fault_type="ABC", inception_angle_deg=0.0, duration_s=0.5)
    sol = fault_phasors(LINE, scenario)
    wf = synthesize_waveform(LINE, scenario, sol, FS, prefault_s=0.2)
    omega = LINE.omega
    tau = sol.dc_loop_impedance.imag / (omega * sol.dc_loop_impedance.real)
    t = wf.times()
    post = t >= wf.t_inception_s
    ia = wf.channel("IA")[post]
    tp = t[post]
    ss = (
        math.sqrt(2.0)
        * abs(sol.fault_i[0])
        * np.sin(omega * tp + np.angle(sol.fault_i[0]))
    )
    residual = ia - ss
    # log-linear fit of the decay recovers tau within 5%
    mask = np.abs(residual) > 0.01 * np.max(np.abs(residual))
    k = np.polyfit(tp[mask] - wf.t_inception_s, np.log(np.abs(residual[mask])), 1)[0]
    assert -1.0 / k == pytest.approx(tau, rel=0.05)


def test_csv_round_trip(tmp_path):
    wf = synth(FaultScenario(fault_type="AG", duration_s=0.05))
    path = tmp_path / "wave.csv"
    write_csv(wf, path)
    back = read_csv(path)
    assert back.sample_rate_hz == pytest.approx(FS, rel=1e-6)
    assert back.data.shape == wf.data.shape
    # %.9g keeps about 9 significant digits of the ~1e5-scale voltages
    assert np.max(np.abs(back.data - wf.data)) < 2e-3
    assert list(CHANNELS) == ["IA", "IB", "IC", "IN", "VA", "VB", "VC", "VN"]
