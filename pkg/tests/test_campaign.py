"""Campaign machinery on a reduced matrix: records, stats, reports, CLI."""

import json
import time
import subprocess
import sys

import numpy as np
import pytest

from vied.codec import decode_sv
from vied.testkit import (
    FaultScenario,
    LineModel,
    SvStreamer,
    aggregate,
    all_scenarios,
    emit_report,
    run_campaign,
    run_scenario,
)
from vied.runtime import RelayConfig

LINE = LineModel()


def small_campaign(**kw):
    scenarios = [
        FaultScenario(fault_type="AG", resistance_ohm=0.0, inception_angle_deg=0.0),
        FaultScenario(fault_type="AG", resistance_ohm=50.0, inception_angle_deg=90.0),
        FaultScenario(fault_type="BC", resistance_ohm=15.0, inception_angle_deg=45.0),
    ]
    return run_campaign(
        line=LINE, scenarios=scenarios, relay_config=RelayConfig(), repeats=3, **kw
    )


class TestAggregate:
    def test_hand_computed_example(self):
        st = aggregate([1e-3, 2e-3, 3e-3])
        assert st.min_s == pytest.approx(1e-3)
        assert st.mean_s == pytest.approx(2e-3)
        assert st.max_s == pytest.approx(3e-3)
        assert st.std_s == pytest.approx(1e-3)

    def test_single_record_has_zero_std_and_n1(self):
        st = aggregate([5e-3])
        assert st.std_s == 0.0
        assert st.n == 1

    def test_empty_rejected(self):
        with pytest.raises(ValueError):
            aggregate([])


def test_scenario_enumeration_is_4x4x3():
    scenarios = all_scenarios()
    assert len(scenarios) == 48
    ids = [s.scenario_id for s in scenarios]
    assert len(set(ids)) == 48
    assert sum(1 for s in scenarios if s.fault_type == "AG") == 12
    assert sum(1 for s in scenarios if s.resistance_ohm == 50.0) == 12
    assert sum(1 for s in scenarios if s.inception_angle_deg == 45.0) == 16


def test_repeat_count_produces_exact_records():
    scn = FaultScenario(fault_type="ABC", resistance_ohm=0.0)
    res = run_scenario(LINE, scn, RelayConfig(), seed=3)
    assert scn.repeats == 50
    per_fn = {}
    for r in res.records:
        per_fn.setdefault(r.function, []).append(r)
    for fn, recs in per_fn.items():
        assert len(recs) == 50
    operated = [r for r in per_fn["PIOC"] if r.operated]
    assert len(operated) == 50  # bolted three-phase always trips PIOC


def test_records_match_expectations_and_have_positive_operate_times():
    res = small_campaign()
    for scen_res in res.results:
        for rec in scen_res.records:
            if rec.operated:
                assert rec.t_operate_s is not None and rec.t_operate_s >= 0
                assert scen_res.expected_operates[rec.function]
            else:
                assert rec.t_operate_s is None


def test_campaign_properties_hold_on_sample():
    res = small_campaign()
    checks = res.check_properties()
    assert checks["matrix_matches_oracle"], res.operate_matrix()
    assert checks["no_protocol_violations"]
    assert checks["stats_sane"]
    assert res.ok


def test_determinism_same_seed_binary_identical(tmp_path):
    outs = []
    for run in range(2):
        res = small_campaign(seed=7)
        paths = emit_report(res, tmp_path / f"run{run}")
        outs.append((paths["results"].read_bytes(), paths["matrix"].read_bytes()))
    assert outs[0][0] == outs[1][0]
    assert outs[0][1] == outs[1][1]


def test_different_seed_changes_latencies():
    r1 = small_campaign(seed=1)
    r2 = small_campaign(seed=2)
    t1 = [r.t_operate_s for r in r1.records if r.operated]
    t2 = [r.t_operate_s for r in r2.records if r.operated]
    assert t1 != t2


def test_parallel_mode_matches_sequential(tmp_path):
    seq = small_campaign(seed=5)
    par = small_campaign(seed=5, parallel=2)
    p1 = emit_report(seq, tmp_path / "seq")
    p2 = emit_report(par, tmp_path / "par")
    assert p1["results"].read_bytes() == p2["results"].read_bytes()


def test_report_files_and_layout(tmp_path):
    res = small_campaign()
    paths = emit_report(res, tmp_path / "out")
    for p in paths.values():
        assert p.exists()
    stats_lines = paths["stats"].read_text().splitlines()
    assert stats_lines[0] == "function,resistance_ohm,n,min_ms,mean_ms,max_ms,std_ms"
    # resistance ascending within each function
    by_fn = {}
    for line in stats_lines[1:]:
        fn, rf = line.split(",")[:2]
        by_fn.setdefault(fn, []).append(float(rf))
    for rfs in by_fn.values():
        assert rfs == sorted(rfs)
    results_lines = paths["results"].read_text().splitlines()
    assert results_lines[0] == (
        "scenario_id,function,repeat,t_operate_s,t_expected_s,t_excess_s,operated"
    )
    summary = json.loads(paths["summary"].read_text())
    assert summary["ok"] is True
    assert summary["n_scenarios"] == 3


def test_streamer_batch_matches_reference_encoder():
    streamer = SvStreamer()
    rng = np.random.default_rng(9)
    data = rng.uniform(-4000, 4000, (50, 8)) * np.array([1, 1, 1, 1, 80, 80, 80, 80])
    counts = streamer.to_counts(data)
    frames = streamer.encode_block(counts, start_index=4790)  # crosses the wrap
    for i, buf in enumerate(frames):
        ref = streamer.encode_frame(tuple(counts[i]), (4790 + i) % 4800)
        assert buf == ref
        decoded = decode_sv(buf)
        assert decoded.channels == tuple(int(c) for c in counts[i])
        assert decoded.smp_cnt == (4790 + i) % 4800


def test_cli_gen_waveform_and_small_run(tmp_path):
    out_csv = tmp_path / "wave.csv"
    r = subprocess.run(
        [sys.executable, "-m", "vied.testkit.cli", "gen-waveform",
         "--scenario", "AG_R15_A45", "--out", str(out_csv)],
        capture_output=True, text=True,
    )
    assert r.returncode == 0, r.stderr
    header = out_csv.read_text().splitlines()[0]
    assert header == "t_s,IA,IB,IC,IN,VA,VB,VC,VN"

    scen_file = tmp_path / "scenarios.json"
    scen_file.write_text(json.dumps([
        {"fault_type": "ABC", "resistance_ohm": 0.0, "inception_angle_deg": 0.0},
    ]))
    out_dir = tmp_path / "results"
    r = subprocess.run(
        [sys.executable, "-m", "vied.testkit.cli", "run",
         "--scenarios", str(scen_file), "--repeats", "2",
         "--out", str(out_dir), "--quiet"],
        capture_output=True, text=True,
    )
    assert r.returncode == 0, r.stderr + r.stdout
    assert (out_dir / "results.csv").exists()
    lines = (out_dir / "results.csv").read_text().splitlines()
    assert len(lines) == 1 + 2 * 6  # header + repeats x functions


def test_excess_is_positive_and_ms_scale_for_definite_time_elements():
    res = small_campaign(seed=11)
    for rec in res.records:
        if rec.operated and rec.function in ("PIOC", "PDIS", "PDIR", "PTUV"):
            assert rec.t_excess_s is not None
            assert 0.0 <= rec.t_excess_s < 0.05  # ms scale over the delay
            if rec.function == "PTUV":
                assert rec.t_operate_s == pytest.approx(0.1, abs=0.02)


def test_campaign_checkpoint_resume(tmp_path):
    scenarios = [
        FaultScenario(fault_type="ABC", resistance_ohm=0.0, inception_angle_deg=0.0),
        FaultScenario(fault_type="AG", resistance_ohm=0.0, inception_angle_deg=45.0),
    ]
    ckpt = tmp_path / "checkpoints"
    t0 = time.perf_counter()
    first = run_campaign(
        line=LINE, scenarios=scenarios, relay_config=RelayConfig(),
        repeats=2, seed=13, checkpoint_dir=ckpt,
    )
    cold = time.perf_counter() - t0
    fragments = sorted(p.name for p in ckpt.glob("*.json"))
    assert len(fragments) == 2

    # a resumed run replays nothing and reproduces the records exactly
    t0 = time.perf_counter()
    second = run_campaign(
        line=LINE, scenarios=scenarios, relay_config=RelayConfig(),
        repeats=2, seed=13, checkpoint_dir=ckpt,
    )
    warm = time.perf_counter() - t0
    assert second.records == first.records
    assert warm < cold / 5

    # any input that shapes the records invalidates its fragment
    third = run_campaign(
        line=LINE, scenarios=scenarios, relay_config=RelayConfig(),
        repeats=2, seed=14, checkpoint_dir=ckpt,
    )
    assert len(sorted(ckpt.glob("*.json"))) == 4
    assert [r.t_operate_s for r in third.records] != [
        r.t_operate_s for r in first.records
    ]


def test_cli_resume_flag(tmp_path):
    scen_file = tmp_path / "scenarios.json"
    scen_file.write_text(json.dumps([
        {"fault_type": "ABC", "resistance_ohm": 0.0, "inception_angle_deg": 0.0,
         "repeats": 2},
    ]))
    out_dir = tmp_path / "results"
    argv = ["run", "--scenarios", str(scen_file), "--out", str(out_dir),
            "--resume", "--quiet"]
    import time as _time
    from vied.testkit.cli import main as testset_main

    t0 = _time.perf_counter()
    assert testset_main(argv) == 0
    cold = _time.perf_counter() - t0
    first = (out_dir / "results.csv").read_bytes()
    # scenario-file repeats are honored when --repeats is not given
    assert len(first.splitlines()) == 1 + 2 * 6
    t0 = _time.perf_counter()
    assert testset_main(argv) == 0
    warm = _time.perf_counter() - t0
    assert (out_dir / "results.csv").read_bytes() == first
    assert warm < cold
