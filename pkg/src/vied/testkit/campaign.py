"""Latency campaign execution.

Each repeat builds a fresh relay, streams one second of pre-fault signal
for DSP settling, injects the fault, and records the first trip GOOSE
per function.  Repeats differ by a seeded random rotation of the whole
system phase, which moves the inception instant across the sampling
grid: the only jitter source in a virtual-clock world, and fully
deterministic per seed.

Reported latency is the excess over the analytic expectation
(configured delay or curve time); absolute operate times are recorded
alongside.  Functions the oracle says cannot operate inside the fault
window produce no-operation records and are excluded from statistics.

Campaigns are resumable per scenario: with a checkpoint directory each
finished scenario's records land in a JSON fragment keyed by a fingerprint
of everything that determines them (line, scenario, settings, seed), and
a rerun replays only the missing ones.
"""

from __future__ import annotations

import dataclasses
import hashlib
import json
import math
import random
import time
from dataclasses import dataclass, field
from multiprocessing import Pool
from pathlib import Path

from ..codec import DecodeError, decode_goose
from ..protection import FUNCTION_ORDER
from ..runtime import Relay, RelayConfig, config_from_dict, config_to_dict
from .expectations import expected_behavior, plan_window_s
from .faults import fault_phasors
from .line import FaultScenario, LineModel, all_scenarios
from .streamer import SvStreamer, prp_wrap
from .waveform import synthesize_waveform

PREFAULT_S = 1.0

# mean-trend comparisons allow one eighth of a sample period of slack:
# latencies are quantized to the 4800 Hz grid, so differences below this
# are measurement granularity, not trend
TREND_TOLERANCE_S = 25e-6

_TRIP_FLAGS = {
    "PIOC": "PIOC.trip",
    "PTOC": "PTOC.trip",
    "PDIS": "PDIS.trip",
    "PDIR": "PDIR.trip",
    "PTOV": "PTOV.trip",
    "PTUV": "PTUV.trip",
}


@dataclass(frozen=True, slots=True)
class LatencyRecord:
    scenario_id: str
    function: str
    repeat: int
    t_operate_s: float | None
    t_expected_s: float | None
    t_excess_s: float | None
    operated: bool


@dataclass(frozen=True, slots=True)
class LatencyStats:
    n: int
    min_s: float
    mean_s: float
    max_s: float
    std_s: float


def aggregate(values: list[float]) -> LatencyStats:
    """Sample statistics (n-1 denominator); a single record gets std 0."""
    if not values:
        raise ValueError("no values to aggregate")
    n = len(values)
    mean = sum(values) / n
    if n == 1:
        std = 0.0
    else:
        std = math.sqrt(sum((v - mean) ** 2 for v in values) / (n - 1))
    return LatencyStats(n, min(values), mean, max(values), std)


@dataclass(slots=True)
class ScenarioResult:
    scenario: FaultScenario
    records: list[LatencyRecord]
    expected_operates: dict[str, bool]
    violations: list[str]
    fault_window_s: float


@dataclass(slots=True)
class CampaignResult:
    results: list[ScenarioResult] = field(default_factory=list)
    seed: int = 0
    repeats: int = 0
    runtime_s: float = 0.0

    @property
    def records(self) -> list[LatencyRecord]:
        return [r for res in self.results for r in res.records]

    @property
    def violations(self) -> list[str]:
        return [v for res in self.results for v in res.violations]

    def excess_by_function_resistance(self) -> dict[str, dict[float, LatencyStats]]:
        """The Tables layout: per function, per fault resistance, pooled
        over fault types and inception angles."""
        resistance = {
            res.scenario.scenario_id: res.scenario.resistance_ohm
            for res in self.results
        }
        cells: dict[str, dict[float, list[float]]] = {}
        for rec in self.records:
            if not rec.operated or rec.t_excess_s is None:
                continue
            rf = resistance[rec.scenario_id]
            cells.setdefault(rec.function, {}).setdefault(rf, []).append(
                rec.t_excess_s
            )
        return {
            fn: {rf: aggregate(vals) for rf, vals in sorted(by_rf.items())}
            for fn, by_rf in cells.items()
        }

    def operate_matrix(self) -> dict[str, dict[str, dict]]:
        out: dict[str, dict[str, dict]] = {}
        for res in self.results:
            operated = {fn: False for fn in FUNCTION_ORDER}
            for rec in res.records:
                if rec.operated:
                    operated[rec.function] = True
            out[res.scenario.scenario_id] = {
                fn: {
                    "operated": operated[fn],
                    "expected": res.expected_operates[fn],
                    "agree": operated[fn] == res.expected_operates[fn],
                }
                for fn in FUNCTION_ORDER
            }
        return out

    def trends_applicable(self) -> bool:
        """Mean-vs-resistance trends are comparable only when every tested
        resistance pools the same fault types and inception angles (as the
        full matrix does); partial campaigns skip the trend checks."""
        composition: dict[float, set] = {}
        for res in self.results:
            s = res.scenario
            composition.setdefault(s.resistance_ohm, set()).add(
                (s.fault_type, s.inception_angle_deg)
            )
        groups = list(composition.values())
        return len(groups) >= 2 and all(g == groups[0] for g in groups)

    def check_properties(self) -> dict[str, bool]:
        checks = {"no_protocol_violations": not self.violations}
        matrix = self.operate_matrix()
        checks["matrix_matches_oracle"] = all(
            cell["agree"] for row in matrix.values() for cell in row.values()
        )
        stats = self.excess_by_function_resistance()
        trends_on = self.trends_applicable()

        def non_decreasing(fn: str) -> bool:
            if not trends_on:
                return True  # vacuous on unbalanced scenario subsets
            cells = stats.get(fn, {})
            means = [cells[rf].mean_s for rf in sorted(cells)]
            return all(
                a <= b + TREND_TOLERANCE_S for a, b in zip(means, means[1:])
            )

        checks["pioc_excess_non_decreasing_in_rf"] = non_decreasing("PIOC")
        checks["pdis_excess_non_decreasing_in_rf"] = non_decreasing("PDIS")
        sane = True
        for by_rf in stats.values():
            for st in by_rf.values():
                if not (st.min_s <= st.mean_s <= st.max_s) or st.std_s < 0:
                    sane = False
                if st.n >= 2 and st.std_s > (st.max_s - st.min_s) + 1e-12:
                    sane = False
        checks["stats_sane"] = sane
        return checks

    @property
    def ok(self) -> bool:
        return all(self.check_properties().values())


def run_scenario(
    line: LineModel,
    scenario: FaultScenario,
    relay_config: RelayConfig,
    seed: int = 1,
    scenario_index: int = 0,
    prefault_s: float = PREFAULT_S,
) -> ScenarioResult:
    relay_config.validate()
    fs = float(relay_config.samples_per_second)
    dt = 1.0 / fs
    solution = fault_phasors(line, scenario)
    window = plan_window_s(solution, relay_config.settings, scenario.duration_s)
    expectations = expected_behavior(solution, relay_config.settings, window)
    streamer = SvStreamer(
        sv_id=relay_config.sv_subscription.sv_id,
        app_id=relay_config.sv_subscription.app_id,
        samples_per_second=relay_config.samples_per_second,
    )
    effective = FaultScenario(
        fault_type=scenario.fault_type,
        location_fraction=scenario.location_fraction,
        resistance_ohm=scenario.resistance_ohm,
        inception_angle_deg=scenario.inception_angle_deg,
        duration_s=window,
        repeats=scenario.repeats,
    )
    records: list[LatencyRecord] = []
    violations: list[str] = []
    config_dict = config_to_dict(relay_config)

    for repeat in range(scenario.repeats):
        rng = random.Random(seed * 1_000_003 + scenario_index * 1_009 + repeat)
        phase = rng.uniform(0.0, 2.0 * math.pi)
        wf = synthesize_waveform(
            line, effective, solution, fs, prefault_s=prefault_s,
            phase_offset_rad=phase,
        )
        lan_a, lan_b = prp_wrap(streamer.encode_waveform(wf.data))
        relay = Relay(config_from_dict(config_dict))
        trips: dict[str, float] = {}
        st_prev = -1
        for k in range(len(lan_a)):
            published = relay.process_frame(lan_a[k])
            published += relay.process_frame(lan_b[k])
            if not published:
                continue
            t_k = k * dt
            for buf in published:
                try:
                    goose = decode_goose(buf)
                except DecodeError as exc:
                    violations.append(
                        f"{effective.scenario_id} r{repeat}: bad GOOSE: {exc}"
                    )
                    continue
                if goose.st_num < st_prev:
                    violations.append(
                        f"{effective.scenario_id} r{repeat}: st_num regressed "
                        f"{st_prev} -> {goose.st_num}"
                    )
                st_prev = goose.st_num
                for fn, flag in _TRIP_FLAGS.items():
                    if fn not in trips and goose.entry(flag):
                        trips[fn] = t_k
        _check_causality(relay, effective.scenario_id, repeat, violations)
        for fn in FUNCTION_ORDER:
            exp = expectations[fn]
            if fn in trips:
                t_op = trips[fn] - wf.t_inception_s
                t_exp = exp.t_expected_s if exp.operates else None
                records.append(
                    LatencyRecord(
                        effective.scenario_id,
                        fn,
                        repeat,
                        t_op,
                        t_exp,
                        (t_op - t_exp) if t_exp is not None else None,
                        True,
                    )
                )
            else:
                records.append(
                    LatencyRecord(
                        effective.scenario_id, fn, repeat, None, None, None, False
                    )
                )
    return ScenarioResult(
        scenario=effective,
        records=records,
        expected_operates={fn: expectations[fn].operates for fn in FUNCTION_ORDER},
        violations=violations,
        fault_window_s=window,
    )


def _check_causality(relay: Relay, sid: str, repeat: int, violations: list[str]):
    picked_up: set[str] = set()
    for ev in relay.events.events:
        if ev.transition == "pickup-rise":
            picked_up.add(ev.function)
        elif ev.transition == "trip-rise" and ev.function not in picked_up:
            violations.append(f"{sid} r{repeat}: {ev.function} trip without pickup")


def _scenario_task(args: dict) -> ScenarioResult:
    checkpoint = args.get("checkpoint")
    if checkpoint:
        cached = _load_checkpoint(checkpoint, args)
        if cached is not None:
            return cached
    result = run_scenario(
        line=args["line"],
        scenario=args["scenario"],
        relay_config=config_from_dict(args["config"]),
        seed=args["seed"],
        scenario_index=args["index"],
        prefault_s=args["prefault_s"],
    )
    if checkpoint:
        _store_checkpoint(checkpoint, args, result)
    return result


def _task_fingerprint(args: dict) -> str:
    """Everything a scenario's records depend on, hashed."""
    line = args["line"]
    payload = json.dumps(
        {
            "line": {
                f.name: _jsonify(getattr(line, f.name))
                for f in dataclasses.fields(line)
            },
            "scenario": dataclasses.asdict(args["scenario"]),
            "config": args["config"],
            "seed": args["seed"],
            "index": args["index"],
            "prefault_s": args["prefault_s"],
        },
        sort_keys=True,
        default=_jsonify,
    )
    return hashlib.sha256(payload.encode()).hexdigest()[:24]


def _jsonify(value):
    if isinstance(value, complex):
        return [value.real, value.imag]
    if dataclasses.is_dataclass(value) and not isinstance(value, type):
        return {
            f.name: _jsonify(getattr(value, f.name))
            for f in dataclasses.fields(value)
        }
    return value


def _checkpoint_file(checkpoint: str, args: dict) -> Path:
    sid = args["scenario"].scenario_id
    return Path(checkpoint) / f"{sid}.{_task_fingerprint(args)}.json"


def _load_checkpoint(checkpoint: str, args: dict) -> ScenarioResult | None:
    path = _checkpoint_file(checkpoint, args)
    if not path.exists():
        return None
    try:
        data = json.loads(path.read_text())
    except (OSError, json.JSONDecodeError):
        return None
    scenario = FaultScenario(**data["scenario"])
    return ScenarioResult(
        scenario=scenario,
        records=[LatencyRecord(**r) for r in data["records"]],
        expected_operates=data["expected_operates"],
        violations=data["violations"],
        fault_window_s=data["fault_window_s"],
    )


def _store_checkpoint(checkpoint: str, args: dict, result: ScenarioResult) -> None:
    path = _checkpoint_file(checkpoint, args)
    path.parent.mkdir(parents=True, exist_ok=True)
    payload = {
        "scenario": dataclasses.asdict(result.scenario),
        "records": [dataclasses.asdict(r) for r in result.records],
        "expected_operates": result.expected_operates,
        "violations": result.violations,
        "fault_window_s": result.fault_window_s,
    }
    tmp = path.with_suffix(".tmp")
    tmp.write_text(json.dumps(payload))
    tmp.replace(path)


def run_campaign(
    line: LineModel | None = None,
    scenarios: list[FaultScenario] | None = None,
    relay_config: RelayConfig | None = None,
    seed: int = 1,
    repeats: int | None = None,
    parallel: int = 1,
    prefault_s: float = PREFAULT_S,
    progress=None,
    checkpoint_dir: str | Path | None = None,
) -> CampaignResult:
    line = line or LineModel()
    scenarios = scenarios if scenarios is not None else all_scenarios()
    relay_config = relay_config or RelayConfig()
    if repeats is not None:
        scenarios = [
            FaultScenario(
                fault_type=s.fault_type,
                location_fraction=s.location_fraction,
                resistance_ohm=s.resistance_ohm,
                inception_angle_deg=s.inception_angle_deg,
                duration_s=s.duration_s,
                repeats=repeats,
            )
            for s in scenarios
        ]
    t0 = time.perf_counter()
    tasks = [
        {
            "line": line,
            "scenario": s,
            "config": config_to_dict(relay_config),
            "seed": seed,
            "index": i,
            "prefault_s": prefault_s,
            "checkpoint": str(checkpoint_dir) if checkpoint_dir else None,
        }
        for i, s in enumerate(scenarios)
    ]
    results: list[ScenarioResult] = []
    if parallel > 1 and len(tasks) > 1:
        with Pool(processes=parallel) as pool:
            for i, res in enumerate(pool.imap(_scenario_task, tasks)):
                results.append(res)
                if progress:
                    progress(i + 1, len(tasks), res)
    else:
        for i, task in enumerate(tasks):
            res = _scenario_task(task)
            results.append(res)
            if progress:
                progress(i + 1, len(tasks), res)
    return CampaignResult(
        results=results,
        seed=seed,
        repeats=scenarios[0].repeats if scenarios else 0,
        runtime_s=time.perf_counter() - t0,
    )
