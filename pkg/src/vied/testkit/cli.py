"""Virtual test set entry point.

    testset run [--line line.json] [--scenarios scenarios.json]
                [--repeats 50] [--relay sim|HOST] [--out results/]
                [--seed 1] [--parallel N] [--settings relay.json]
    testset gen-waveform --scenario AG_R15_A45 --out wave.csv
    testset list-scenarios

The default scenario set is the full 4x4x3 campaign matrix.  `--relay sim`
(default) runs an in-process relay under a virtual clock: fast, and two
runs with the same seed produce byte-identical results files.  With
`--relay HOST` frames are streamed over UDP to a running relay daemon in
real time and latency is wall-clock (demo-grade; keep repeat counts low).
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from ..runtime import RelayConfig, load_config
from .campaign import run_campaign
from .faults import fault_phasors
from .line import (
    LineModel,
    all_scenarios,
    find_scenario,
    line_from_dict,
    scenarios_from_list,
)
from .report import emit_report, render_tables
from .udp_runner import parse_relay_spec, run_scenario_udp
from .waveform import synthesize_waveform, write_csv


def _parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="testset", description="virtual relay test set")
    sub = p.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="execute a latency campaign")
    run.add_argument("--line", help="line model JSON file (defaults built in)")
    run.add_argument("--scenarios", help="scenario list JSON file (default: all 48)")
    run.add_argument(
        "--repeats", type=int, default=None,
        help="repeats per scenario (default 50, or the scenario file's value)",
    )
    run.add_argument("--relay", default="sim", help="'sim' or relay host for UDP mode")
    run.add_argument("--out", default="testset-results", help="output directory")
    run.add_argument("--seed", type=int, default=1)
    run.add_argument("--parallel", type=int, default=1, help="scenario workers")
    run.add_argument("--settings", help="relay config JSON with the function settings")
    run.add_argument(
        "--resume", action="store_true",
        help="reuse per-scenario checkpoints under OUT/checkpoints",
    )
    run.add_argument("--quiet", action="store_true")

    gen = sub.add_parser("gen-waveform", help="write one scenario's waveform CSV")
    gen.add_argument("--scenario", required=True, help="scenario id, e.g. AG_R15_A45")
    gen.add_argument("--out", required=True)
    gen.add_argument("--line", help="line model JSON file")
    gen.add_argument("--prefault", type=float, default=1.0)

    sub.add_parser("list-scenarios", help="print the 48 campaign scenario ids")
    return p


def _load_line(path: str | None) -> LineModel:
    if not path:
        return LineModel()
    with open(path, "r", encoding="utf-8") as fh:
        return line_from_dict(json.load(fh))


def _load_scenarios(path: str | None, repeats: int | None):
    if not path:
        return all_scenarios(repeats=repeats if repeats is not None else 50)
    with open(path, "r", encoding="utf-8") as fh:
        data = json.load(fh)
    if isinstance(data, dict):
        data = data["scenarios"]
    return scenarios_from_list(data)


def main(argv=None) -> int:
    args = _parser().parse_args(argv)

    if args.command == "list-scenarios":
        for s in all_scenarios():
            print(s.scenario_id)
        return 0

    if args.command == "gen-waveform":
        line = _load_line(args.line)
        scenario = find_scenario(args.scenario)
        solution = fault_phasors(line, scenario)
        wf = synthesize_waveform(
            line, scenario, solution, prefault_s=args.prefault
        )
        write_csv(wf, args.out)
        print(f"wrote {args.out}: {wf.n_samples} samples, "
              f"inception at {wf.t_inception_s:.6f} s")
        return 0

    # run
    line = _load_line(args.line)
    scenarios = _load_scenarios(args.scenarios, args.repeats)
    if args.scenarios and args.repeats is not None:
        for s in scenarios:
            s.repeats = args.repeats
    relay_config = load_config(args.settings) if args.settings else RelayConfig()

    if args.relay != "sim":
        hostspec = parse_relay_spec(args.relay)
        records = []
        for i, scenario in enumerate(scenarios):
            recs = run_scenario_udp(
                hostspec, line, scenario, relay_config, seed=args.seed,
                scenario_index=i,
            )
            records.extend(recs)
            if not args.quiet:
                print(f"[{i + 1}/{len(scenarios)}] {scenario.scenario_id}: "
                      f"{sum(r.operated for r in recs)} operations")
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        lines = ["scenario_id,function,repeat,t_operate_s,t_expected_s,t_excess_s,operated"]
        for r in records:
            lines.append(
                f"{r.scenario_id},{r.function},{r.repeat},"
                f"{'' if r.t_operate_s is None else f'{r.t_operate_s:.9f}'},"
                f"{'' if r.t_expected_s is None else f'{r.t_expected_s:.9f}'},"
                f"{'' if r.t_excess_s is None else f'{r.t_excess_s:.9f}'},"
                f"{int(r.operated)}"
            )
        (out / "results.csv").write_text("\n".join(lines) + "\n")
        print(f"wrote {out / 'results.csv'}")
        return 0

    progress = None
    if not args.quiet:
        def progress(done, total, res):
            ops = sum(1 for r in res.records if r.operated)
            print(
                f"[{done}/{total}] {res.scenario.scenario_id}: "
                f"{ops} operations, window {res.fault_window_s:.2f} s",
                flush=True,
            )

    result = run_campaign(
        line=line,
        scenarios=scenarios,
        relay_config=relay_config,
        seed=args.seed,
        repeats=args.repeats,
        parallel=args.parallel,
        progress=progress,
        checkpoint_dir=Path(args.out) / "checkpoints" if args.resume else None,
    )
    paths = emit_report(result, args.out)
    if not args.quiet:
        print(render_tables(result))
    print(f"results in {args.out} ({', '.join(p.name for p in paths.values())})")
    return 0 if result.ok else 1


if __name__ == "__main__":
    sys.exit(main())
