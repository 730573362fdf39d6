"""Campaign report emission: CSV files, a human-readable table set, JSON."""

from __future__ import annotations

import json
from pathlib import Path

from ..protection import FUNCTION_ORDER
from .campaign import CampaignResult

RESULTS_CSV = "results.csv"
STATS_CSV = "stats.csv"
MATRIX_CSV = "operate_matrix.csv"
REPORT_TXT = "report.txt"
SUMMARY_JSON = "summary.json"


def _fmt(value, places=6):
    return "" if value is None else f"{value:.{places}f}"


def write_results_csv(result: CampaignResult, path: Path) -> None:
    lines = ["scenario_id,function,repeat,t_operate_s,t_expected_s,t_excess_s,operated"]
    for r in result.records:
        lines.append(
            f"{r.scenario_id},{r.function},{r.repeat},"
            f"{_fmt(r.t_operate_s, 9)},{_fmt(r.t_expected_s, 9)},"
            f"{_fmt(r.t_excess_s, 9)},{int(r.operated)}"
        )
    path.write_text("\n".join(lines) + "\n")


def write_stats_csv(result: CampaignResult, path: Path) -> None:
    stats = result.excess_by_function_resistance()
    lines = ["function,resistance_ohm,n,min_ms,mean_ms,max_ms,std_ms"]
    for fn in FUNCTION_ORDER:
        for rf, st in sorted(stats.get(fn, {}).items()):
            lines.append(
                f"{fn},{rf:g},{st.n},{st.min_s * 1e3:.4f},{st.mean_s * 1e3:.4f},"
                f"{st.max_s * 1e3:.4f},{st.std_s * 1e3:.4f}"
            )
    path.write_text("\n".join(lines) + "\n")


def write_matrix_csv(result: CampaignResult, path: Path) -> None:
    matrix = result.operate_matrix()
    header = "scenario_id," + ",".join(
        f"{fn}_operated,{fn}_expected" for fn in FUNCTION_ORDER
    )
    lines = [header]
    for sid, row in matrix.items():
        cells = []
        for fn in FUNCTION_ORDER:
            cells.append(str(int(row[fn]["operated"])))
            cells.append(str(int(row[fn]["expected"])))
        lines.append(f"{sid}," + ",".join(cells))
    path.write_text("\n".join(lines) + "\n")


def render_tables(result: CampaignResult) -> str:
    """Per-function latency tables, rows ordered by fault resistance."""
    stats = result.excess_by_function_resistance()
    out = []
    for fn in FUNCTION_ORDER:
        cells = stats.get(fn)
        if not cells:
            continue
        out.append(f"Excess operate latency, {fn}")
        out.append(
            f"  {'Fault resistance':>18} {'Minimum':>12} {'Mean':>12} "
            f"{'Maximum':>12} {'Std. dev.':>12} {'n':>5}"
        )
        for rf in sorted(cells):
            st = cells[rf]
            out.append(
                f"  {rf:>16g} Ω {st.min_s * 1e3:>9.4f} ms {st.mean_s * 1e3:>9.4f} ms "
                f"{st.max_s * 1e3:>9.4f} ms {st.std_s * 1e3:>9.4f} ms {st.n:>5}"
            )
        out.append("")
    matrix = result.operate_matrix()
    out.append("Operate/no-operate matrix (relay vs analytic expectation)")
    out.append("  scenario          " + "".join(f"{fn:>8}" for fn in FUNCTION_ORDER))
    for sid, row in matrix.items():
        marks = []
        for fn in FUNCTION_ORDER:
            cell = row[fn]
            mark = "O" if cell["operated"] else "-"
            if not cell["agree"]:
                mark += "!"
            marks.append(f"{mark:>8}")
        out.append(f"  {sid:<18}" + "".join(marks))
    out.append("")
    checks = result.check_properties()
    for name, passed in checks.items():
        out.append(f"  [{'PASS' if passed else 'FAIL'}] {name}")
    out.append(f"  runtime: {result.runtime_s:.1f} s, seed {result.seed}")
    return "\n".join(out) + "\n"


def summary_dict(result: CampaignResult) -> dict:
    stats = result.excess_by_function_resistance()
    return {
        "seed": result.seed,
        "n_scenarios": len(result.results),
        "repeats": result.repeats,
        "runtime_s": round(result.runtime_s, 3),
        "checks": result.check_properties(),
        "ok": result.ok,
        "violations": result.violations,
        "stats_ms": {
            fn: {
                f"{rf:g}": {
                    "n": st.n,
                    "min": round(st.min_s * 1e3, 4),
                    "mean": round(st.mean_s * 1e3, 4),
                    "max": round(st.max_s * 1e3, 4),
                    "std": round(st.std_s * 1e3, 4),
                }
                for rf, st in sorted(by_rf.items())
            }
            for fn, by_rf in stats.items()
        },
        "fault_windows_s": {
            res.scenario.scenario_id: round(res.fault_window_s, 3)
            for res in result.results
        },
    }


def emit_report(result: CampaignResult, out_dir: str | Path) -> dict[str, Path]:
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    paths = {
        "results": out / RESULTS_CSV,
        "stats": out / STATS_CSV,
        "matrix": out / MATRIX_CSV,
        "report": out / REPORT_TXT,
        "summary": out / SUMMARY_JSON,
    }
    write_results_csv(result, paths["results"])
    write_stats_csv(result, paths["stats"])
    write_matrix_csv(result, paths["matrix"])
    paths["report"].write_text(render_tables(result))
    with open(paths["summary"], "w", encoding="utf-8") as fh:
        json.dump(summary_dict(result), fh, indent=2, sort_keys=True)
        fh.write("\n")
    return paths
