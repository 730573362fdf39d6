"""Virtual test set: fault waveforms, latency campaigns, reporting."""

from .campaign import (
    CampaignResult,
    LatencyRecord,
    LatencyStats,
    ScenarioResult,
    aggregate,
    run_campaign,
    run_scenario,
)
from .expectations import FunctionExpectation, expected_behavior, plan_window_s
from .faults import FaultConfigurationError, PhasorSolution, fault_phasors
from .line import (
    FAULT_TYPES,
    FaultScenario,
    LineModel,
    SourceModel,
    all_scenarios,
)
from .report import emit_report, render_tables, summary_dict
from .streamer import SvStreamer, prp_wrap
from .waveform import Waveform, read_csv, synthesize_waveform, write_csv

__all__ = [
    "CampaignResult",
    "FAULT_TYPES",
    "FaultConfigurationError",
    "FaultScenario",
    "FunctionExpectation",
    "LatencyRecord",
    "LatencyStats",
    "LineModel",
    "PhasorSolution",
    "ScenarioResult",
    "SourceModel",
    "SvStreamer",
    "Waveform",
    "aggregate",
    "all_scenarios",
    "emit_report",
    "expected_behavior",
    "fault_phasors",
    "plan_window_s",
    "prp_wrap",
    "read_csv",
    "render_tables",
    "run_campaign",
    "run_scenario",
    "summary_dict",
    "synthesize_waveform",
    "write_csv",
]
