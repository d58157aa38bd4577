"""Scenario harness: deterministic multi-party runs, scripted adversaries,
security-property verdicts, and a concurrent stress mode."""

from .runner import EventLog, LogRecord, Roster, RunResult, Scenario, Verdict, bundled_scenarios, run, run_file
from .stress import run_stress

__all__ = [
    "EventLog",
    "LogRecord",
    "Roster",
    "RunResult",
    "Scenario",
    "Verdict",
    "bundled_scenarios",
    "run",
    "run_file",
    "run_stress",
]
