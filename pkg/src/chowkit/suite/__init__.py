"""Scenario files, the check runner, reports and the command line."""

from .checks import CheckResult, Report, run_checks
from .report import report_emit
from .scenario import Scenario, ScenarioError, load_scenario, parse_scenario

__all__ = [
    "CheckResult",
    "Report",
    "Scenario",
    "ScenarioError",
    "load_scenario",
    "parse_scenario",
    "report_emit",
    "run_checks",
]
