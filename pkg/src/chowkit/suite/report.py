"""Text and JSON rendering of check reports."""

from __future__ import annotations

import json
import os

from .checks import FAIL, PASS, REPORT, Report

TEXT = "text"
JSON_TREE = "json"

_COLORS = {PASS: "\033[32m", FAIL: "\033[31m", REPORT: "\033[33m"}
_RESET = "\033[0m"


def use_color(stream) -> bool:
    if os.environ.get("NO_COLOR"):
        return False
    isatty = getattr(stream, "isatty", None)
    return bool(isatty and isatty())


def report_tree(r: Report) -> dict:
    results = []
    for c in r.results:
        entry = {"name": c.name, "kind": c.kind, "status": c.status}
        if c.witness is not None:
            entry["witness"] = c.witness
        entry["ms"] = c.ms
        results.append(entry)
    return {
        "scenario": r.scenario,
        "version": r.version,
        "results": results,
        "summary": {"passed": r.passed, "failed": r.failed, "reports": r.reports},
    }


def render_json(r: Report) -> str:
    return json.dumps(report_tree(r), indent=2, ensure_ascii=False) + "\n"


def render_text(r: Report, color: bool = False) -> str:
    lines = [f"scenario {r.scenario} (chowkit {r.version})"]
    width = max((len(c.name) for c in r.results), default=0)
    for c in r.results:
        status = f"{_COLORS[c.status]}{c.status:<6}{_RESET}" if color else f"{c.status:<6}"
        line = f"{status} {c.name:<{width}}  {c.kind}  ({c.ms:.1f} ms)"
        if c.witness:
            line += f"\n       {c.witness}"
        lines.append(line)
    lines.append(f"passed: {r.passed}  failed: {r.failed}  reports: {r.reports}")
    return "\n".join(lines) + "\n"


def report_emit(r: Report, fmt: str = TEXT, color: bool = False) -> bytes:
    if fmt == JSON_TREE:
        return render_json(r).encode("utf-8")
    if fmt == TEXT:
        return render_text(r, color).encode("utf-8")
    raise ValueError(f"unknown report format {fmt!r}")
