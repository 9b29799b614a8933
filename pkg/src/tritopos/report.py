"""Structured pass/fail reports shared by validators and the CLI."""
from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

TOOL_NAME = "tritopos"
TOOL_VERSION = "0.1.0"

PASS = "pass"
FAIL = "fail"
SKIPPED = "skipped"


def sanitize(value):
    """Coerce witnesses into plain JSON-serializable data."""
    if isinstance(value, (np.integer,)):
        return int(value)
    if isinstance(value, (np.floating,)):
        return float(value)
    if isinstance(value, (np.bool_,)):
        return bool(value)
    if isinstance(value, np.ndarray):
        return [sanitize(v) for v in value.tolist()]
    if isinstance(value, (list, tuple)):
        return [sanitize(v) for v in value]
    if isinstance(value, dict):
        return {str(k): sanitize(v) for k, v in value.items()}
    if isinstance(value, (str, int, float, bool)) or value is None:
        return value
    return repr(value)


@dataclass
class CheckResult:
    check: str
    status: str
    witness: object = None
    elapsed_ms: float = 0.0

    def to_dict(self) -> dict:
        entry = {"check": self.check, "status": self.status}
        if self.witness is not None:
            entry["witness"] = sanitize(self.witness)
        entry["elapsed_ms"] = round(float(self.elapsed_ms), 3)
        return entry


@dataclass
class Report:
    config: dict = field(default_factory=dict)
    checks: list[CheckResult] = field(default_factory=list)

    def add(self, check: str, status: str, witness: object = None,
            elapsed_ms: float = 0.0) -> CheckResult:
        result = CheckResult(check, status, witness, elapsed_ms)
        self.checks.append(result)
        return result

    def extend(self, other: "Report") -> None:
        self.checks.extend(other.checks)

    @property
    def ok(self) -> bool:
        return all(c.status != FAIL for c in self.checks)

    def failures(self) -> list[CheckResult]:
        return [c for c in self.checks if c.status == FAIL]

    def to_dict(self) -> dict:
        return {
            "tool": TOOL_NAME,
            "version": TOOL_VERSION,
            "config": sanitize(self.config),
            "checks": [c.to_dict() for c in self.checks],
        }

    def to_json(self, indent: int = 2) -> str:
        return json.dumps(self.to_dict(), indent=indent)
