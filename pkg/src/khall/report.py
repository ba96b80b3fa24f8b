"""Pass/fail reports shared by the verification commands."""

from __future__ import annotations

from dataclasses import dataclass, field

SCHEMA_VERSION = "1.0"


@dataclass
class Stage:
    name: str
    passed: bool
    detail: str = ""
    window: dict | None = None

    def to_json(self):
        out = {"name": self.name, "pass": self.passed, "detail": self.detail}
        if self.window is not None:
            out["window"] = {v: list(r) for v, r in self.window.items()}
        return out


@dataclass
class DerivationReport:
    command: str
    setup: dict
    stages: list = field(default_factory=list)
    results: dict = field(default_factory=dict)
    timing: float = 0.0
    notes: list = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return bool(self.stages) and all(s.passed for s in self.stages)

    def add(self, name, passed, detail="", window=None):
        self.stages.append(Stage(name, bool(passed), detail, window))

    def to_json(self) -> dict:
        return {
            "schema_version": SCHEMA_VERSION,
            "command": self.command,
            "setup": self.setup,
            "stages": [s.to_json() for s in self.stages],
            "results": self.results,
            "notes": list(self.notes),
            "pass": self.passed,
            "timing_seconds": round(self.timing, 3),
        }

    def summary(self) -> str:
        lines = [f"{self.command}: {'PASS' if self.passed else 'FAIL'}"]
        for s in self.stages:
            mark = "ok  " if s.passed else "FAIL"
            lines.append(f"  [{mark}] {s.name}" + (f": {s.detail}" if s.detail else ""))
        for k, v in self.results.items():
            lines.append(f"  {k} = {v}")
        for n in self.notes:
            lines.append(f"  note: {n}")
        return "\n".join(lines)
