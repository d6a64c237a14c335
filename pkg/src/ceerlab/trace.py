"""Trace documents: header, ordered events, final summary, as canonical JSON."""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

from .oracles import FixtureError

FORMAT = "ceerlab-trace"
VERSION = 1

EVENT_KINDS = frozenset({
    "stage",          # start of a stage
    "act",            # the requirement acting this stage
    "collapse",
    "param-assign",
    "param-cancel",
    "phase-change",
    "f-extend",
    "tag",            # bound tag placed on numbers (join construction)
    "restraint",      # restraint placed or dropped (covers construction)
    "mention",        # numbers used without any other event naming them
    "observe",        # oracle value read by an acting requirement
})


@dataclass
class TraceDocument:
    header: dict[str, Any]
    events: list[dict[str, Any]] = field(default_factory=list)
    summary: dict[str, Any] = field(default_factory=dict)

    def to_dict(self) -> dict[str, Any]:
        return {
            "format": FORMAT,
            "version": VERSION,
            "header": self.header,
            "events": self.events,
            "summary": self.summary,
        }

    def dumps(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, separators=(",", ":")) + "\n"

    def write(self, path: str | Path) -> None:
        Path(path).write_text(self.dumps())

    @classmethod
    def from_dict(cls, doc: dict[str, Any]) -> "TraceDocument":
        if not isinstance(doc, dict) or doc.get("format") != FORMAT:
            raise FixtureError("not a ceerlab trace document")
        if doc.get("version") != VERSION:
            raise FixtureError(f"unsupported trace version {doc.get('version')!r}")
        events = doc.get("events", [])
        for ev in events:
            if ev.get("kind") not in EVENT_KINDS or "time" not in ev:
                raise FixtureError(f"malformed trace event {ev!r}")
        return cls(doc.get("header", {}), list(events), doc.get("summary", {}))

    @classmethod
    def read(cls, path: str | Path) -> "TraceDocument":
        try:
            doc = json.loads(Path(path).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise FixtureError(f"cannot read trace {path}: {exc}") from exc
        return cls.from_dict(doc)


@dataclass
class CheckResult:
    name: str
    passed: bool
    witness: Any = None
    detail: str = ""


@dataclass
class Report:
    checks: list[CheckResult]

    @property
    def ok(self) -> bool:
        return all(c.passed for c in self.checks)

    def failed(self) -> list[str]:
        return [c.name for c in self.checks if not c.passed]

    def __getitem__(self, name: str) -> CheckResult:
        for c in self.checks:
            if c.name == name:
                return c
        raise KeyError(name)

    def lines(self) -> list[str]:
        out = []
        for c in self.checks:
            if c.passed:
                out.append(f"PASS {c.name}")
            else:
                out.append(f"FAIL {c.name}: {c.detail} witness={c.witness!r}")
        return out


class Checker:
    """Records the first violation of each named check during a replay."""

    def __init__(self, names: list[str]) -> None:
        self.names = list(names)
        self.first: dict[str, tuple[Any, str]] = {}

    def fail(self, name: str, witness: Any, detail: str) -> None:
        self.first.setdefault(name, (witness, detail))

    def report(self) -> Report:
        checks = []
        for n in self.names:
            if n in self.first:
                w, d = self.first[n]
                checks.append(CheckResult(n, False, w, d))
            else:
                checks.append(CheckResult(n, True))
        return Report(checks)
