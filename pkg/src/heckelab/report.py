"""Structured verification reports."""
from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field
from typing import Any

from . import __version__

TAGS = ("PAPER", "TRIVIAL", "DERIVED")


@dataclass
class Check:
    name: str
    expected: Any
    actual: Any
    passed: bool
    tag: str = "DERIVED"
    anchor: str = ""

    def __post_init__(self):
        if self.tag not in TAGS:
            raise ValueError(f"unknown provenance tag {self.tag!r}")


@dataclass
class VerificationReport:
    suite: str
    params: dict = field(default_factory=dict)
    checks: list[Check] = field(default_factory=list)
    wall_time: float = 0.0
    version: str = __version__
    cache_hits: int = 0
    data: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def check(self, name, expected, actual, tag="DERIVED", anchor="", passed=None) -> Check:
        expected, actual = _plain(expected), _plain(actual)
        if passed is None:
            passed = expected == actual
        c = Check(name, expected, actual, bool(passed), tag, anchor)
        self.checks.append(c)
        return c

    def failures(self) -> list[Check]:
        return [c for c in self.checks if not c.passed]

    def to_dict(self) -> dict:
        d = asdict(self)
        d["passed"] = self.passed
        return d

    def to_json(self, **kw) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, **kw)

    @classmethod
    def from_dict(cls, d: dict) -> "VerificationReport":
        d = dict(d)
        d.pop("passed", None)
        d["checks"] = [Check(**c) for c in d.get("checks", [])]
        return cls(**d)

    @classmethod
    def from_json(cls, s: str) -> "VerificationReport":
        return cls.from_dict(json.loads(s))

    def merge(self, other: "VerificationReport", prefix: str | None = None) -> None:
        pre = f"{prefix or other.suite}: "
        for c in other.checks:
            self.checks.append(Check(pre + c.name, c.expected, c.actual, c.passed, c.tag, c.anchor))
        self.cache_hits += other.cache_hits
        if other.data:
            self.data[prefix or other.suite] = other.data

    def summary_lines(self) -> list[str]:
        lines = [f"[{'PASS' if c.passed else 'FAIL'}] {c.name}: expected={c.expected!r} actual={c.actual!r}" for c in self.checks]
        lines.append(f"{self.suite}: {'PASS' if self.passed else 'FAIL'} ({len(self.checks)} checks)")
        return lines


def _plain(x):
    """Coerce to JSON-safe values so reports round-trip losslessly."""
    if isinstance(x, bool) or x is None or isinstance(x, (int, str)):
        return x
    if isinstance(x, float):
        return x
    if isinstance(x, dict):
        return {str(k): _plain(v) for k, v in x.items()}
    if isinstance(x, (list, tuple, set, frozenset)):
        items = [_plain(v) for v in x]
        return sorted(items, key=repr) if isinstance(x, (set, frozenset)) else items
    return str(x)
