"""Check records and report rendering (text and JSON)."""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field

SCHEMA = "revode-report/1"
PASS, FAIL, FLAGGED = "pass", "fail", "flagged-discrepancy"


@dataclass
class Check:
    name: str
    status: str
    certified_order: object = None
    values: dict = field(default_factory=dict)
    notes: list = field(default_factory=list)
    expected: bool = False  # a flagged discrepancy the scenario anticipates

    @property
    def failed(self):
        return self.status == FAIL or (self.status == FLAGGED and not self.expected)


@dataclass
class Report:
    title: str
    checks: list = field(default_factory=list)
    scope: list = field(default_factory=list)

    def add(self, check: Check):
        self.checks.append(check)
        return check

    @property
    def ok(self):
        return not any(c.failed for c in self.checks)

    def to_json(self):
        return json.dumps(
            {"schema": SCHEMA, "title": self.title, "ok": self.ok, "scope": self.scope, "checks": [asdict(c) for c in self.checks]},
            indent=2,
            sort_keys=False,
        )

    def to_text(self):
        lines = [self.title, "=" * len(self.title)]
        for c in self.checks:
            tag = {PASS: "PASS", FAIL: "FAIL", FLAGGED: "FLAG"}[c.status]
            extra = f" [order {c.certified_order}]" if c.certified_order is not None else ""
            lines.append(f"[{tag}] {c.name}{extra}")
            for k, v in c.values.items():
                lines.append(f"       {k}: {v}")
            for n in c.notes:
                lines.append(f"       note: {n}")
        for s in self.scope:
            lines.append(f"scope: {s}")
        lines.append("result: " + ("ok" if self.ok else "FAILED"))
        return "\n".join(lines)
