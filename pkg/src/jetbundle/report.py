"""Check records and verification reports shared by the surface checks and the CLI."""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field
from fractions import Fraction


def jsonable(obj):
    """Exact, deterministic JSON form: Fractions become "p/q" strings."""
    if isinstance(obj, Fraction):
        return str(obj)
    if isinstance(obj, dict):
        return {str(k): jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [jsonable(x) for x in obj]
    if isinstance(obj, (str, int, float, bool)) or obj is None:
        return obj
    return str(obj)


def digest(inputs) -> str:
    text = json.dumps(jsonable(inputs), sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(text.encode()).hexdigest()[:16]


@dataclass
class CheckRecord:
    check_id: str
    passed: bool
    inputs: dict = field(default_factory=dict)
    witness: dict | None = None

    def to_json(self) -> dict:
        out = {"id": self.check_id, "inputs_digest": digest(self.inputs), "passed": self.passed}
        if not self.passed and self.witness is not None:
            out["witness"] = jsonable(self.witness)
        return out


def check(check_id: str, lhs, rhs, **inputs) -> CheckRecord:
    """Record an exact equality; on failure the two sides become the witness."""
    ok = lhs == rhs
    return CheckRecord(check_id, ok, inputs, None if ok else {"lhs": str(lhs), "rhs": str(rhs)})


def flag(check_id: str, ok: bool, witness=None, **inputs) -> CheckRecord:
    return CheckRecord(check_id, bool(ok), inputs, None if ok else (witness or {"detail": "condition false"}))


@dataclass
class Report:
    """A list of check records; passes iff every record passes."""

    title: str
    records: list = field(default_factory=list)
    extra: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return all(r.passed for r in self.records)

    @property
    def failures(self) -> list:
        return [r for r in self.records if not r.passed]

    def add(self, rec: CheckRecord) -> CheckRecord:
        self.records.append(rec)
        return rec

    def extend(self, other: "Report"):
        self.records.extend(other.records)

    def summary(self) -> dict:
        return {"total": len(self.records), "passed": sum(r.passed for r in self.records),
                "failed": len(self.failures)}
