"""Verification reports: per-check records plus deterministic serialization."""

import csv
import io
import json
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

PASS, FAIL, SKIPPED = "pass", "fail", "skipped"


def _plain(obj):
    """Convert numpy containers and scalars into JSON-ready Python objects."""
    if isinstance(obj, dict):
        return {str(k): _plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_plain(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _plain(obj.tolist())
    if isinstance(obj, (np.floating, float)):
        x = float(obj)
        if x != x:
            return "nan"
        if x in (float("inf"), float("-inf")):
            return "inf" if x > 0 else "-inf"
        return x
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, np.bool_):
        return bool(obj)
    return obj


def fmt(x):
    """Fixed 17-significant-digit rendering used by the text and CSV views."""
    if isinstance(x, (float, np.floating)):
        return format(float(x), ".17g")
    return str(x)


@dataclass
class CheckRecord:
    """Outcome of one named inequality over a batch of trials.

    ``gap`` is the smallest ``rhs - lhs`` seen (negative means a violation);
    ``witness`` holds the worst trial's inputs and is always set on failure.
    """

    name: str
    status: str
    gap: Optional[float]
    seed: Optional[int]
    trials: int = 0
    satisfied: int = 0
    witness_ref: Optional[int] = None
    witness: Optional[dict] = None
    detail: dict = field(default_factory=dict)

    def to_dict(self):
        return _plain({
            "name": self.name, "status": self.status, "gap": self.gap,
            "seed": self.seed, "trials": self.trials, "satisfied": self.satisfied,
            "witness_ref": self.witness_ref, "witness": self.witness,
            "detail": self.detail,
        })


@dataclass
class VerificationReport:
    suite: str
    records: list = field(default_factory=list)
    config: dict = field(default_factory=dict)

    def add(self, record):
        self.records.append(record)
        return record

    def extend(self, other):
        self.records.extend(other.records)
        return self

    @property
    def summary(self):
        counts = {PASS: 0, FAIL: 0, SKIPPED: 0}
        for r in self.records:
            counts[r.status] += 1
        counts["total"] = len(self.records)
        return counts

    @property
    def ok(self):
        return all(r.status != FAIL for r in self.records)

    def __getitem__(self, name):
        for r in self.records:
            if r.name == name:
                return r
        raise KeyError(name)

    def ordered(self):
        return sorted(self.records, key=lambda r: (r.name, -1 if r.seed is None else r.seed))

    def to_dict(self):
        return {
            "suite": self.suite,
            "config": _plain(self.config),
            "summary": self.summary,
            "records": [r.to_dict() for r in self.ordered()],
        }

    def to_json(self):
        return json.dumps(self.to_dict(), indent=2, sort_keys=True) + "\n"

    def to_csv(self):
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["suite", "name", "status", "gap", "trials", "satisfied", "seed", "witness_ref"])
        for r in self.ordered():
            w.writerow([self.suite, r.name, r.status, "" if r.gap is None else fmt(r.gap),
                        r.trials, r.satisfied, "" if r.seed is None else r.seed,
                        "" if r.witness_ref is None else r.witness_ref])
        return buf.getvalue()

    def to_text(self):
        lines = [f"suite {self.suite}"]
        for r in self.ordered():
            gap = "-" if r.gap is None else fmt(r.gap)
            lines.append(f"  [{r.status:7s}] {r.name}  gap={gap}  trials={r.trials}"
                         f"  satisfied={r.satisfied}")
        s = self.summary
        lines.append(f"  {s['pass']} pass, {s['fail']} fail, {s['skipped']} skipped")
        return "\n".join(lines) + "\n"

    @classmethod
    def from_dict(cls, data):
        recs = [CheckRecord(
            name=r["name"], status=r["status"], gap=r.get("gap"), seed=r.get("seed"),
            trials=r.get("trials", 0), satisfied=r.get("satisfied", 0),
            witness_ref=r.get("witness_ref"), witness=r.get("witness"),
            detail=r.get("detail", {})) for r in data.get("records", [])]
        return cls(data.get("suite", "?"), recs, data.get("config", {}))


def gap_record(name, gaps, *, tol, seed=None, mask=None, witness_fn=None, detail=None):
    """Summarize an array of ``rhs - lhs`` gaps into a :class:`CheckRecord`.

    Trials outside ``mask`` did not meet the check's hypothesis.  With no
    qualifying trial the record is ``skipped``.
    """
    gaps = np.atleast_1d(np.asarray(gaps, dtype=float))
    if mask is None:
        mask = np.ones(gaps.shape, dtype=bool)
    mask = np.atleast_1d(np.asarray(mask, dtype=bool))
    info = dict(detail or {})
    info["tolerance"] = tol
    if not np.any(mask):
        return CheckRecord(name, SKIPPED, None, seed, int(gaps.size), 0, detail=info)
    idx = np.flatnonzero(mask)
    worst = int(idx[np.argmin(gaps[idx])])
    g = float(gaps[worst])
    info["mean_gap"] = float(np.mean(gaps[idx]))
    status = PASS if g >= -tol else FAIL
    witness = None
    if status == FAIL and witness_fn is not None:
        witness = _plain(witness_fn(worst))
    return CheckRecord(name, status, g, seed, int(gaps.size), int(idx.size), worst, witness, info)
