"""Invocation history: immutable, hash-chained, totally ordered per user."""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field
from typing import Optional


@dataclass(frozen=True)
class HistoryRecord:
    record_id: str
    seq: int                      # per-user sequence number, strictly increasing
    user: str
    operation: str                # component type name
    params: dict
    input_digests: tuple
    output_digests: tuple
    started_at: float
    finished_at: float
    outcome: str                  # "ok" | "failed"
    chain_hash: str = ""

    def payload(self) -> dict:
        return {
            "record_id": self.record_id, "seq": self.seq, "user": self.user,
            "operation": self.operation,
            "params": dict(sorted(self.params.items())),
            "input_digests": list(self.input_digests),
            "output_digests": list(self.output_digests),
            "started_at": self.started_at, "finished_at": self.finished_at,
            "outcome": self.outcome,
        }

    def to_dict(self) -> dict:
        return {**self.payload(), "chain_hash": self.chain_hash}


def _chain(prev_hash: str, payload: dict) -> str:
    body = json.dumps(payload, sort_keys=True)
    return hashlib.sha256((prev_hash + body).encode()).hexdigest()


class HistoryLog:
    """Append-only log; each record's chain hash covers everything before it."""

    def __init__(self):
        self._records: list[HistoryRecord] = []
        self._seq: dict[str, int] = {}

    def append(self, user: str, operation: str, params: dict,
               input_digests, output_digests,
               started_at: float, finished_at: float, outcome: str) -> HistoryRecord:
        seq = self._seq.get(user, 0) + 1
        self._seq[user] = seq
        record_id = f"h{len(self._records) + 1:06d}"
        prev = self._records[-1].chain_hash if self._records else ""
        record = HistoryRecord(
            record_id=record_id, seq=seq, user=user, operation=operation,
            params=dict(params), input_digests=tuple(input_digests),
            output_digests=tuple(output_digests), started_at=started_at,
            finished_at=finished_at, outcome=outcome)
        object.__setattr__(record, "chain_hash", _chain(prev, record.payload()))
        self._records.append(record)
        return record

    def records(self) -> list[HistoryRecord]:
        return list(self._records)

    def for_user(self, user: str) -> list[HistoryRecord]:
        return [r for r in self._records if r.user == user]

    def get(self, record_id: str) -> Optional[HistoryRecord]:
        for r in self._records:
            if r.record_id == record_id:
                return r
        return None

    def verify_chain(self) -> bool:
        prev = ""
        for r in self._records:
            if r.chain_hash != _chain(prev, r.payload()):
                return False
            prev = r.chain_hash
        return True
