"""Persistent beacon database.

One UTF-8 JSON object per line, fields id/x/y/z/qx/qy/qz/qw, numbers in
round-trip-exact decimal form.  Every committed mutation rewrites the file
atomically (temp file in the same directory, then rename), so readers never
observe a partially written database and a crash leaves the previous
contents intact.  The file is owned by exactly one process.
"""

from __future__ import annotations

import json
import math
import os
from dataclasses import dataclass
from pathlib import Path

from .errors import DuplicateIdError, InvalidArgumentError, LoadError, NotFoundError, SaveError

_FIELDS = ("id", "x", "y", "z", "qx", "qy", "qz", "qw")
QUAT_NORM_TOL = 1e-6


@dataclass(frozen=True)
class BeaconRecord:
    id: str
    x: float
    y: float
    z: float
    qx: float
    qy: float
    qz: float
    qw: float

    def __post_init__(self):
        if not self.id:
            raise InvalidArgumentError("record id must be non-empty")
        for name in _FIELDS[1:]:
            if not math.isfinite(getattr(self, name)):
                raise InvalidArgumentError(f"record field {name} is not finite")
        n = math.sqrt(self.qx**2 + self.qy**2 + self.qz**2 + self.qw**2)
        if abs(n - 1.0) > QUAT_NORM_TOL:
            raise InvalidArgumentError(f"record quaternion norm {n} deviates from 1 beyond {QUAT_NORM_TOL}")

    def to_line(self) -> str:
        return json.dumps(
            {name: getattr(self, name) for name in _FIELDS}, separators=(",", ":")
        )


def _parse_line(line: str, lineno: int) -> BeaconRecord:
    try:
        obj = json.loads(line)
    except json.JSONDecodeError as e:
        raise LoadError(f"line {lineno}: invalid JSON: {e}", line=lineno) from e
    if not isinstance(obj, dict) or set(obj) != set(_FIELDS):
        raise LoadError(f"line {lineno}: expected exactly fields {_FIELDS}", line=lineno)
    if not isinstance(obj["id"], str):
        raise LoadError(f"line {lineno}: id must be a string", line=lineno)
    for name in _FIELDS[1:]:
        if not isinstance(obj[name], (int, float)) or isinstance(obj[name], bool):
            raise LoadError(f"line {lineno}: field {name} must be a number", line=lineno)
    try:
        return BeaconRecord(**{k: (obj[k] if k == "id" else float(obj[k])) for k in _FIELDS})
    except InvalidArgumentError as e:
        raise LoadError(f"line {lineno}: {e}", line=lineno) from e


class Database:
    """Ordered beacon records plus their backing file."""

    def __init__(self, path: str | os.PathLike, records: list[BeaconRecord] | None = None):
        self.path = Path(path)
        self._records: list[BeaconRecord] = list(records or [])
        self._index: dict[str, int] = {r.id: i for i, r in enumerate(self._records)}

    @classmethod
    def load(cls, path: str | os.PathLike) -> "Database":
        """Read the file; a missing file is an empty database."""
        p = Path(path)
        records: list[BeaconRecord] = []
        ids: set[str] = set()
        if p.exists():
            with open(p, encoding="utf-8") as f:
                for lineno, line in enumerate(f, start=1):
                    line = line.strip()
                    if not line:
                        continue
                    rec = _parse_line(line, lineno)
                    if rec.id in ids:
                        raise LoadError(f"line {lineno}: duplicate id {rec.id}", line=lineno)
                    ids.add(rec.id)
                    records.append(rec)
        return cls(p, records)

    def __len__(self) -> int:
        return len(self._records)

    def __contains__(self, bid: str) -> bool:
        return bid in self._index

    @property
    def records(self) -> tuple[BeaconRecord, ...]:
        return tuple(self._records)

    def get(self, bid: str) -> BeaconRecord:
        if bid not in self._index:
            raise NotFoundError(bid)
        return self._records[self._index[bid]]

    def add(self, record: BeaconRecord) -> None:
        if record.id in self._index:
            raise DuplicateIdError(record.id)
        self._commit(self._records + [record])

    def change(self, record: BeaconRecord) -> None:
        """Replace the pose fields of the record with the same id."""
        if record.id not in self._index:
            raise NotFoundError(record.id)
        new = list(self._records)
        new[self._index[record.id]] = record
        self._commit(new)

    def delete(self, bid: str) -> None:
        if bid not in self._index:
            raise NotFoundError(bid)
        new = [r for r in self._records if r.id != bid]
        self._commit(new)

    def save(self) -> None:
        """Rewrite the backing file from the in-memory records."""
        self._write(self._records)

    def _commit(self, records: list[BeaconRecord]) -> None:
        # Persist first; memory is only updated once the file is durable.
        self._write(records)
        self._records = records
        self._index = {r.id: i for i, r in enumerate(records)}

    def _write(self, records: list[BeaconRecord]) -> None:
        tmp = self.path.with_name(self.path.name + ".tmp")
        try:
            with open(tmp, "w", encoding="utf-8") as f:
                for r in records:
                    f.write(r.to_line())
                    f.write("\n")
                f.flush()
                os.fsync(f.fileno())
            os.replace(tmp, self.path)
        except OSError as e:
            try:
                tmp.unlink(missing_ok=True)
            except OSError:
                pass
            raise SaveError(f"could not persist database to {self.path}: {e}") from e
