"""Append-only sample storage.

Samples land in date-partitioned JSON Lines segments. Stored lines are never
mutated, so exports are reproducible byte for byte. On startup any torn final
line (a crash mid-append) is moved to a quarantine file and the segment is
truncated back to its last complete line.
"""
from __future__ import annotations

import json
import threading
import time
from datetime import datetime, timezone
from pathlib import Path
from typing import Iterator

from ..errors import StorageError

SEGMENT_PREFIX = "samples-"
SEGMENT_SUFFIX = ".jsonl"


class SampleStore:
    def __init__(self, root: str | Path):
        self.root = Path(root)
        self.root.mkdir(parents=True, exist_ok=True)
        self._lock = threading.Lock()
        self._counter = 0
        self._recover()

    # -- startup recovery ---------------------------------------------------

    def _segments(self) -> list[Path]:
        return sorted(self.root.glob(f"{SEGMENT_PREFIX}*{SEGMENT_SUFFIX}"))

    def _recover(self) -> None:
        for segment in self._segments():
            data = segment.read_bytes()
            if not data:
                continue
            cut = len(data)
            if not data.endswith(b"\n"):
                cut = data.rfind(b"\n") + 1  # 0 when no newline at all
            else:
                # Complete-looking trailing line can still be half-written
                # garbage; validate it.
                body = data[:-1]
                start = body.rfind(b"\n") + 1
                try:
                    json.loads(data[start:].decode("utf-8"))
                except (UnicodeDecodeError, json.JSONDecodeError):
                    cut = start
            if cut < len(data):
                quarantine = segment.with_suffix(segment.suffix + ".quarantine")
                with open(quarantine, "ab") as fh:
                    fh.write(data[cut:])
                    fh.write(b"\n")
                with open(segment, "wb") as fh:
                    fh.write(data[:cut])
        # Continue sample-id numbering after existing rows.
        self._counter = sum(1 for _ in self.iter_rows())

    # -- append path ---------------------------------------------------------

    def _active_segment(self, ts: float) -> Path:
        day = datetime.fromtimestamp(ts, tz=timezone.utc).strftime("%Y%m%d")
        return self.root / f"{SEGMENT_PREFIX}{day}{SEGMENT_SUFFIX}"

    def append(self, row: dict) -> str:
        """Assign a server-side sample id and timestamp, then persist."""
        with self._lock:
            now = time.time()
            sample_id = f"srv-{self._counter:010d}"
            record = {"sample_id": sample_id, "ts": int(now), **row}
            line = json.dumps(record, ensure_ascii=False)
            segment = self._active_segment(now)
            try:
                with open(segment, "a", encoding="utf-8") as fh:
                    fh.write(line)
                    fh.write("\n")
                    fh.flush()
            except OSError as exc:
                raise StorageError(f"cannot append to {segment}: {exc}") from exc
            self._counter += 1
            return sample_id

    # -- export path ----------------------------------------------------------

    def iter_rows(self, ts_from: int | None = None, ts_to: int | None = None) -> Iterator[dict]:
        for segment in self._segments():
            try:
                with open(segment, encoding="utf-8") as fh:
                    for line in fh:
                        line = line.strip()
                        if not line:
                            continue
                        row = json.loads(line)
                        ts = row.get("ts", 0)
                        if ts_from is not None and ts < ts_from:
                            continue
                        if ts_to is not None and ts > ts_to:
                            continue
                        yield row
            except OSError as exc:
                raise StorageError(f"cannot read segment {segment}: {exc}") from exc

    def export_jsonl(self, ts_from: int | None = None, ts_to: int | None = None) -> bytes:
        """Samples in ingestion order, as raw JSONL bytes."""
        chunks = []
        for row in self.iter_rows(ts_from, ts_to):
            chunks.append(json.dumps(row, ensure_ascii=False))
        if not chunks:
            return b""
        return ("\n".join(chunks) + "\n").encode("utf-8")

    def count(self) -> int:
        return self._counter
