"""Append-only event log with periodic snapshots.

The event log is the single source of truth for the study service: every
committed mutation is one JSON line, fsynced before the command returns, so a
crash between any two requests loses nothing. Snapshots only shortcut replay;
deleting one is always safe.
"""

from __future__ import annotations

import json
import os
from pathlib import Path
from typing import Iterator


class CorruptLogError(Exception):
    """A committed (newline-terminated, non-final) event line failed to parse."""


class EventLog:
    def __init__(self, data_dir: str | Path):
        self.data_dir = Path(data_dir)
        self.data_dir.mkdir(parents=True, exist_ok=True)
        self.events_path = self.data_dir / "events.ndjson"
        self.snapshot_path = self.data_dir / "snapshot.json"
        self._seq = self._repair_and_scan()
        self._fh = open(self.events_path, "ab")

    def _repair_and_scan(self) -> int:
        """Truncate an aborted tail write, returning the last committed seq.

        An event counts as committed only once its full line (including the
        newline) is on disk, so a torn tail is an aborted append and is cut
        off; otherwise the next append would fuse with it into a corrupt line.
        A malformed line before the tail is real corruption and raises.
        """
        if not self.events_path.exists():
            return 0
        last = 0
        committed_end = 0
        with open(self.events_path, "rb") as fh:
            raw = fh.read()
        offset = 0
        while offset < len(raw):
            newline = raw.find(b"\n", offset)
            if newline == -1:
                break  # torn tail, no newline
            line = raw[offset : newline + 1]
            if line.strip():
                try:
                    last = json.loads(line)["seq"]
                except (json.JSONDecodeError, KeyError, TypeError):
                    if newline + 1 < len(raw):
                        raise CorruptLogError(
                            f"unparseable committed event line at byte {offset} "
                            f"of {self.events_path}"
                        ) from None
                    break  # torn final line that happens to contain a newline
            committed_end = newline + 1
            offset = newline + 1
        if committed_end < len(raw):
            with open(self.events_path, "r+b") as fh:
                fh.truncate(committed_end)
        return last

    @property
    def last_seq(self) -> int:
        return self._seq

    def append(self, kind: str, payload: dict) -> dict:
        self._seq += 1
        event = {"seq": self._seq, "kind": kind, "payload": payload}
        self._fh.write((json.dumps(event, sort_keys=True) + "\n").encode("utf-8"))
        self._fh.flush()
        os.fsync(self._fh.fileno())
        return event

    def events(self, after_seq: int = 0) -> Iterator[dict]:
        if not self.events_path.exists():
            return
        with open(self.events_path, encoding="utf-8") as fh:
            for line in fh:
                if not line.endswith("\n"):
                    break  # torn tail from a concurrent or aborted append
                line = line.strip()
                if not line:
                    continue
                event = json.loads(line)
                if event["seq"] > after_seq:
                    yield event

    def write_snapshot(self, state: dict) -> None:
        doc = {"seq": self._seq, "state": state}
        tmp = self.snapshot_path.with_suffix(".json.tmp")
        with open(tmp, "w", encoding="utf-8") as fh:
            json.dump(doc, fh, sort_keys=True)
            fh.flush()
            os.fsync(fh.fileno())
        os.replace(tmp, self.snapshot_path)

    def load_snapshot(self) -> tuple[int, dict] | None:
        if not self.snapshot_path.exists():
            return None
        with open(self.snapshot_path, encoding="utf-8") as fh:
            doc = json.load(fh)
        return doc["seq"], doc["state"]

    def close(self) -> None:
        self._fh.close()
