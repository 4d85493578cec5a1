"""Annotation records, the append-only annotation store, and scan manifests.

Human slider choices are persisted as newline-delimited JSON, one record
per line, newest last. The store keeps a latest-per-scan index in memory,
rebuilt by replaying the log at startup; appends are serialized through a
lock and flushed to disk before acknowledging, so an acknowledged record
survives a restart.
"""

from __future__ import annotations

import json
import os
import threading
from dataclasses import dataclass
from datetime import datetime, timezone
from pathlib import Path

from pydantic import BaseModel, ConfigDict, Field, ValidationError

from .errors import SchemaError


def _utc_now_iso() -> str:
    return datetime.now(timezone.utc).isoformat()


class AnnotationRecord(BaseModel):
    """One human annotation: slider values for a scan's eyelid retopo."""

    model_config = ConfigDict(extra="forbid")

    scan_id: str
    u_global: float = Field(ge=0.0, le=1.0)
    u_inner: float = Field(ge=0.0, le=1.0)
    u_outer: float = Field(ge=0.0, le=1.0)
    sharpen_strength: float = Field(default=0.0, ge=0.0, le=1.0)
    sharpen_orientation_deg: float = Field(default=0.0, ge=-90.0, le=90.0)
    annotator: str = "anonymous"
    timestamp: str = Field(default_factory=_utc_now_iso)


class AnnotationStore:
    """Append-only NDJSON log with a latest-per-scan index (last write wins)."""

    def __init__(self, log_path: str | Path):
        self.log_path = Path(log_path)
        self._lock = threading.Lock()
        self._latest: dict[str, AnnotationRecord] = {}
        if self.log_path.exists():
            self._replay()

    def _replay(self) -> None:
        with open(self.log_path, "r", encoding="utf-8") as fh:
            for line_no, line in enumerate(fh, start=1):
                line = line.strip()
                if not line:
                    continue
                try:
                    record = AnnotationRecord.model_validate_json(line)
                except ValidationError as exc:
                    raise SchemaError(f"annotation log line {line_no} is invalid: {exc}") from exc
                self._latest[record.scan_id] = record

    def append(self, record: AnnotationRecord) -> AnnotationRecord:
        """Persist a record; returns it once it is durable on disk."""
        line = record.model_dump_json() + "\n"
        with self._lock:
            self.log_path.parent.mkdir(parents=True, exist_ok=True)
            with open(self.log_path, "a", encoding="utf-8") as fh:
                fh.write(line)
                fh.flush()
                os.fsync(fh.fileno())
            self._latest[record.scan_id] = record
        return record

    def latest(self, scan_id: str) -> AnnotationRecord | None:
        with self._lock:
            return self._latest.get(scan_id)

    def annotated_scan_ids(self) -> list[str]:
        with self._lock:
            return sorted(self._latest)


@dataclass(frozen=True)
class ScanEntry:
    """One scan available for annotation."""

    scan_id: str
    scan_mesh_path: Path
    display_name: str


def load_scan_manifest(path: str | Path, check_paths: bool = True) -> list[ScanEntry]:
    """Load a scan manifest (JSON list of entries) with unique ids.

    Relative mesh paths resolve against the manifest's directory. With
    ``check_paths`` every mesh file must exist, which is the service-start
    contract.
    """
    path = Path(path)
    with open(path, "r", encoding="utf-8") as fh:
        try:
            doc = json.load(fh)
        except json.JSONDecodeError as exc:
            raise SchemaError(f"not valid JSON: {exc}") from exc
    if not isinstance(doc, list):
        raise SchemaError("scan manifest must be a JSON list")
    entries: list[ScanEntry] = []
    seen: set[str] = set()
    for i, item in enumerate(doc):
        if not isinstance(item, dict) or "scan_id" not in item or "scan_mesh_path" not in item:
            raise SchemaError(f"scan manifest entry {i} needs scan_id and scan_mesh_path")
        scan_id = str(item["scan_id"])
        if scan_id in seen:
            raise SchemaError(f"duplicate scan id {scan_id!r} in manifest")
        seen.add(scan_id)
        mesh_path = Path(item["scan_mesh_path"])
        if not mesh_path.is_absolute():
            mesh_path = path.parent / mesh_path
        if check_paths and not mesh_path.exists():
            raise SchemaError(f"scan mesh for {scan_id!r} not found: {mesh_path}")
        entries.append(
            ScanEntry(
                scan_id=scan_id,
                scan_mesh_path=mesh_path,
                display_name=str(item.get("display_name", scan_id)),
            )
        )
    return entries


def save_scan_manifest(entries: list[ScanEntry], path: str | Path) -> None:
    doc = [
        {
            "scan_id": e.scan_id,
            "scan_mesh_path": str(e.scan_mesh_path),
            "display_name": e.display_name,
        }
        for e in entries
    ]
    Path(path).write_text(json.dumps(doc, indent=2, sort_keys=True) + "\n", encoding="utf-8")
