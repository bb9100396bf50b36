"""Canonical document persistence.

Documents serialize to canonical JSON — sorted keys, compact separators, a
trailing newline — so identical states produce byte-identical files and the
simulation's determinism checks can compare output directly.
"""
from __future__ import annotations

import json
from pathlib import Path

from .errors import PersistenceError, SchemaVersionError
from .model import SCHEMA_VERSION, Document, Event


def canonical_json(obj) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":"), ensure_ascii=False)


def dumps(doc: Document) -> str:
    return canonical_json(doc.to_dict()) + "\n"


def save(doc: Document, path: str | Path) -> None:
    Path(path).write_text(dumps(doc), encoding="utf-8")


def loads(text: str) -> Document:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise PersistenceError(f"malformed document JSON: {exc}") from None
    if not isinstance(data, dict):
        raise PersistenceError("document JSON must be an object")
    version = data.get("schema_version")
    if version != SCHEMA_VERSION:
        raise SchemaVersionError(f"unsupported schema_version: {version!r}")
    return Document.from_dict(data)


def load(path: str | Path) -> Document:
    return loads(Path(path).read_text(encoding="utf-8"))


def dump_events(events: list[Event]) -> str:
    return canonical_json({
        "schema_version": SCHEMA_VERSION,
        "events": [e.to_dict() for e in events],
    }) + "\n"


def load_events(text: str) -> list[Event]:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise PersistenceError(f"malformed event log JSON: {exc}") from None
    if data.get("schema_version") != SCHEMA_VERSION:
        raise SchemaVersionError(f"unsupported schema_version: {data.get('schema_version')!r}")
    return [Event.from_dict(e) for e in data["events"]]
