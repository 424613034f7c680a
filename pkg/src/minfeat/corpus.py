"""Corpus ingestion: line-delimited JSON records with id, text, and label."""

from __future__ import annotations

import json
from dataclasses import dataclass

from .errors import InputError


@dataclass(frozen=True)
class CorpusRecord:
    id: str
    text: str
    label: int

    def __post_init__(self) -> None:
        if not self.id:
            raise InputError("record id must be a nonempty string")
        if not self.text.strip():
            raise InputError("record text must be nonempty")
        if self.label < 0:
            raise InputError("record label must be a non-negative class index")


def tokenize(text: str) -> list[str]:
    """Whitespace tokenization after lowercasing. No further normalization."""
    return text.lower().split()


def _parse_line(line: str, line_no: int) -> CorpusRecord:
    try:
        raw = json.loads(line)
    except json.JSONDecodeError as exc:
        raise InputError(f"line {line_no}: malformed record: {exc}") from exc
    if not isinstance(raw, dict):
        raise InputError(f"line {line_no}: record must be a JSON object")
    for field_name in ("id", "text", "label"):
        if field_name not in raw:
            raise InputError(f"line {line_no}: record missing field {field_name!r}")
    if not isinstance(raw["id"], str):
        raise InputError(f"line {line_no}: id must be a string")
    if not isinstance(raw["text"], str):
        raise InputError(f"line {line_no}: text must be a string")
    if not isinstance(raw["label"], int) or isinstance(raw["label"], bool):
        raise InputError(f"line {line_no}: label must be an integer")
    try:
        return CorpusRecord(id=raw["id"], text=raw["text"], label=raw["label"])
    except InputError as exc:
        raise InputError(f"line {line_no}: {exc}") from exc


def load_corpus(path: str) -> list[CorpusRecord]:
    """Parse one JSON record per line; CRLF endings are accepted.

    Blank lines are skipped. Errors name the offending line number, and a
    duplicate id reports both lines involved.
    """
    try:
        with open(path, "r", encoding="utf-8", newline=None) as fh:
            text = fh.read()
    except OSError as exc:
        raise InputError(f"cannot read corpus: {exc}") from exc

    records: list[CorpusRecord] = []
    seen: dict[str, int] = {}
    for line_no, line in enumerate(text.splitlines(), start=1):
        stripped = line.strip()
        if not stripped:
            continue
        record = _parse_line(stripped, line_no)
        if record.id in seen:
            raise InputError(
                f"duplicate id {record.id!r} on lines {seen[record.id]} and {line_no}"
            )
        seen[record.id] = line_no
        records.append(record)
    if not records:
        raise InputError("corpus file contains no records")
    return records


def save_corpus(records: list[CorpusRecord], path: str) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for rec in records:
            fh.write(
                json.dumps(
                    {"id": rec.id, "text": rec.text, "label": rec.label},
                    sort_keys=True,
                    separators=(",", ":"),
                )
            )
            fh.write("\n")
