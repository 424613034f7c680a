"""Per-instance explanation reports and their line-delimited form.

One report captures everything the pipeline produced for one corpus
record: token-level attribution, the positive cooperative pairs, the
minimal feature set with frequencies, the bounds, the exact config, and
the instance-level metric values. Serialization is canonical JSON
(sorted keys, fixed separators), so identical inputs yield identical
bytes and every file round-trips losslessly.
"""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass
from typing import Any, Mapping

from .errors import InputError


@dataclass(frozen=True)
class PairScoreEntry:
    i: int
    j: int
    cig: float


@dataclass(frozen=True)
class MfsEntry:
    i: int
    j: int
    frequency: float


@dataclass(frozen=True)
class ExplanationReport:
    instance_id: str
    tokens: tuple[str, ...]
    predicted_class: int
    predicted_probability: float
    ig: tuple[float, ...]
    positive_pairs: tuple[PairScoreEntry, ...]
    mfs_pairs: tuple[MfsEntry, ...]
    mfs_words: tuple[int, ...]
    u1: float
    u2: float
    u2_prime: tuple[float, ...]
    degenerate: bool
    oov_count: int
    config: Mapping[str, Any]
    seed: int
    comp: float
    lo: float
    fms: float

    def __post_init__(self) -> None:
        n = len(self.tokens)
        if len(self.ig) != n:
            raise InputError("one attribution score per token is required")
        for entry in list(self.positive_pairs) + list(self.mfs_pairs):
            if not (0 <= entry.i < entry.j < n):
                raise InputError(f"pair ({entry.i}, {entry.j}) out of range for {n} tokens")
        for w in self.mfs_words:
            if not 0 <= w < n:
                raise InputError(f"word index {w} out of range for {n} tokens")


def report_to_dict(report: ExplanationReport) -> dict[str, Any]:
    payload = asdict(report)
    payload["tokens"] = list(report.tokens)
    payload["config"] = dict(report.config)
    return payload


def report_from_dict(raw: Mapping[str, Any]) -> ExplanationReport:
    try:
        return ExplanationReport(
            instance_id=raw["instance_id"],
            tokens=tuple(raw["tokens"]),
            predicted_class=int(raw["predicted_class"]),
            predicted_probability=float(raw["predicted_probability"]),
            ig=tuple(float(v) for v in raw["ig"]),
            positive_pairs=tuple(
                PairScoreEntry(i=int(p["i"]), j=int(p["j"]), cig=float(p["cig"]))
                for p in raw["positive_pairs"]
            ),
            mfs_pairs=tuple(
                MfsEntry(i=int(p["i"]), j=int(p["j"]), frequency=float(p["frequency"]))
                for p in raw["mfs_pairs"]
            ),
            mfs_words=tuple(int(w) for w in raw["mfs_words"]),
            u1=float(raw["u1"]),
            u2=float(raw["u2"]),
            u2_prime=tuple(float(v) for v in raw["u2_prime"]),
            degenerate=bool(raw["degenerate"]),
            oov_count=int(raw["oov_count"]),
            config=dict(raw["config"]),
            seed=int(raw["seed"]),
            comp=float(raw["comp"]),
            lo=float(raw["lo"]),
            fms=float(raw["fms"]),
        )
    except KeyError as exc:
        raise InputError(f"report record missing field {exc}") from exc


def report_to_line(report: ExplanationReport) -> str:
    return json.dumps(report_to_dict(report), sort_keys=True, separators=(",", ":"))


def report_from_line(line: str) -> ExplanationReport:
    try:
        raw = json.loads(line)
    except json.JSONDecodeError as exc:
        raise InputError(f"report line is not valid JSON: {exc}") from exc
    return report_from_dict(raw)


def write_reports(reports: list[ExplanationReport], path: str) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for report in reports:
            fh.write(report_to_line(report))
            fh.write("\n")


def read_reports(path: str) -> list[ExplanationReport]:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            lines = fh.read().splitlines()
    except OSError as exc:
        raise InputError(f"cannot read report file: {exc}") from exc
    return [report_from_line(line) for line in lines if line.strip()]
