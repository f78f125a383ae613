"""Shared vocabulary for the noun-class pipeline: class ids, predictions, JSONL I/O."""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Iterable, Iterator, Union

ClassId = Union[int, str]

#: Sentinel class for clusters/words that could not be mapped to a noun class.
UNKNOWN_CLASS = "unknown"


class ValidationError(ValueError):
    """Raised when an input file, record, or parameter violates its contract."""


def class_key(c: ClassId) -> tuple:
    """Deterministic sort key over class ids: integers first, then symbolic tags.

    Used everywhere a tie is broken by "lower class id" so that mixed
    int/string universes (1..18 plus "unknown") order consistently.
    """
    if isinstance(c, bool):  # bool is an int subclass; never a valid class id
        raise ValidationError(f"invalid class id: {c!r}")
    if isinstance(c, int):
        return (0, c, "")
    return (1, 0, str(c))


@dataclass(frozen=True)
class Prediction:
    """A single (word, class) hypothesis with its confidence and producing method."""

    word: str
    noun_class: ClassId
    confidence: float
    method: str

    def to_record(self) -> dict[str, Any]:
        return {
            "word": self.word,
            "class": self.noun_class,
            "confidence": self.confidence,
            "method": self.method,
        }

    @classmethod
    def from_record(cls, rec: dict[str, Any]) -> "Prediction":
        return cls(
            word=rec["word"],
            noun_class=rec["class"],
            confidence=float(rec["confidence"]),
            method=rec.get("method", "unknown"),
        )


def dumps(obj: Any) -> str:
    """Canonical single-line JSON: sorted keys, no whitespace padding.

    Sorted keys make artifact bytes independent of dict construction order,
    which is what the byte-identical rerun guarantee rests on.
    """
    return json.dumps(obj, sort_keys=True, ensure_ascii=False, separators=(",", ":"))


def write_jsonl(path: str | Path, records: Iterable[dict], meta: dict | None = None) -> None:
    """Write a line-delimited record file, optionally prefixed by a {"meta": ...} line."""
    path = Path(path)
    with path.open("w", encoding="utf-8", newline="\n") as fh:
        if meta is not None:
            fh.write(dumps({"meta": meta}) + "\n")
        for rec in records:
            fh.write(dumps(rec) + "\n")


def read_jsonl(path: str | Path) -> tuple[dict | None, list[dict]]:
    """Read a record file written by :func:`write_jsonl`.

    Returns (meta, records); meta is None when the first line is a plain record.
    """
    meta: dict | None = None
    records: list[dict] = []
    with Path(path).open("r", encoding="utf-8") as fh:
        for i, line in enumerate(fh):
            line = line.strip()
            if not line:
                continue
            try:
                obj = json.loads(line)
            except json.JSONDecodeError as exc:
                raise ValidationError(f"{path}: line {i + 1} is not valid JSON: {exc}") from exc
            if i == 0 and isinstance(obj, dict) and set(obj) == {"meta"}:
                meta = obj["meta"]
            else:
                records.append(obj)
    return meta, records


def iter_jsonl(path: str | Path) -> Iterator[dict]:
    """Stream records from a JSONL file, skipping a leading meta line."""
    _, records = read_jsonl(path)
    return iter(records)
