"""Common record schema, dataset lineage, and shared text utilities.

Every connector emits :class:`Record`; every filter and analyzer consumes it.
The canonical text form produced by :func:`normalize_text` is the comparison
key for deduplication and keyword matching, so its exact rules (lowercase,
then Unicode NFC, then whitespace collapse) are load-bearing.
"""

from __future__ import annotations

import json
import re
import unicodedata
from dataclasses import dataclass, field, replace
from datetime import datetime, timezone
from typing import Any, Iterable, Optional

SOURCE_CATEGORIES = ("social_media", "news", "ecommerce_review", "academic")
DATASET_KINDS = ("raw", "merged", "preprocessed")

# Record field names in canonical serialization order (CSV columns follow it).
RECORD_FIELDS = (
    "record_id",
    "source",
    "source_category",
    "url",
    "author",
    "published_at",
    "collected_at",
    "title",
    "text",
    "language",
    "location",
    "extras",
    "raw_ref",
)

_WS_RE = re.compile(r"\s+")
# Unicode alphanumerics; underscore is a separator, not a token character.
_TOKEN_RE = re.compile(r"[^\W_]+", re.UNICODE)


def normalize_text(s: str) -> str:
    """Canonical text form: lowercase, NFC-composed, single-spaced, stripped.

    Total and idempotent; lowercasing happens before composition so the
    result is a fixed point of the function.
    """
    s = unicodedata.normalize("NFC", s.lower())
    return _WS_RE.sub(" ", s).strip()


def tokenize(s: str) -> list[str]:
    """Split the canonical form of ``s`` on non-alphanumeric boundaries."""
    return _TOKEN_RE.findall(normalize_text(s))


def parse_timestamp(value: Any) -> datetime:
    """Parse an RFC 3339 string (or datetime) into an aware UTC datetime.

    Naive inputs are taken as UTC. Sub-second precision is truncated to
    seconds, matching the schema's second-precision timestamps.
    """
    if isinstance(value, datetime):
        dt = value
    elif isinstance(value, str):
        text = value.strip()
        if text.endswith(("Z", "z")):
            text = text[:-1] + "+00:00"
        dt = datetime.fromisoformat(text)
    else:
        raise ValueError(f"cannot parse timestamp from {type(value).__name__}")
    if dt.tzinfo is None:
        dt = dt.replace(tzinfo=timezone.utc)
    return dt.astimezone(timezone.utc).replace(microsecond=0)


def format_timestamp(dt: datetime) -> str:
    """RFC 3339 UTC string at second precision, e.g. ``2022-09-03T10:00:00Z``."""
    if dt.tzinfo is None:
        dt = dt.replace(tzinfo=timezone.utc)
    return dt.astimezone(timezone.utc).strftime("%Y-%m-%dT%H:%M:%SZ")


@dataclass(frozen=True)
class Location:
    lat: float
    lon: float

    def in_bounds(self) -> bool:
        return -90.0 <= self.lat <= 90.0 and -180.0 <= self.lon <= 180.0


@dataclass(frozen=True)
class Record:
    """One normalized text item in the common schema, source-agnostic."""

    record_id: str
    source: str
    source_category: str
    text: str
    collected_at: datetime
    url: Optional[str] = None
    author: Optional[str] = None
    published_at: Optional[datetime] = None
    title: Optional[str] = None
    language: Optional[str] = None
    location: Optional[Location] = None
    extras: dict[str, str] = field(default_factory=dict)
    raw_ref: Optional[str] = None

    def to_dict(self) -> dict[str, Any]:
        """JSON object with the schema field names; absent optionals omitted."""
        out: dict[str, Any] = {
            "record_id": self.record_id,
            "source": self.source,
            "source_category": self.source_category,
            "collected_at": format_timestamp(self.collected_at),
            "text": self.text,
        }
        if self.url is not None:
            out["url"] = self.url
        if self.author is not None:
            out["author"] = self.author
        if self.published_at is not None:
            out["published_at"] = format_timestamp(self.published_at)
        if self.title is not None:
            out["title"] = self.title
        if self.language is not None:
            out["language"] = self.language
        if self.location is not None:
            out["location"] = {"lat": self.location.lat, "lon": self.location.lon}
        if self.extras:
            out["extras"] = dict(self.extras)
        if self.raw_ref is not None:
            out["raw_ref"] = self.raw_ref
        return out

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), ensure_ascii=False, sort_keys=True)

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> "Record":
        loc = data.get("location")
        location = None
        if loc is not None:
            location = Location(lat=float(loc["lat"]), lon=float(loc["lon"]))
        published = data.get("published_at")
        return cls(
            record_id=str(data["record_id"]),
            source=str(data["source"]),
            source_category=str(data["source_category"]),
            text=str(data.get("text", "")),
            collected_at=parse_timestamp(data["collected_at"]),
            url=data.get("url"),
            author=data.get("author"),
            published_at=parse_timestamp(published) if published is not None else None,
            title=data.get("title"),
            language=data.get("language"),
            location=location,
            extras={str(k): str(v) for k, v in (data.get("extras") or {}).items()},
            raw_ref=data.get("raw_ref"),
        )

    def with_language(self, language: str) -> "Record":
        return replace(self, language=language)


@dataclass(frozen=True)
class Dataset:
    """An immutable, lineage-tracked collection of records."""

    dataset_id: str
    name: str
    kind: str
    parent_ids: tuple[str, ...] = ()
    created_by_job: Optional[str] = None
    record_count: int = 0
    created_at: datetime = field(default_factory=lambda: datetime.now(timezone.utc))

    def to_dict(self) -> dict[str, Any]:
        return {
            "dataset_id": self.dataset_id,
            "name": self.name,
            "kind": self.kind,
            "parent_ids": list(self.parent_ids),
            "created_by_job": self.created_by_job,
            "record_count": self.record_count,
            "created_at": format_timestamp(self.created_at),
        }


@dataclass(frozen=True)
class Violation:
    code: str
    message: str

    def __str__(self) -> str:  # pragma: no cover - repr convenience
        return f"{self.code}: {self.message}"


def validate_record(record: Record) -> list[Violation]:
    """Check every record invariant; an empty list means the record is valid."""
    violations: list[Violation] = []
    if not record.record_id:
        violations.append(Violation("empty_record_id", "record_id must be non-empty"))
    if record.source_category not in SOURCE_CATEGORIES:
        violations.append(
            Violation(
                "bad_source_category",
                f"source_category {record.source_category!r} is not one of {SOURCE_CATEGORIES}",
            )
        )
    if record.location is not None and not record.location.in_bounds():
        violations.append(
            Violation(
                "out_of_bounds_location",
                f"location ({record.location.lat}, {record.location.lon}) outside valid range",
            )
        )
    if not record.text:
        violations.append(Violation("empty_text", "text is empty"))
    return violations


def validate_dataset(meta: Dataset) -> list[Violation]:
    violations: list[Violation] = []
    if not meta.dataset_id:
        violations.append(Violation("empty_dataset_id", "dataset_id must be non-empty"))
    if meta.kind not in DATASET_KINDS:
        violations.append(
            Violation("bad_kind", f"kind {meta.kind!r} is not one of {DATASET_KINDS}")
        )
    if meta.kind == "raw" and meta.parent_ids:
        violations.append(Violation("raw_with_parents", "raw datasets have no parents"))
    if meta.kind == "merged" and len(meta.parent_ids) < 2:
        violations.append(Violation("merged_needs_parents", "merged datasets need >=2 parents"))
    if meta.kind == "preprocessed" and len(meta.parent_ids) < 1:
        violations.append(
            Violation("preprocessed_needs_parent", "preprocessed datasets need >=1 parent")
        )
    if meta.record_count < 0:
        violations.append(Violation("negative_record_count", "record_count must be >= 0"))
    return violations


def export_jsonl(records: Iterable[Record], fh) -> int:
    """One Record JSON object per line; returns the record count."""
    count = 0
    for record in records:
        fh.write(record.to_json() + "\n")
        count += 1
    return count


def export_csv(records: Iterable[Record], fh) -> int:
    """Header row, columns in schema field order, extras flattened as extras.<key>."""
    import csv as _csv

    records = list(records)
    extra_keys = sorted({k for r in records for k in r.extras})
    base = [f for f in RECORD_FIELDS if f != "extras"]
    header = base + [f"extras.{k}" for k in extra_keys]
    writer = _csv.writer(fh, lineterminator="\n")
    writer.writerow(header)
    for record in records:
        row = []
        for field_name in base:
            value = getattr(record, field_name)
            if value is None:
                row.append("")
            elif field_name in ("published_at", "collected_at"):
                row.append(format_timestamp(value))
            elif field_name == "location":
                row.append(f"{value.lat},{value.lon}")
            else:
                row.append(str(value))
        for key in extra_keys:
            row.append(record.extras.get(key, ""))
        writer.writerow(row)
    return len(records)


def merge_records(parents: list[tuple[str, Iterable[Record]]]) -> list[Record]:
    """Concatenate parents' records, namespacing ids when there are >=2 parents.

    Namespacing (``parent_id + "/" + record_id``) guarantees uniqueness in
    the merged dataset without touching record content. A single parent
    keeps its ids untouched. No deduplication happens here.
    """
    namespaced = len(parents) >= 2
    merged: list[Record] = []
    for parent_id, records in parents:
        for record in records:
            if namespaced:
                merged.append(replace(record, record_id=f"{parent_id}/{record.record_id}"))
            else:
                merged.append(record)
    return merged
