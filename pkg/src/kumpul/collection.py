"""Connector framework: heterogeneous inputs in, common-schema records out.

Built-in connectors cover local files (JSON Lines, CSV), static HTTP feeds
(GET returning a JSON array), and the synthetic generator. A connector is a
factory registered under a kind; it receives the ConnectorSpec and yields
raw item dicts, which the framework maps, validates, and stores. Malformed
items are skipped and counted rather than aborting the whole job, up to a
configurable ceiling.
"""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass, field
from datetime import datetime
from typing import Any, Callable, Iterable, Iterator, Optional

import requests

from .errors import ConflictError, JobError, NotFoundError, ValidationError
from .model import Location, Record, normalize_text, parse_timestamp
from .store import Store
from .synthetic import SyntheticManifest, generate_synthetic

HTTP_TIMEOUT_SECS = 30
DEFAULT_MAX_SKIP_FRACTION = 0.5


@dataclass(frozen=True)
class ConnectorSpec:
    connector_kind: str
    source_name: str
    source_category: str
    params: dict[str, str] = field(default_factory=dict)
    keywords: tuple[str, ...] = ()
    date_range: Optional[tuple[datetime, datetime]] = None

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> "ConnectorSpec":
        if not isinstance(data, dict):
            raise ValidationError("connector spec must be an object")
        missing = [k for k in ("connector_kind", "source_name", "source_category") if not data.get(k)]
        if missing:
            raise ValidationError(
                "connector spec incomplete", {k: "required" for k in missing}
            )
        date_range = None
        if data.get("date_range"):
            d = data["date_range"]
            date_range = (parse_timestamp(d["start"]), parse_timestamp(d["end"]))
            if date_range[0] > date_range[1]:
                raise ValidationError("date_range start must be <= end")
        params = {str(k): str(v) for k, v in (data.get("params") or {}).items()}
        return cls(
            connector_kind=data["connector_kind"],
            source_name=data["source_name"],
            source_category=data["source_category"],
            params=params,
            keywords=tuple(data.get("keywords") or ()),
            date_range=date_range,
        )

    def to_dict(self) -> dict[str, Any]:
        out: dict[str, Any] = {
            "connector_kind": self.connector_kind,
            "source_name": self.source_name,
            "source_category": self.source_category,
            "params": dict(self.params),
        }
        if self.keywords:
            out["keywords"] = list(self.keywords)
        if self.date_range:
            from .model import format_timestamp

            out["date_range"] = {
                "start": format_timestamp(self.date_range[0]),
                "end": format_timestamp(self.date_range[1]),
            }
        return out


@dataclass(frozen=True)
class FieldMapping:
    """Maps Record field names to input columns, with constant defaults.

    ``fields`` maps record field -> input key; ``constants`` supplies fixed
    values for unmapped fields; ``timestamp_format`` is an optional strptime
    pattern (RFC 3339 is always accepted). A text mapping is mandatory.
    """

    fields: dict[str, str] = field(default_factory=dict)
    constants: dict[str, str] = field(default_factory=dict)
    timestamp_format: Optional[str] = None

    def __post_init__(self) -> None:
        if "text" not in self.fields and "text" not in self.constants:
            raise ValidationError("field mapping must map the text field")

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> "FieldMapping":
        if not isinstance(data, dict):
            raise ValidationError("field mapping must be an object")
        return cls(
            fields={str(k): str(v) for k, v in (data.get("fields") or {}).items()},
            constants={str(k): str(v) for k, v in (data.get("constants") or {}).items()},
            timestamp_format=data.get("timestamp_format"),
        )

    def _timestamp(self, raw: Any) -> datetime:
        if self.timestamp_format and isinstance(raw, str):
            from datetime import timezone

            dt = datetime.strptime(raw, self.timestamp_format)
            return dt.replace(tzinfo=dt.tzinfo or timezone.utc)
        return parse_timestamp(raw)

    def apply(self, item: dict[str, Any], spec: ConnectorSpec, fallback_id: str) -> Record:
        def pick(record_field: str) -> Any:
            if record_field in self.fields:
                return item.get(self.fields[record_field])
            return self.constants.get(record_field)

        text = pick("text")
        if text is None:
            raise ValidationError("item is missing the mapped text field")
        published_raw = pick("published_at")
        collected_raw = pick("collected_at")
        location = None
        loc_raw = pick("location")
        if isinstance(loc_raw, dict):
            location = Location(lat=float(loc_raw["lat"]), lon=float(loc_raw["lon"]))
        elif isinstance(loc_raw, str) and loc_raw:
            lat, lon = (float(p) for p in loc_raw.split(",", 1))
            location = Location(lat=lat, lon=lon)
        extras: dict[str, str] = {}
        extras_raw = pick("extras")
        if isinstance(extras_raw, dict):
            extras = {str(k): str(v) for k, v in extras_raw.items()}
        # CSV exports flatten extras into extras.<key> columns; fold them back
        for key, value in item.items():
            if isinstance(key, str) and key.startswith("extras.") and value not in (None, ""):
                extras[key[len("extras.") :]] = str(value)
        from datetime import timezone

        return Record(
            record_id=str(pick("record_id") or fallback_id),
            source=str(pick("source") or spec.source_name),
            source_category=str(pick("source_category") or spec.source_category),
            text=str(text),
            collected_at=(
                self._timestamp(collected_raw)
                if collected_raw not in (None, "")
                else datetime.now(timezone.utc).replace(microsecond=0)
            ),
            url=_opt_str(pick("url")),
            author=_opt_str(pick("author")),
            published_at=(
                self._timestamp(published_raw) if published_raw not in (None, "") else None
            ),
            title=_opt_str(pick("title")),
            language=_opt_str(pick("language")),
            location=location,
            raw_ref=_opt_str(pick("raw_ref")),
            extras=extras,
        )


def _opt_str(value: Any) -> Optional[str]:
    if value in (None, ""):
        return None
    return str(value)


def _mapping_from_params(params: dict[str, str]) -> FieldMapping:
    if "mapping" in params:
        try:
            return FieldMapping.from_dict(json.loads(params["mapping"]))
        except json.JSONDecodeError as exc:
            raise ValidationError(f"mapping param is not valid JSON: {exc}")
    if "mapping_path" in params:
        with open(params["mapping_path"], encoding="utf-8") as fh:
            return FieldMapping.from_dict(json.load(fh))
    raise ValidationError(
        "connector params need a mapping (inline 'mapping' or 'mapping_path')"
    )


# ---------------------------------------------------------------------------
# built-in connectors: each yields (item_dict | None) where None marks a
# malformed item that should count as skipped
# ---------------------------------------------------------------------------


def _file_connector(spec: ConnectorSpec) -> Iterator[Optional[dict[str, Any]]]:
    params = spec.params
    if "path" not in params:
        raise ValidationError("file connector needs a path param")
    path = params["path"]
    fmt = params.get("format") or ("csv" if path.endswith(".csv") else "jsonl")
    if fmt not in ("jsonl", "csv"):
        raise ValidationError(f"file connector format must be jsonl or csv, got {fmt!r}")
    try:
        raw = open(path, encoding="utf-8").read()
    except OSError as exc:
        raise JobError(f"unreadable input {path!r}: {exc}", retryable=False)
    if fmt == "jsonl":
        for line in raw.splitlines():
            if not line.strip():
                continue
            try:
                item = json.loads(line)
                yield item if isinstance(item, dict) else None
            except json.JSONDecodeError:
                yield None
    else:
        yield from csv.DictReader(io.StringIO(raw))


def _http_feed_connector(spec: ConnectorSpec) -> Iterator[Optional[dict[str, Any]]]:
    if "url" not in spec.params:
        raise ValidationError("http_feed connector needs a url param")
    try:
        response = requests.get(spec.params["url"], timeout=HTTP_TIMEOUT_SECS)
    except requests.RequestException as exc:
        raise JobError(f"feed unreachable: {exc}", retryable=True)
    if response.status_code != 200:
        raise JobError(f"feed returned HTTP {response.status_code}", retryable=True)
    try:
        payload = response.json()
    except ValueError:
        raise JobError("feed body is not JSON", retryable=False)
    if not isinstance(payload, list):
        raise JobError("feed must be a JSON array of objects", retryable=False)
    for item in payload:
        yield item if isinstance(item, dict) else None


ConnectorFactory = Callable[[ConnectorSpec], Iterable[Optional[dict[str, Any]]]]

_REGISTRY: dict[str, dict[str, Any]] = {}


def register_connector(
    kind: str, factory: ConnectorFactory, params_doc: Optional[dict[str, str]] = None
) -> None:
    """Make a new source kind available without touching downstream layers."""
    if kind in _REGISTRY:
        raise ConflictError(f"connector kind {kind!r} already registered")
    _REGISTRY[kind] = {"factory": factory, "params": params_doc or {}}


def connector_catalog() -> list[dict[str, Any]]:
    return [
        {"kind": kind, "params": dict(entry["params"])}
        for kind, entry in sorted(_REGISTRY.items())
    ]


def connector_registered(kind: str) -> bool:
    return kind in _REGISTRY


def validate_spec(spec: ConnectorSpec) -> None:
    """Submit-time validation: required params present for the kind."""
    if spec.connector_kind not in _REGISTRY:
        raise ValidationError(
            f"unknown connector kind {spec.connector_kind!r}",
            {"connector_kind": "not registered"},
        )
    if spec.connector_kind == "file":
        if "path" not in spec.params:
            raise ValidationError("file connector needs a path param", {"params.path": "required"})
        _mapping_from_params(spec.params)
    elif spec.connector_kind == "http_feed":
        if "url" not in spec.params:
            raise ValidationError("http_feed connector needs a url param", {"params.url": "required"})
        _mapping_from_params(spec.params)
    elif spec.connector_kind == "synthetic":
        SyntheticManifest.from_params(spec.params)


@dataclass(frozen=True)
class CollectionOutcome:
    dataset_id: str
    count: int
    skipped: int


def run_collection(
    store: Store, spec: ConnectorSpec, created_by_job: Optional[str] = None
) -> CollectionOutcome:
    """Run a connector into a new raw dataset; skip-and-report malformed items."""
    validate_spec(spec)

    if spec.connector_kind == "synthetic":
        manifest = SyntheticManifest.from_params(
            {**spec.params, "source_name": spec.source_name, "source_category": spec.source_category}
        )
        records, _truth = generate_synthetic(manifest)
        dataset = store.new_dataset(spec.source_name, kind="raw", created_by_job=created_by_job)
        store.append_records(dataset.dataset_id, records)
        return CollectionOutcome(dataset.dataset_id, len(records), 0)

    factory = _REGISTRY[spec.connector_kind]["factory"]
    mapping = _mapping_from_params(spec.params)
    max_skip = float(spec.params.get("max_skip_fraction", DEFAULT_MAX_SKIP_FRACTION))

    records: list[Record] = []
    seen_ids: set[str] = set()
    skipped = 0
    total = 0
    for index, item in enumerate(factory(spec)):
        total += 1
        if item is None:
            skipped += 1
            continue
        try:
            record = mapping.apply(item, spec, fallback_id=f"{spec.source_name}-{index + 1}")
        except (ValidationError, ValueError, KeyError):
            skipped += 1
            continue
        from .model import validate_record

        problems = [v for v in validate_record(record) if v.code != "empty_text"]
        if problems or not record.text or record.record_id in seen_ids:
            skipped += 1
            continue
        if not _passes_collection_filters(record, spec):
            continue  # filtered by spec keywords/date_range, not malformed
        seen_ids.add(record.record_id)
        records.append(record)

    if total and skipped / total > max_skip:
        raise JobError(
            f"{skipped}/{total} items skipped, above the {max_skip:.0%} ceiling",
            retryable=False,
        )
    dataset = store.new_dataset(spec.source_name, kind="raw", created_by_job=created_by_job)
    store.append_records(dataset.dataset_id, records)
    return CollectionOutcome(dataset.dataset_id, len(records), skipped)


def _passes_collection_filters(record: Record, spec: ConnectorSpec) -> bool:
    if spec.keywords:
        haystack = normalize_text(f"{record.title or ''} {record.text}")
        if not any(normalize_text(k) in haystack for k in spec.keywords):
            return False
    if spec.date_range and record.published_at is not None:
        start, end = spec.date_range
        if not start <= record.published_at <= end:
            return False
    return True


register_connector(
    "file",
    _file_connector,
    {"path": "input file path", "format": "jsonl|csv (default by extension)",
     "mapping": "inline FieldMapping JSON", "mapping_path": "path to FieldMapping JSON"},
)
register_connector(
    "http_feed",
    _http_feed_connector,
    {"url": "GET endpoint returning a JSON array",
     "mapping": "inline FieldMapping JSON", "mapping_path": "path to FieldMapping JSON"},
)
register_connector(
    "synthetic",
    lambda spec: iter(()),  # handled natively in run_collection
    {"total": "record count", "duplicate_fraction": "0..1",
     "non_target_language_fraction": "0..1", "keyword_excluded_fraction": "0..1",
     "irrelevant_fraction": "0..1", "seed": "integer"},
)
