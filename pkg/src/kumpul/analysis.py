"""Pluggable analyzers over one preprocessed dataset.

Each analyzer is a pure function of (records, params) producing an
AnalysisResult whose ``detail`` shape depends on the analyzer: per-record
sentiment labels, a zero-filled time series, a weighted mention-edge list
with degree metrics, or a ranked term list. New analyzers plug in through
:func:`register_analyzer` without touching dispatch tables elsewhere.
"""

from __future__ import annotations

import re
from collections import Counter
from dataclasses import dataclass, field
from datetime import datetime, timedelta, timezone
from pathlib import Path
from typing import Any, Callable, Optional, Sequence

from .errors import ConflictError, NotFoundError, ValidationError
from .model import Record, tokenize
from .store import Store

DATA_DIR = Path(__file__).parent / "data"
DEFAULT_LEXICON = DATA_DIR / "lexicon_id.txt"
DEFAULT_STOPWORDS = DATA_DIR / "stopwords.txt"

BUILTIN_ANALYZERS = ("sentiment", "trend", "network", "terms")
TREND_BUCKETS = ("hour", "day", "week")

# Handles are pulled from the raw text, before normalization strips @ and _.
_MENTION_RE = re.compile(r"@(\w+)")


@dataclass(frozen=True)
class AnalysisRequest:
    dataset_id: str
    analyzer: str
    text_column: str = "text"
    params: dict[str, Any] = field(default_factory=dict)

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> "AnalysisRequest":
        if not isinstance(data, dict):
            raise ValidationError("analysis request must be an object")
        dataset_id = data.get("dataset_id")
        if not dataset_id or not isinstance(dataset_id, str):
            raise ValidationError(
                "analysis runs on exactly one dataset",
                {"dataset_id": "a single dataset id is required"},
            )
        analyzer = data.get("analyzer")
        if not analyzer:
            raise ValidationError("analyzer is required", {"analyzer": "required"})
        text_column = data.get("text_column", "text")
        if text_column not in ("text", "title"):
            raise ValidationError(
                "text_column must be text or title", {"text_column": "text|title"}
            )
        return cls(
            dataset_id=dataset_id,
            analyzer=analyzer,
            text_column=text_column,
            params=dict(data.get("params") or {}),
        )


@dataclass(frozen=True)
class AnalysisResult:
    analyzer_id: str
    summary: dict[str, Any]
    detail: dict[str, Any]
    produced_at: datetime = field(default_factory=lambda: datetime.now(timezone.utc))

    def to_dict(self) -> dict[str, Any]:
        from .model import format_timestamp

        return {
            "analyzer_id": self.analyzer_id,
            "summary": self.summary,
            "detail": self.detail,
            "produced_at": format_timestamp(self.produced_at),
        }


def _column_text(record: Record, column: str) -> str:
    if column == "title":
        return record.title or ""
    return record.text


def load_lexicon(path: str | Path | None = None) -> dict[str, int]:
    """Lexicon file format: one entry per line, ``word<TAB>+1|-1``."""
    path = Path(path) if path else DEFAULT_LEXICON
    if not path.exists():
        raise NotFoundError(f"missing sentiment lexicon {path}")
    lexicon: dict[str, int] = {}
    for line in path.read_text(encoding="utf-8").splitlines():
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        word, _, polarity = line.partition("\t")
        lexicon[word.strip().lower()] = 1 if polarity.strip() in ("+1", "1") else -1
    return lexicon


def load_stopwords(path: str | Path | None = None) -> frozenset[str]:
    path = Path(path) if path else DEFAULT_STOPWORDS
    if not path.exists():
        raise NotFoundError(f"missing stopword list {path}")
    return frozenset(
        w.strip().lower()
        for w in path.read_text(encoding="utf-8").splitlines()
        if w.strip() and not w.startswith("#")
    )


# ---------------------------------------------------------------------------
# analyzers
# ---------------------------------------------------------------------------


def analyze_sentiment(records: Sequence[Record], params: dict[str, Any],
                      text_column: str = "text") -> AnalysisResult:
    lexicon = load_lexicon(params.get("lexicon_path"))
    labels = []
    counts = {"positive": 0, "negative": 0, "neutral": 0}
    total_score = 0.0
    for record in records:
        tokens = tokenize(_column_text(record, text_column))
        if tokens:
            score = sum(lexicon.get(t, 0) for t in tokens) / len(tokens)
        else:
            score = 0.0
        label = "positive" if score > 0 else "negative" if score < 0 else "neutral"
        counts[label] += 1
        total_score += score
        labels.append({"record_id": record.record_id, "score": score, "label": label})
    summary = {
        "records": len(labels),
        **counts,
        "mean_score": (total_score / len(labels)) if labels else 0.0,
    }
    return AnalysisResult("sentiment", summary, {"labels": labels})


def _bucket_start(dt: datetime, bucket: str, offset: timedelta) -> datetime:
    local = dt + offset
    if bucket == "hour":
        start = local.replace(minute=0, second=0, microsecond=0)
    elif bucket == "day":
        start = local.replace(hour=0, minute=0, second=0, microsecond=0)
    else:  # week, starting Monday
        day = local.replace(hour=0, minute=0, second=0, microsecond=0)
        start = day - timedelta(days=day.weekday())
    return start


def _bucket_label(start: datetime, bucket: str) -> str:
    if bucket == "hour":
        return start.strftime("%Y-%m-%dT%H:00")
    return start.strftime("%Y-%m-%d")


def analyze_trend(records: Sequence[Record], params: dict[str, Any],
                  text_column: str = "text") -> AnalysisResult:
    bucket = params.get("bucket", "day")
    if bucket not in TREND_BUCKETS:
        raise ValidationError(f"bucket must be one of {TREND_BUCKETS}", {"bucket": "invalid"})
    offset = timedelta(minutes=int(params.get("tz_offset_minutes", 0)))
    dated = [r for r in records if r.published_at is not None]
    missing = len(records) - len(dated)
    if not dated:
        raise ValidationError("dataset has no timestamped records")
    step = {"hour": timedelta(hours=1), "day": timedelta(days=1), "week": timedelta(days=7)}[bucket]
    starts = [_bucket_start(r.published_at, bucket, offset) for r in dated]
    counts = Counter(starts)
    series = []
    cursor, last = min(starts), max(starts)
    while cursor <= last:
        series.append({"bucket": _bucket_label(cursor, bucket), "count": counts.get(cursor, 0)})
        cursor += step
    peak = max(series, key=lambda item: item["count"])
    summary = {
        "records": len(records),
        "counted": len(dated),
        "missing_timestamp": missing,
        "buckets": len(series),
        "peak_bucket": peak["bucket"],
        "peak_count": peak["count"],
    }
    return AnalysisResult("trend", summary, {"bucket": bucket, "series": series})


def analyze_network(records: Sequence[Record], params: dict[str, Any],
                    text_column: str = "text") -> AnalysisResult:
    """Mention graph: author -> each distinct @handle per record, weighted
    by the number of records in which the pair occurs."""
    weights: Counter = Counter()
    for record in records:
        if not record.author:
            continue
        source = record.author.lower()
        handles = {h.lower() for h in _MENTION_RE.findall(_column_text(record, text_column))}
        for handle in handles:
            weights[(source, handle)] += 1
    edges = [
        {"src": src, "dst": dst, "weight": w}
        for (src, dst), w in sorted(weights.items(), key=lambda kv: (-kv[1], kv[0]))
    ]
    out_degree: Counter = Counter()
    in_degree: Counter = Counter()
    weighted: Counter = Counter()
    for edge in edges:
        out_degree[edge["src"]] += 1
        in_degree[edge["dst"]] += 1
        weighted[edge["src"]] += edge["weight"]
        weighted[edge["dst"]] += edge["weight"]
    nodes = [
        {
            "id": node,
            "in_degree": in_degree.get(node, 0),
            "out_degree": out_degree.get(node, 0),
            "weighted_degree": weighted[node],
        }
        for node in sorted(weighted, key=lambda n: (-weighted[n], n))
    ]
    summary = {
        "nodes": len(nodes),
        "edges": len(edges),
        "total_weight": sum(e["weight"] for e in edges),
        "top_degree": [
            {"id": n["id"], "weighted_degree": n["weighted_degree"]} for n in nodes[:10]
        ],
    }
    return AnalysisResult("network", summary, {"edges": edges, "nodes": nodes})


def analyze_terms(records: Sequence[Record], params: dict[str, Any],
                  text_column: str = "text") -> AnalysisResult:
    top_k = int(params.get("top_k", 50))
    if top_k < 0:
        raise ValidationError("top_k must be >= 0", {"top_k": ">= 0"})
    if "stopwords" in params:
        stopwords = frozenset(w.lower() for w in params["stopwords"])
    else:
        stopwords = load_stopwords(params.get("stopwords_path"))
    counts: Counter = Counter()
    total_tokens = 0
    for record in records:
        tokens = tokenize(_column_text(record, text_column))
        total_tokens += len(tokens)
        counts.update(t for t in tokens if t not in stopwords)
    ranked = sorted(counts.items(), key=lambda kv: (-kv[1], kv[0]))[:top_k]
    terms = [{"term": t, "count": c} for t, c in ranked]
    summary = {
        "records": len(records),
        "total_tokens": total_tokens,
        "unique_terms": len(counts),
        "top_k": top_k,
    }
    return AnalysisResult("terms", summary, {"terms": terms})


# ---------------------------------------------------------------------------
# registry and entry point
# ---------------------------------------------------------------------------

Analyzer = Callable[[Sequence[Record], dict[str, Any], str], AnalysisResult]

_REGISTRY: dict[str, Analyzer] = {}


def register_analyzer(analyzer_id: str, fn: Analyzer) -> None:
    if analyzer_id in _REGISTRY:
        raise ConflictError(f"analyzer {analyzer_id!r} already registered")
    _REGISTRY[analyzer_id] = fn


def analyzer_registered(analyzer_id: str) -> bool:
    return analyzer_id in _REGISTRY


def analyzer_catalog() -> list[str]:
    return sorted(_REGISTRY)


def run_analysis(store: Store, request: AnalysisRequest) -> AnalysisResult:
    if request.analyzer not in _REGISTRY:
        raise ValidationError(
            f"unknown analyzer {request.analyzer!r}", {"analyzer": "not registered"}
        )
    dataset = store.find_dataset(request.dataset_id)
    records = list(store.iter_records(dataset.dataset_id))
    return _REGISTRY[request.analyzer](records, request.params, request.text_column)


for _name, _fn in (
    ("sentiment", analyze_sentiment),
    ("trend", analyze_trend),
    ("network", analyze_network),
    ("terms", analyze_terms),
):
    register_analyzer(_name, _fn)
