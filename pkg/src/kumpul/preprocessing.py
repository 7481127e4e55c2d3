"""The composable five-filter pipeline and its stage accounting.

Stages always execute in the fixed order dedup -> date -> language ->
keyword -> relevancy; a stage absent from the config is skipped as the
identity. Reordering is deliberately not supported so stage reports stay
comparable across studies. Every filter partitions its input into kept and
removed without touching record content (the language stage only annotates
the detected code on kept records).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from datetime import datetime, timezone
from decimal import ROUND_HALF_UP, Decimal
from typing import Any, Optional, Sequence

from . import langid
from .errors import ValidationError
from .model import Record, format_timestamp, normalize_text, parse_timestamp, tokenize
from .relevancy import (
    BaselineClassifier,
    Classifier,
    RemoteClassifier,
    filter_relevancy,
)
from .simhash import near_duplicate_pairs, simhash64
from .store import Store

STAGE_ORDER = ("dedup", "date", "language", "keyword", "relevancy")
DEFAULT_NEAR_THRESHOLD = 3


# ---------------------------------------------------------------------------
# configuration
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class DedupConfig:
    mode: str = "exact"  # exact | near
    near_threshold: int = DEFAULT_NEAR_THRESHOLD

    def __post_init__(self) -> None:
        if self.mode not in ("exact", "near"):
            raise ValidationError(f"dedup mode must be exact or near, got {self.mode!r}")
        if not 0 <= self.near_threshold <= 64:
            raise ValidationError("near_threshold must be in [0, 64]")


@dataclass(frozen=True)
class DateConfig:
    start: datetime
    end: datetime
    missing_timestamp_policy: str = "drop"  # drop | keep

    def __post_init__(self) -> None:
        if self.start > self.end:
            raise ValidationError("date filter start must be <= end")
        if self.missing_timestamp_policy not in ("drop", "keep"):
            raise ValidationError("missing_timestamp_policy must be drop or keep")


@dataclass(frozen=True)
class LanguageConfig:
    targets: frozenset[str]
    unknown_policy: str = "drop"  # drop | keep
    margin: float = langid.DEFAULT_MARGIN  # 0 disables the ambiguity escape

    def __post_init__(self) -> None:
        if not self.targets:
            raise ValidationError("language filter needs at least one target")
        if self.unknown_policy not in ("drop", "keep"):
            raise ValidationError("unknown_policy must be drop or keep")
        if not 0.0 <= self.margin <= 1.0:
            raise ValidationError("language margin must be in [0, 1]")


@dataclass(frozen=True)
class KeywordConfig:
    include: tuple[str, ...] = ()
    exclude: tuple[str, ...] = ()
    match: str = "substring"  # substring | whole_word

    def __post_init__(self) -> None:
        if self.match not in ("substring", "whole_word"):
            raise ValidationError("keyword match must be substring or whole_word")


@dataclass(frozen=True)
class RelevancyStageConfig:
    context: str
    classifier: str = "baseline"  # baseline | remote
    threshold: float = 0.1
    endpoint: Optional[str] = None

    def __post_init__(self) -> None:
        if not self.context:
            raise ValidationError("relevancy context must be non-empty")
        if self.classifier not in ("baseline", "remote"):
            raise ValidationError("relevancy classifier must be baseline or remote")
        if not 0.0 <= self.threshold <= 1.0:
            raise ValidationError("relevancy threshold must be in [0, 1]")
        if self.classifier == "remote" and not self.endpoint:
            raise ValidationError("remote relevancy classifier needs an endpoint")

    def build(self) -> Classifier:
        if self.classifier == "remote":
            return RemoteClassifier(self.endpoint)  # type: ignore[arg-type]
        return BaselineClassifier()


@dataclass(frozen=True)
class PipelineConfig:
    dedup: Optional[DedupConfig] = None
    date: Optional[DateConfig] = None
    language: Optional[LanguageConfig] = None
    keyword: Optional[KeywordConfig] = None
    relevancy: Optional[RelevancyStageConfig] = None

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> "PipelineConfig":
        if not isinstance(data, dict):
            raise ValidationError("pipeline config must be an object")
        unknown = set(data) - set(STAGE_ORDER)
        if unknown:
            raise ValidationError(
                f"unknown pipeline stages: {sorted(unknown)}",
                {k: "unknown stage" for k in unknown},
            )
        kwargs: dict[str, Any] = {}
        if "dedup" in data and data["dedup"] is not None:
            d = data["dedup"]
            kwargs["dedup"] = DedupConfig(
                mode=d.get("mode", "exact"),
                near_threshold=int(d.get("near_threshold", DEFAULT_NEAR_THRESHOLD)),
            )
        if "date" in data and data["date"] is not None:
            d = data["date"]
            if "start" not in d or "end" not in d:
                raise ValidationError("date stage needs start and end")
            kwargs["date"] = DateConfig(
                start=parse_timestamp(d["start"]),
                end=parse_timestamp(d["end"]),
                missing_timestamp_policy=d.get("missing_timestamp_policy", "drop"),
            )
        if "language" in data and data["language"] is not None:
            d = data["language"]
            kwargs["language"] = LanguageConfig(
                targets=frozenset(d.get("targets", ())),
                unknown_policy=d.get("unknown_policy", "drop"),
                margin=float(d.get("margin", langid.DEFAULT_MARGIN)),
            )
        if "keyword" in data and data["keyword"] is not None:
            d = data["keyword"]
            kwargs["keyword"] = KeywordConfig(
                include=tuple(d.get("include", ())),
                exclude=tuple(d.get("exclude", ())),
                match=d.get("match", "substring"),
            )
        if "relevancy" in data and data["relevancy"] is not None:
            d = data["relevancy"]
            if "context" not in d:
                raise ValidationError("relevancy stage needs a context")
            kwargs["relevancy"] = RelevancyStageConfig(
                context=d["context"],
                classifier=d.get("classifier", "baseline"),
                threshold=float(d.get("threshold", 0.1)),
                endpoint=d.get("endpoint"),
            )
        return cls(**kwargs)

    def to_dict(self) -> dict[str, Any]:
        out: dict[str, Any] = {}
        if self.dedup:
            out["dedup"] = {
                "mode": self.dedup.mode,
                "near_threshold": self.dedup.near_threshold,
            }
        if self.date:
            out["date"] = {
                "start": format_timestamp(self.date.start),
                "end": format_timestamp(self.date.end),
                "missing_timestamp_policy": self.date.missing_timestamp_policy,
            }
        if self.language:
            out["language"] = {
                "targets": sorted(self.language.targets),
                "unknown_policy": self.language.unknown_policy,
                "margin": self.language.margin,
            }
        if self.keyword:
            out["keyword"] = {
                "include": list(self.keyword.include),
                "exclude": list(self.keyword.exclude),
                "match": self.keyword.match,
            }
        if self.relevancy:
            out["relevancy"] = {
                "context": self.relevancy.context,
                "classifier": self.relevancy.classifier,
                "threshold": self.relevancy.threshold,
                "endpoint": self.relevancy.endpoint,
            }
        return out


# ---------------------------------------------------------------------------
# stage report (Table-2-style accounting)
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class StageRow:
    name: str
    input_count: int
    output_count: int
    removed: int
    reduction_pct: float
    enabled: bool = True


@dataclass(frozen=True)
class StageReport:
    stages: tuple[StageRow, ...]
    raw_count: int
    final_count: int
    total_removed: int
    total_reduction_pct: float

    def to_dict(self) -> dict[str, Any]:
        return {
            "stages": [
                {
                    "name": s.name,
                    "input_count": s.input_count,
                    "output_count": s.output_count,
                    "removed": s.removed,
                    "reduction_pct": s.reduction_pct,
                    "enabled": s.enabled,
                }
                for s in self.stages
            ],
            "totals": {
                "raw_count": self.raw_count,
                "final_count": self.final_count,
                "total_removed": self.total_removed,
                "total_reduction_pct": self.total_reduction_pct,
            },
        }


def reduction_pct(removed: int, input_count: int) -> float:
    """removed / input * 100, rounded half-away-from-zero to one decimal.

    Zero input is defined as 0.0 (nothing to reduce). This rounding rule is
    the one that reproduces the published per-stage percentages exactly.
    """
    if input_count == 0:
        return 0.0
    pct = Decimal(removed * 100) / Decimal(input_count)
    return float(pct.quantize(Decimal("0.1"), rounding=ROUND_HALF_UP))


def compute_stage_report(
    stage_counts: Sequence[int],
    names: Optional[Sequence[str]] = None,
    enabled: Optional[Sequence[bool]] = None,
) -> StageReport:
    """Build the report from [raw, after_stage_1, ..., after_stage_n] counts."""
    if len(stage_counts) < 1:
        raise ValidationError("stage_counts needs at least the raw count")
    for a, b in zip(stage_counts, stage_counts[1:]):
        if b > a:
            raise ValidationError(f"stage counts must be non-increasing, got {a} -> {b}")
    n_stages = len(stage_counts) - 1
    if names is None:
        names = [f"stage{i + 1}" for i in range(n_stages)]
    if len(names) != n_stages:
        raise ValidationError("one name per stage transition required")
    if enabled is None:
        enabled = [True] * n_stages
    rows = []
    for i in range(n_stages):
        input_count, output_count = stage_counts[i], stage_counts[i + 1]
        removed = input_count - output_count
        rows.append(
            StageRow(
                name=names[i],
                input_count=input_count,
                output_count=output_count,
                removed=removed,
                reduction_pct=reduction_pct(removed, input_count),
                enabled=bool(enabled[i]),
            )
        )
    raw, final = stage_counts[0], stage_counts[-1]
    return StageReport(
        stages=tuple(rows),
        raw_count=raw,
        final_count=final,
        total_removed=raw - final,
        total_reduction_pct=reduction_pct(raw - final, raw),
    )


# ---------------------------------------------------------------------------
# filters
# ---------------------------------------------------------------------------


_DATETIME_MAX = datetime.max.replace(tzinfo=timezone.utc)


def _dedup_keep_key(record: Record):
    # Earliest published_at wins; missing timestamps sort last; ties on id.
    return (
        record.published_at is None,
        record.published_at or _DATETIME_MAX,
        record.record_id,
    )


def filter_dedup(
    records: Sequence[Record], cfg: DedupConfig
) -> tuple[list[Record], list[str]]:
    """Drop duplicates, keeping one representative per duplicate group.

    Exact mode groups records whose canonical text matches or whose urls
    match; near mode additionally merges records within the SimHash Hamming
    threshold. Groups are connected components of those pair relations.
    """
    records = list(records)
    n = len(records)
    parent = list(range(n))

    def find(x: int) -> int:
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    def union(a: int, b: int) -> None:
        ra, rb = find(a), find(b)
        if ra != rb:
            parent[rb] = ra

    by_text: dict[str, int] = {}
    by_url: dict[str, int] = {}
    for i, record in enumerate(records):
        text_key = normalize_text(record.text)
        if text_key in by_text:
            union(by_text[text_key], i)
        else:
            by_text[text_key] = i
        if record.url:
            if record.url in by_url:
                union(by_url[record.url], i)
            else:
                by_url[record.url] = i

    if cfg.mode == "near":
        signatures = [simhash64(r.text) for r in records]
        for i, j in near_duplicate_pairs(signatures, cfg.near_threshold):
            union(i, j)

    groups: dict[int, list[int]] = {}
    for i in range(n):
        groups.setdefault(find(i), []).append(i)

    kept_idx: set[int] = set()
    for members in groups.values():
        winner = min(members, key=lambda i: _dedup_keep_key(records[i]))
        kept_idx.add(winner)
    kept = [records[i] for i in range(n) if i in kept_idx]
    removed_ids = [records[i].record_id for i in range(n) if i not in kept_idx]
    return kept, removed_ids


def filter_date(
    records: Sequence[Record], start: datetime, end: datetime, policy: str = "drop"
) -> list[Record]:
    """Keep records with start <= published_at <= end (inclusive, UTC)."""
    if start > end:
        raise ValidationError("date filter start must be <= end")
    kept = []
    for record in records:
        if record.published_at is None:
            if policy == "keep":
                kept.append(record)
            continue
        if start <= record.published_at <= end:
            kept.append(record)
    return kept


def _match_term(term_norm: str, term_tokens: tuple[str, ...], haystack: str,
                tokens: list[str], mode: str) -> bool:
    if not term_norm:
        return False
    if mode == "substring":
        return term_norm in haystack
    # whole_word: the term's token sequence appears contiguously
    k = len(term_tokens)
    if k == 0:
        return False
    return any(tuple(tokens[i : i + k]) == term_tokens for i in range(len(tokens) - k + 1))


def filter_keyword(
    records: Sequence[Record],
    include: Sequence[str],
    exclude: Sequence[str],
    match_mode: str = "substring",
) -> list[Record]:
    """Keep iff (no include terms, or one matches) and no exclude term matches.

    Matching runs over the canonical form of title + text; terms are
    normalized the same way, so case and spacing differences never matter.
    """
    include_prepped = [(normalize_text(t), tuple(tokenize(t))) for t in include]
    exclude_prepped = [(normalize_text(t), tuple(tokenize(t))) for t in exclude]
    kept = []
    for record in records:
        haystack = normalize_text(f"{record.title or ''} {record.text}")
        tokens = tokenize(haystack)
        if include_prepped and not any(
            _match_term(term, toks, haystack, tokens, match_mode)
            for term, toks in include_prepped
        ):
            continue
        if any(
            _match_term(term, toks, haystack, tokens, match_mode)
            for term, toks in exclude_prepped
        ):
            continue
        kept.append(record)
    return kept


# ---------------------------------------------------------------------------
# pipeline
# ---------------------------------------------------------------------------


def apply_stages(
    records: list[Record],
    cfg: PipelineConfig,
    classifier: Optional[Classifier] = None,
    profiles=None,
) -> tuple[list[Record], StageReport]:
    """Run the fixed-order stages over in-memory records."""
    counts = [len(records)]
    enabled = []
    current = records

    if cfg.dedup:
        current, _removed = filter_dedup(current, cfg.dedup)
    enabled.append(cfg.dedup is not None)
    counts.append(len(current))

    if cfg.date:
        current = filter_date(
            current, cfg.date.start, cfg.date.end, cfg.date.missing_timestamp_policy
        )
    enabled.append(cfg.date is not None)
    counts.append(len(current))

    if cfg.language:
        current = langid.filter_language(
            current,
            targets=set(cfg.language.targets),
            unknown_policy=cfg.language.unknown_policy,
            profiles=profiles,
            margin=cfg.language.margin,
        )
    enabled.append(cfg.language is not None)
    counts.append(len(current))

    if cfg.keyword:
        current = filter_keyword(
            current, cfg.keyword.include, cfg.keyword.exclude, cfg.keyword.match
        )
    enabled.append(cfg.keyword is not None)
    counts.append(len(current))

    if cfg.relevancy:
        current = filter_relevancy(
            current,
            context=cfg.relevancy.context,
            classifier=classifier or cfg.relevancy.build(),
            threshold=cfg.relevancy.threshold,
        )
    enabled.append(cfg.relevancy is not None)
    counts.append(len(current))

    report = compute_stage_report(counts, names=list(STAGE_ORDER), enabled=enabled)
    return list(current), report


def run_pipeline(
    store: Store,
    inputs: Sequence[str],
    cfg: PipelineConfig,
    created_by_job: Optional[str] = None,
    name: Optional[str] = None,
    classifier: Optional[Classifier] = None,
) -> tuple[str, StageReport]:
    """Merge the input datasets, apply the stages, persist the output.

    The output dataset is kind=preprocessed with the inputs as parents
    (record ids are namespaced by parent when there are several inputs,
    exactly as a plain merge would).
    """
    if not inputs:
        raise ValidationError("pipeline needs at least one input dataset")
    parents = [store.find_dataset(ref) for ref in inputs]
    from .model import merge_records

    merged = merge_records(
        [(p.dataset_id, store.iter_records(p.dataset_id)) for p in parents]
    )
    kept, report = apply_stages(merged, cfg, classifier=classifier)
    out = store.new_dataset(
        name=name or f"preprocessed:{'+'.join(p.name for p in parents)}",
        kind="preprocessed",
        parent_ids=tuple(p.dataset_id for p in parents),
        created_by_job=created_by_job,
    )
    store.append_records(out.dataset_id, kept)
    return out.dataset_id, report
