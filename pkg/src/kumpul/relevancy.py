"""Context-conditioned relevancy classification behind a pluggable interface.

Ships a transparent lexical baseline (token-set Jaccard against the research
context) plus an HTTP client for remote model servers speaking the
sentence-pair wire protocol, so a fine-tuned classifier can slot in without
touching the pipeline. Both sides return the same verdict shape and are
interchangeable.

Remote protocol (bit-exact JSON):
  request  {"context": str, "texts": [str], "threshold": number}
  response {"classifier_id": str, "verdicts": [{"relevant": bool, "score": number}]}
Servers wrapping a sentence-pair model should assemble each model input as
the context and candidate text joined as one pair (context first).
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Optional, Protocol

import requests

from .errors import JobError, ValidationError
from .model import tokenize

DEFAULT_THRESHOLD = 0.1
MAX_BATCH = 64
REQUEST_TIMEOUT_SECS = 30
MAX_IN_FLIGHT = 4


@dataclass(frozen=True)
class RelevancyRequest:
    context: str
    texts: tuple[str, ...]
    threshold: float = DEFAULT_THRESHOLD

    def __post_init__(self) -> None:
        if not self.context:
            raise ValidationError("relevancy context must be non-empty")
        if not self.texts:
            raise ValidationError("relevancy request needs at least one text")
        if not 0.0 <= self.threshold <= 1.0:
            raise ValidationError("threshold must be in [0, 1]")


@dataclass(frozen=True)
class RelevancyVerdict:
    relevant: bool
    score: float
    classifier_id: str


def baseline_score(context: str, text: str) -> float:
    """Jaccard similarity of the two token sets; both-empty scores 0."""
    a, b = set(tokenize(context)), set(tokenize(text))
    union = a | b
    if not union:
        return 0.0
    return len(a & b) / len(union)


class Classifier(Protocol):
    classifier_id: str

    def classify(self, request: RelevancyRequest) -> list[RelevancyVerdict]: ...


class BaselineClassifier:
    """Deterministic lexical stand-in for a fine-tuned relevancy model."""

    classifier_id = "baseline-jaccard"

    def classify(self, request: RelevancyRequest) -> list[RelevancyVerdict]:
        verdicts = []
        for text in request.texts:
            score = baseline_score(request.context, text)
            verdicts.append(
                RelevancyVerdict(
                    relevant=score >= request.threshold,
                    score=score,
                    classifier_id=self.classifier_id,
                )
            )
        return verdicts


class RemoteClassifier:
    """Client for a model server; batches of <= MAX_BATCH, order preserved.

    Transport failures are retryable job errors; schema violations are not
    (a malformed server will not heal on retry).
    """

    def __init__(
        self,
        endpoint: str,
        timeout: float = REQUEST_TIMEOUT_SECS,
        batch_size: int = MAX_BATCH,
        max_in_flight: int = MAX_IN_FLIGHT,
        session: Optional[requests.Session] = None,
    ):
        self.endpoint = endpoint.rstrip("/")
        self.timeout = timeout
        self.batch_size = min(batch_size, MAX_BATCH)
        self.max_in_flight = max(1, max_in_flight)
        self.session = session or requests.Session()
        self.classifier_id = f"remote:{self.endpoint}"

    def classify(self, request: RelevancyRequest) -> list[RelevancyVerdict]:
        batches = [
            request.texts[i : i + self.batch_size]
            for i in range(0, len(request.texts), self.batch_size)
        ]
        if len(batches) == 1:
            results = [self._classify_batch(batches[0], request)]
        else:
            with ThreadPoolExecutor(max_workers=self.max_in_flight) as pool:
                results = list(
                    pool.map(lambda b: self._classify_batch(b, request), batches)
                )
        return [verdict for batch in results for verdict in batch]

    def _classify_batch(
        self, texts: tuple[str, ...], request: RelevancyRequest
    ) -> list[RelevancyVerdict]:
        body = {
            "context": request.context,
            "texts": list(texts),
            "threshold": request.threshold,
        }
        try:
            response = self.session.post(
                f"{self.endpoint}/classify", json=body, timeout=self.timeout
            )
        except requests.RequestException as exc:
            raise JobError(f"relevancy endpoint unreachable: {exc}", retryable=True)
        if response.status_code != 200:
            raise JobError(
                f"relevancy endpoint returned HTTP {response.status_code}", retryable=True
            )
        try:
            payload = response.json()
        except ValueError:
            raise JobError("relevancy endpoint returned non-JSON body", retryable=False)
        return _parse_remote_payload(payload, expected=len(texts))


def _parse_remote_payload(payload, expected: int) -> list[RelevancyVerdict]:
    if not isinstance(payload, dict):
        raise JobError("relevancy response must be a JSON object", retryable=False)
    classifier_id = payload.get("classifier_id")
    verdicts = payload.get("verdicts")
    if not isinstance(classifier_id, str) or not isinstance(verdicts, list):
        raise JobError("relevancy response missing classifier_id/verdicts", retryable=False)
    if len(verdicts) != expected:
        raise JobError(
            f"relevancy response has {len(verdicts)} verdicts, expected {expected}",
            retryable=False,
        )
    parsed = []
    for item in verdicts:
        if (
            not isinstance(item, dict)
            or not isinstance(item.get("relevant"), bool)
            or not isinstance(item.get("score"), (int, float))
            or isinstance(item.get("score"), bool)
            or not 0.0 <= float(item["score"]) <= 1.0
        ):
            raise JobError("relevancy verdict failed schema validation", retryable=False)
        parsed.append(
            RelevancyVerdict(
                relevant=item["relevant"],
                score=float(item["score"]),
                classifier_id=classifier_id,
            )
        )
    return parsed


def classify(request: RelevancyRequest, classifier: Classifier) -> list[RelevancyVerdict]:
    """Order-preserving verdicts, one per request text."""
    verdicts = classifier.classify(request)
    if len(verdicts) != len(request.texts):
        raise JobError("classifier returned wrong verdict count", retryable=False)
    return verdicts


def classify_remote(endpoint: str, request: RelevancyRequest) -> list[RelevancyVerdict]:
    return classify(request, RemoteClassifier(endpoint))


def filter_relevancy(records, context: str, classifier: Classifier, threshold: float):
    """Keep records judged relevant to the research context."""
    records = list(records)
    if not records:
        return []
    request = RelevancyRequest(
        context=context, texts=tuple(r.text for r in records), threshold=threshold
    )
    verdicts = classify(request, classifier)
    return [record for record, verdict in zip(records, verdicts) if verdict.relevant]
