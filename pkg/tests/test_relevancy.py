from datetime import datetime, timezone

import pytest
from hypothesis import given
from hypothesis import strategies as st

from kumpul.errors import JobError, ValidationError
from kumpul.model import Record
from kumpul.relevancy import (
    BaselineClassifier,
    RelevancyRequest,
    RemoteClassifier,
    baseline_score,
    classify,
    classify_remote,
    filter_relevancy,
)

from helpers import MockRelevancyServer

NOW = datetime(2022, 9, 10, tzinfo=timezone.utc)
words = st.lists(st.sampled_from("harga bbm naik turun warga pasar subsidi".split()),
                 min_size=0, max_size=10)


def rec(i, text):
    return Record(record_id=f"r{i}", source="unit", source_category="social_media",
                  text=text, collected_at=NOW)


# -- baseline score -------------------------------------------------------------


def test_identical_strings_score_one():
    assert baseline_score("harga bbm naik", "harga bbm naik") == 1.0


def test_disjoint_strings_score_zero():
    assert baseline_score("harga bbm", "resep rendang") == 0.0


def test_hand_computed_jaccard():
    # {harga, bbm, naik} vs {bbm, naik, lagi}: 2 shared of 4 distinct
    assert baseline_score("harga bbm naik", "bbm naik lagi") == 0.5


def test_both_empty_scores_zero():
    assert baseline_score("", "") == 0.0
    assert baseline_score("...", "!!!") == 0.0


@given(words, words)
def test_score_is_symmetric(a, b):
    assert baseline_score(" ".join(a), " ".join(b)) == baseline_score(" ".join(b), " ".join(a))


@given(words)
def test_score_invariant_under_duplication_and_order(tokens):
    text = " ".join(tokens)
    doubled = " ".join(tokens + list(reversed(tokens)))
    context = "harga bbm naik"
    assert baseline_score(context, text) == baseline_score(context, doubled)


# -- classify ---------------------------------------------------------------------


def test_threshold_zero_everything_relevant():
    request = RelevancyRequest("harga bbm", ("resep rendang", "harga bbm"), threshold=0.0)
    verdicts = classify(request, BaselineClassifier())
    assert all(v.relevant for v in verdicts)


def test_threshold_one_needs_exact_token_set():
    request = RelevancyRequest("harga bbm", ("bbm harga BBM!", "harga bbm naik"), threshold=1.0)
    verdicts = classify(request, BaselineClassifier())
    assert [v.relevant for v in verdicts] == [True, False]


def test_half_score_against_thresholds():
    request_low = RelevancyRequest("harga bbm naik", ("bbm naik lagi",), threshold=0.4)
    request_high = RelevancyRequest("harga bbm naik", ("bbm naik lagi",), threshold=0.6)
    assert classify(request_low, BaselineClassifier())[0].relevant is True
    assert classify(request_high, BaselineClassifier())[0].relevant is False


def test_classify_preserves_order_and_length():
    texts = tuple(f"kata{i} harga" for i in range(25))
    request = RelevancyRequest("harga", texts, threshold=0.1)
    verdicts = classify(request, BaselineClassifier())
    assert len(verdicts) == 25
    assert all(v.relevant for v in verdicts)


def test_request_validation():
    with pytest.raises(ValidationError):
        RelevancyRequest("", ("x",))
    with pytest.raises(ValidationError):
        RelevancyRequest("ctx", ())
    with pytest.raises(ValidationError):
        RelevancyRequest("ctx", ("x",), threshold=1.5)


@given(st.lists(words, min_size=1, max_size=15))
def test_raising_threshold_never_grows_kept_set(texts_tokens):
    texts = tuple(" ".join(t) or "kosong" for t in texts_tokens)
    classifier = BaselineClassifier()
    kept_sets = []
    for threshold in (0.0, 0.25, 0.5, 0.75, 1.0):
        request = RelevancyRequest("harga bbm naik", texts, threshold=threshold)
        verdicts = classify(request, classifier)
        kept_sets.append({i for i, v in enumerate(verdicts) if v.relevant})
    for smaller, larger in zip(kept_sets[1:], kept_sets):
        assert smaller <= larger


# -- remote protocol -----------------------------------------------------------------


def test_remote_all_relevant_echo():
    with MockRelevancyServer() as server:
        verdicts = classify_remote(
            server.endpoint, RelevancyRequest("ctx", ("a", "b"), threshold=0.5)
        )
    assert all(v.relevant and v.score == 1.0 for v in verdicts)
    assert verdicts[0].classifier_id == "mock"


def test_remote_wrong_length_is_non_retryable():
    def bad(body):
        return {"classifier_id": "mock", "verdicts": [{"relevant": True, "score": 1.0}]}

    with MockRelevancyServer(bad) as server:
        with pytest.raises(JobError) as err:
            classify_remote(server.endpoint, RelevancyRequest("ctx", ("a", "b")))
    assert err.value.retryable is False


def test_remote_bad_schema_is_non_retryable():
    def bad(body):
        return {"classifier_id": "mock",
                "verdicts": [{"relevant": "yes", "score": 2.0} for _ in body["texts"]]}

    with MockRelevancyServer(bad) as server:
        with pytest.raises(JobError) as err:
            classify_remote(server.endpoint, RelevancyRequest("ctx", ("a",)))
    assert err.value.retryable is False


def test_remote_http_error_is_retryable():
    def boom(body):
        return 503, {"error": "down"}

    with MockRelevancyServer(boom) as server:
        with pytest.raises(JobError) as err:
            classify_remote(server.endpoint, RelevancyRequest("ctx", ("a",)))
    assert err.value.retryable is True


def test_remote_unreachable_is_retryable():
    client = RemoteClassifier("http://127.0.0.1:9", timeout=0.3)
    with pytest.raises(JobError) as err:
        client.classify(RelevancyRequest("ctx", ("a",)))
    assert err.value.retryable is True


def test_remote_batches_of_64_preserve_order():
    def indexed(body):
        # score encodes server-side order so client-side reassembly shows
        return {
            "classifier_id": "mock",
            "verdicts": [
                {"relevant": True, "score": round((int(t) % 997) / 1000, 3)}
                for t in body["texts"]
            ],
        }

    texts = tuple(str(i) for i in range(130))
    with MockRelevancyServer(indexed) as server:
        client = RemoteClassifier(server.endpoint)
        verdicts = client.classify(RelevancyRequest("ctx", texts, threshold=0.0))
        sizes = sorted(len(r["texts"]) for r in server.requests)
    assert sizes == [2, 64, 64]
    assert [v.score for v in verdicts] == [round((i % 997) / 1000, 3) for i in range(130)]


# -- filter ---------------------------------------------------------------------------


def test_filter_empty_input():
    assert filter_relevancy([], "ctx", BaselineClassifier(), 0.1) == []


def test_filter_keeps_only_relevant():
    records = [rec(1, "harga bbm naik"), rec(2, "resep rendang enak")]
    kept = filter_relevancy(records, "harga bbm", BaselineClassifier(), 0.1)
    assert [r.record_id for r in kept] == ["r1"]


def test_filter_threshold_zero_keeps_all():
    records = [rec(1, "apa saja"), rec(2, "resep rendang")]
    kept = filter_relevancy(records, "harga bbm", BaselineClassifier(), 0.0)
    assert len(kept) == 2
