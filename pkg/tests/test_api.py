import json

import pytest
from fastapi.testclient import TestClient

from kumpul.api import ApiConfig, create_app
from kumpul.coordinator import Coordinator, SystemClock, WorkerIdentity
from kumpul.executors import make_executor, validate_payload

FIXTURES = "src/kumpul/data/fixtures"


@pytest.fixture
def client(store):
    app = create_app(store, ApiConfig())
    with TestClient(app) as c:
        c.kumpul_store = store
        yield c


def drain_queue(store):
    """Execute every pending job inline (the tests' stand-in for a worker)."""
    coordinator = Coordinator(store, validator=validate_payload)
    worker = WorkerIdentity(worker_id="test-worker")
    executor = make_executor(store)
    while coordinator.run_one(worker, executor, SystemClock()):
        pass


def collect_payload():
    mapping = json.loads(open(f"{FIXTURES}/walkthrough_mapping.json").read())
    return {
        "connector_kind": "file",
        "source_name": "raw-bbm",
        "source_category": "social_media",
        "params": {
            "path": f"{FIXTURES}/walkthrough_posts.jsonl",
            "format": "jsonl",
            "mapping": json.dumps(mapping),
        },
    }


def test_health(client):
    response = client.get("/v1/health")
    assert response.status_code == 200
    assert response.json() == {"status": "ok"}


def test_sources_catalog(client):
    response = client.get("/v1/sources")
    kinds = {s["kind"] for s in response.json()["sources"]}
    assert {"file", "http_feed", "synthetic"} <= kinds


def test_analyzer_catalog(client):
    assert set(client.get("/v1/analyzers").json()["analyzers"]) >= {
        "sentiment", "trend", "network", "terms"}


def test_submit_job_round_trip(client):
    response = client.post(
        "/v1/jobs",
        json={"job_type": "collect",
              "payload": {"connector_kind": "synthetic", "source_name": "syn",
                          "source_category": "social_media",
                          "params": {"total": "5", "seed": "1"}}},
    )
    assert response.status_code == 201
    job_id = response.json()["job_id"]
    shown = client.get(f"/v1/jobs/{job_id}")
    assert shown.status_code == 200
    assert shown.json()["status"] == "pending"


def test_submit_preprocess_with_unknown_dataset_is_400(client):
    response = client.post(
        "/v1/jobs",
        json={"job_type": "preprocess", "payload": {"inputs": ["ghost"], "config": {}}},
    )
    assert response.status_code == 400
    body = response.json()
    assert "fields" in body and "inputs" in body["fields"]


def test_malformed_body_is_400_with_fields(client):
    response = client.post("/v1/jobs", json={"payload": {}})
    assert response.status_code == 400
    assert "fields" in response.json()


def test_unknown_dataset_404(client):
    response = client.get("/v1/datasets/ghost")
    assert response.status_code == 404
    assert "error" in response.json()


def test_unknown_job_404(client):
    assert client.get("/v1/jobs/ghost").status_code == 404


def test_cancel_pending_then_conflict_on_completed(client):
    pending = client.post(
        "/v1/jobs",
        json={"job_type": "collect",
              "payload": {"connector_kind": "synthetic", "source_name": "syn",
                          "source_category": "social_media",
                          "params": {"total": "3", "seed": "1"}}},
    ).json()["job_id"]
    cancelled = client.post(f"/v1/jobs/{pending}/cancel")
    assert cancelled.status_code == 200
    assert client.get(f"/v1/jobs/{pending}").json()["status"] == "cancelled"

    done = client.post(
        "/v1/jobs",
        json={"job_type": "collect",
              "payload": {"connector_kind": "synthetic", "source_name": "syn2",
                          "source_category": "social_media",
                          "params": {"total": "3", "seed": "1"}}},
    ).json()["job_id"]
    drain_queue(client.kumpul_store)
    response = client.post(f"/v1/jobs/{done}/cancel")
    assert response.status_code == 409


def test_idempotency_key_deduplicates(client):
    body = {"job_type": "collect",
            "payload": {"connector_kind": "synthetic", "source_name": "syn",
                        "source_category": "social_media",
                        "params": {"total": "3", "seed": "1"}}}
    first = client.post("/v1/jobs", json=body, headers={"Idempotency-Key": "k1"})
    second = client.post("/v1/jobs", json=body, headers={"Idempotency-Key": "k1"})
    assert first.json()["job_id"] == second.json()["job_id"]


def test_jobs_list_filters_and_total_count(client):
    for seed in range(3):
        client.post(
            "/v1/jobs",
            json={"job_type": "collect",
                  "payload": {"connector_kind": "synthetic", "source_name": f"s{seed}",
                              "source_category": "social_media",
                              "params": {"total": "2", "seed": str(seed)}}},
        )
    response = client.get("/v1/jobs", params={"status": "pending", "limit": 2})
    assert response.headers["X-Total-Count"] == "3"
    assert len(response.json()["jobs"]) == 2
    response = client.get("/v1/jobs", params={"status": "pending", "limit": 2, "page": 1})
    assert len(response.json()["jobs"]) == 1
    assert client.get("/v1/jobs", params={"type": "teleport"}).status_code == 400


def test_result_is_404_until_completed(client):
    job_id = client.post(
        "/v1/jobs",
        json={"job_type": "collect",
              "payload": {"connector_kind": "synthetic", "source_name": "syn",
                          "source_category": "social_media",
                          "params": {"total": "4", "seed": "2"}}},
    ).json()["job_id"]
    assert client.get(f"/v1/jobs/{job_id}/result").status_code == 404
    drain_queue(client.kumpul_store)
    result = client.get(f"/v1/jobs/{job_id}/result")
    assert result.status_code == 200
    assert result.json()["count"] == 4


def test_records_pagination(client):
    client.post(
        "/v1/jobs",
        json={"job_type": "collect",
              "payload": {"connector_kind": "synthetic", "source_name": "syn",
                          "source_category": "social_media",
                          "params": {"total": "7", "seed": "3"}}},
    )
    drain_queue(client.kumpul_store)
    dataset = client.get("/v1/datasets").json()["datasets"][0]
    collected = []
    for offset in range(0, 7, 2):
        page = client.get(
            f"/v1/datasets/{dataset['dataset_id']}/records",
            params={"offset": offset, "limit": 2},
        )
        assert page.headers["X-Total-Count"] == "7"
        collected += page.json()["records"]
    assert [r["record_id"] for r in collected] == [
        r["record_id"] for r in client.get(
            f"/v1/datasets/{dataset['dataset_id']}/records", params={"limit": 100}
        ).json()["records"]
    ]


def test_auth_token_enforced(store):
    app = create_app(store, ApiConfig(auth_token="secret"))
    with TestClient(app) as client:
        assert client.get("/v1/health").status_code == 200  # health stays open
        assert client.get("/v1/jobs").status_code == 401
        ok = client.get("/v1/jobs", headers={"Authorization": "Bearer secret"})
        assert ok.status_code == 200
        bad = client.get("/v1/jobs", headers={"Authorization": "Bearer wrong"})
        assert bad.status_code == 401


def test_full_walkthrough_over_api(client):
    store = client.kumpul_store
    # step 2: collect
    collect = client.post("/v1/jobs", json={"job_type": "collect", "payload": collect_payload()})
    assert collect.status_code == 201
    drain_queue(store)
    collect_result = client.get(f"/v1/jobs/{collect.json()['job_id']}/result")
    assert collect_result.status_code == 200
    raw_id = collect_result.json()["dataset_id"]

    # step 3: preprocess with the fuel-price study config
    config = json.loads(open(f"{FIXTURES}/walkthrough_pipeline.json").read())
    preprocess = client.post(
        "/v1/jobs",
        json={"job_type": "preprocess", "payload": {"inputs": [raw_id], "config": config}},
    )
    assert preprocess.status_code == 201
    drain_queue(store)
    report = client.get(f"/v1/jobs/{preprocess.json()['job_id']}/result").json()
    assert report["totals"]["raw_count"] == 13
    assert report["totals"]["final_count"] == 8
    clean_id = report["dataset_id"]

    # step 4: analyze
    analyze = client.post(
        "/v1/jobs",
        json={"job_type": "analyze",
              "payload": {"dataset_id": clean_id, "analyzer": "sentiment"}},
    )
    assert analyze.status_code == 201
    drain_queue(store)
    result = client.get(f"/v1/jobs/{analyze.json()['job_id']}/result").json()
    assert result["analyzer_id"] == "sentiment"
    assert result["summary"]["records"] == 8

    lineage = client.get(f"/v1/datasets/{clean_id}/lineage").json()
    assert lineage["parents"][0]["dataset_id"] == raw_id


def test_static_ui_served_when_configured(store, tmp_path):
    (tmp_path / "index.html").write_text("<html><body>kumpul ui</body></html>")
    app = create_app(store, ApiConfig(static_path=str(tmp_path)))
    with TestClient(app) as client:
        response = client.get("/")
        assert response.status_code == 200
        assert "kumpul ui" in response.text
        assert client.get("/v1/health").status_code == 200
