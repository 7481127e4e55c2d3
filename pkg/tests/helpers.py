"""Shared test machinery: independent oracles and a mock relevancy server.

The dedup oracle deliberately reimplements duplicate grouping as plain
O(n^2) pairwise comparison so the production path is checked against an
independent route, not against itself.
"""

from __future__ import annotations

import json
import threading
from datetime import datetime, timezone
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer
from typing import Any, Callable, Optional

from kumpul.model import Record, normalize_text


def brute_force_dedup(records: list[Record]) -> list[str]:
    """Exact-mode duplicate grouping by pairwise comparison; returns kept ids."""
    n = len(records)
    parent = list(range(n))

    def find(x):
        while parent[x] != x:
            x = parent[x]
        return x

    for i in range(n):
        for j in range(i + 1, n):
            a, b = records[i], records[j]
            same_text = normalize_text(a.text) == normalize_text(b.text)
            same_url = a.url is not None and b.url is not None and a.url == b.url
            if same_text or same_url:
                ra, rb = find(i), find(j)
                if ra != rb:
                    parent[rb] = ra

    groups: dict[int, list[int]] = {}
    for i in range(n):
        groups.setdefault(find(i), []).append(i)

    far = datetime.max.replace(tzinfo=timezone.utc)
    kept = []
    for members in groups.values():
        winner = min(
            members,
            key=lambda i: (
                records[i].published_at is None,
                records[i].published_at or far,
                records[i].record_id,
            ),
        )
        kept.append(records[winner].record_id)
    return sorted(kept)


class MockRelevancyServer:
    """Configurable /classify endpoint; records request bodies for assertions."""

    def __init__(self, responder: Optional[Callable[[dict[str, Any]], Any]] = None):
        self.requests: list[dict[str, Any]] = []
        self.responder = responder or self._echo_relevant

        server = self

        class Handler(BaseHTTPRequestHandler):
            def do_POST(self):  # noqa: N802 - stdlib naming
                length = int(self.headers.get("Content-Length", 0))
                body = json.loads(self.rfile.read(length))
                server.requests.append(body)
                result = server.responder(body)
                if isinstance(result, tuple):
                    status, payload = result
                else:
                    status, payload = 200, result
                data = json.dumps(payload).encode("utf-8")
                self.send_response(status)
                self.send_header("Content-Type", "application/json")
                self.send_header("Content-Length", str(len(data)))
                self.end_headers()
                self.wfile.write(data)

            def log_message(self, *args):  # quiet
                pass

        self.httpd = ThreadingHTTPServer(("127.0.0.1", 0), Handler)
        self.thread = threading.Thread(target=self.httpd.serve_forever, daemon=True)

    @staticmethod
    def _echo_relevant(body: dict[str, Any]) -> dict[str, Any]:
        return {
            "classifier_id": "mock",
            "verdicts": [{"relevant": True, "score": 1.0} for _ in body["texts"]],
        }

    @property
    def endpoint(self) -> str:
        return f"http://127.0.0.1:{self.httpd.server_address[1]}"

    def __enter__(self) -> "MockRelevancyServer":
        self.thread.start()
        return self

    def __exit__(self, *exc) -> None:
        self.httpd.shutdown()
        self.httpd.server_close()


def canonical_state(store) -> dict[str, Any]:
    """Store contents with generated ids and wall-clock noise masked out.

    Dataset ids are replaced by dataset names everywhere (including inside
    record ids, payloads, and results), so two runs that made the same
    logical transitions compare equal even though every run mints fresh ids.
    """
    from kumpul.coordinator import Coordinator

    id_to_name = {d.dataset_id: d.name for d in store.list_datasets()}

    def mask(value):
        if isinstance(value, str):
            for did, name in id_to_name.items():
                value = value.replace(did, f"<{name}>")
            return value
        if isinstance(value, dict):
            return {mask(k): mask(v) for k, v in sorted(value.items())}
        if isinstance(value, list):
            return [mask(v) for v in value]
        return value

    datasets = {}
    for d in store.list_datasets():
        records = sorted(
            json.dumps(mask(r.to_dict()), sort_keys=True)
            for r in store.iter_records(d.dataset_id)
        )
        datasets[d.name] = {
            "kind": d.kind,
            "record_count": d.record_count,
            "parents": sorted(id_to_name[p] for p in d.parent_ids),
            "records": records,
        }

    coordinator = Coordinator(store)
    jobs, _total = coordinator.list_jobs(limit=1000)
    job_view = []
    results = []
    for job in jobs:
        job_view.append((job.job_type, job.status, json.dumps(mask(job.payload), sort_keys=True)))
        try:
            body = store.get_result(job.job_id)
        except Exception:
            body = None
        if body is not None:
            body.pop("produced_at", None)
            results.append((job.job_type, json.dumps(mask(body), sort_keys=True)))
    return {"datasets": datasets, "jobs": sorted(job_view), "results": sorted(results)}
