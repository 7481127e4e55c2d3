"""Command-line front end: the full workflow without a browser.

Commands submit through the same coordinator the API uses, then (by
default) run an embedded worker loop until the submitted job is terminal,
so scripted steps behave synchronously. `kumpul serve` hosts the HTTP API
plus a worker pool; `kumpul worker` runs a standalone worker against a
shared store.

Exit codes: 0 ok, 1 validation, 2 not found, 3 job failed, 4 wait timeout.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import threading
import time
from pathlib import Path
from typing import Any, Optional

from .analysis import analyzer_catalog
from .api import ApiConfig, create_app
from .coordinator import JOB_TYPES, Coordinator, SystemClock, WorkerIdentity
from .errors import KumpulError, NotFoundError, ValidationError
from .executors import make_executor, validate_payload
from .model import export_csv, export_jsonl
from .store import Store

EXIT_OK = 0
EXIT_VALIDATION = 1
EXIT_NOT_FOUND = 2
EXIT_JOB_FAILED = 3
EXIT_TIMEOUT = 4

DEFAULT_WAIT_SECS = 300.0


def _load_config_file(path: Optional[str]) -> dict[str, Any]:
    if not path:
        return {}
    text = Path(path).read_text(encoding="utf-8")
    if path.endswith(".toml"):
        import tomllib

        return tomllib.loads(text)
    return json.loads(text)


def _store_path(args: argparse.Namespace, file_cfg: dict[str, Any]) -> str:
    return (
        args.store
        or os.environ.get("KUMPUL_STORE")
        or file_cfg.get("store")
        or "./kumpul.db"
    )


def _emit(args: argparse.Namespace, payload: dict[str, Any], human: str) -> None:
    if args.json:
        print(json.dumps(payload, ensure_ascii=False))
    else:
        print(human)


def _submit_and_wait(
    args: argparse.Namespace,
    store: Store,
    job_type: str,
    payload: dict[str, Any],
):
    """Submit; unless --no-wait, drive an inline worker until terminal."""
    coordinator = Coordinator(store, validator=validate_payload)
    job_id = coordinator.submit_job(job_type, payload)
    if args.no_wait:
        return job_id, None
    worker = WorkerIdentity(worker_id=f"cli-{os.getpid()}")
    executor = make_executor(store)
    clock = SystemClock()
    deadline = time.monotonic() + args.wait_secs
    while time.monotonic() < deadline:
        job = coordinator.get_job(job_id)
        if job.status in ("completed", "failed", "cancelled"):
            return job_id, job
        if not coordinator.run_one(worker, executor, clock):
            time.sleep(0.05)
    return job_id, None


def _finish(args, job_id: str, job) -> int:
    """Shared terminal-state handling for submit-and-wait commands."""
    if job is None:
        if args.no_wait:
            _emit(args, {"job_id": job_id, "status": "pending"}, f"submitted {job_id}")
            return EXIT_OK
        print(f"timed out waiting for job {job_id}", file=sys.stderr)
        return EXIT_TIMEOUT
    if job.status != "completed":
        print(f"job {job_id} {job.status}: {job.error}", file=sys.stderr)
        return EXIT_JOB_FAILED
    return EXIT_OK


# ---------------------------------------------------------------------------
# commands
# ---------------------------------------------------------------------------


def cmd_collect(args, store: Store) -> int:
    params: dict[str, str] = {}
    if args.path:
        params["path"] = args.path
    if args.url:
        params["url"] = args.url
    if args.format:
        params["format"] = args.format
    if args.map:
        params["mapping"] = Path(args.map).read_text(encoding="utf-8")
    for pair in args.param or ():
        key, _, value = pair.partition("=")
        params[key] = value
    payload: dict[str, Any] = {
        "connector_kind": args.kind,
        "source_name": args.name,
        "source_category": args.category,
        "params": params,
    }
    if args.keywords:
        payload["keywords"] = [k.strip() for k in args.keywords.split(",") if k.strip()]
    job_id, job = _submit_and_wait(args, store, "collect", payload)
    code = _finish(args, job_id, job)
    if code == EXIT_OK and job is not None:
        result = store.get_result(job_id)
        _emit(
            args,
            {"job_id": job_id, **result},
            f"dataset {result['dataset_id']} records {result['count']}"
            f" skipped {result['skipped']}",
        )
    return code


STAGE_DISPLAY = {
    "dedup": "After deduplication",
    "date": "After date filtering",
    "language": "After language detection",
    "keyword": "After keyword filtering",
    "relevancy": "After relevancy classification",
}


def _pct_cell(removed: int, pct: float) -> str:
    # the minus sign is display-layer only; zero rows carry no sign
    return f"-{pct}%" if removed else f"{pct}%"


def format_stage_table(report: dict[str, Any]) -> str:
    """Render a stage report dict as the familiar aligned reduction table."""
    totals = report["totals"]
    rows = [("Stage", "Records", "Removed", "Reduction")]
    rows.append(("Raw collected data", f"{totals['raw_count']:,}", "", ""))
    for stage in report["stages"]:
        name = STAGE_DISPLAY.get(stage["name"], stage["name"])
        if not stage.get("enabled", True):
            name += " (off)"
        rows.append(
            (
                name,
                f"{stage['output_count']:,}",
                f"{stage['removed']:,}",
                _pct_cell(stage["removed"], stage["reduction_pct"]),
            )
        )
    rows.append(
        (
            "Total",
            f"{totals['final_count']:,}",
            f"{totals['total_removed']:,}",
            _pct_cell(totals["total_removed"], totals["total_reduction_pct"]),
        )
    )
    widths = [max(len(r[i]) for r in rows) for i in range(4)]
    lines = []
    for row in rows:
        lines.append(
            f"{row[0]:<{widths[0]}}  {row[1]:>{widths[1]}}  "
            f"{row[2]:>{widths[2]}}  {row[3]:>{widths[3]}}".rstrip()
        )
    return "\n".join(lines)


def cmd_preprocess(args, store: Store) -> int:
    config = json.loads(Path(args.config).read_text(encoding="utf-8"))
    inputs = [ref.strip() for ref in args.inputs.split(",") if ref.strip()]
    payload: dict[str, Any] = {"inputs": inputs, "config": config}
    if args.name:
        payload["name"] = args.name
    job_id, job = _submit_and_wait(args, store, "preprocess", payload)
    code = _finish(args, job_id, job)
    if code == EXIT_OK and job is not None:
        result = store.get_result(job_id)
        _emit(
            args,
            {"job_id": job_id, **result},
            f"dataset {result['dataset_id']}\n" + format_stage_table(result),
        )
    return code


def cmd_analyze(args, store: Store) -> int:
    params = json.loads(Path(args.params).read_text(encoding="utf-8")) if args.params else {}
    payload = {
        "dataset_id": args.dataset,
        "analyzer": args.analyzer,
        "text_column": args.text_column,
        "params": params,
    }
    job_id, job = _submit_and_wait(args, store, "analyze", payload)
    code = _finish(args, job_id, job)
    if code == EXIT_OK and job is not None:
        result = store.get_result(job_id)
        human = "\n".join(f"{k}: {v}" for k, v in result["summary"].items())
        _emit(args, {"job_id": job_id, **result}, human)
    return code


def cmd_jobs(args, store: Store) -> int:
    coordinator = Coordinator(store)
    if args.jobs_command == "list":
        jobs, total = coordinator.list_jobs(
            status=args.status, job_type=args.type, limit=args.limit
        )
        if args.json:
            print(json.dumps({"jobs": [j.to_dict() for j in jobs], "total": total}))
        else:
            for job in jobs:
                print(f"{job.job_id}  {job.job_type:<10}  {job.status:<9}  "
                      f"attempts={job.attempts}  {job.created_at:%Y-%m-%dT%H:%M:%SZ}")
            print(f"total {total}")
        return EXIT_OK
    if args.jobs_command == "show":
        job = coordinator.get_job(args.job_id)
        print(json.dumps(job.to_dict(), indent=None if args.json else 2))
        return EXIT_OK
    if args.jobs_command == "cancel":
        coordinator.cancel_job(args.job_id)
        _emit(args, {"job_id": args.job_id, "status": "cancelled"}, f"cancelled {args.job_id}")
        return EXIT_OK
    raise ValidationError("jobs needs a subcommand: list | show | cancel")


def cmd_export(args, store: Store) -> int:
    dataset = store.find_dataset(args.dataset)
    records = store.iter_records(dataset.dataset_id)
    with open(args.out, "w", encoding="utf-8") as fh:
        if args.format == "jsonl":
            count = export_jsonl(records, fh)
        else:
            count = export_csv(records, fh)
    _emit(
        args,
        {"dataset_id": dataset.dataset_id, "records": count, "path": args.out},
        f"exported {count} records to {args.out}",
    )
    return EXIT_OK


def _start_workers(store: Store, n: int, shutdown: threading.Event) -> list[threading.Thread]:
    coordinator = Coordinator(store, validator=validate_payload)
    executor = make_executor(store)
    lease = Coordinator.default_lease_duration()
    threads = []
    for i in range(n):
        worker = WorkerIdentity(worker_id=f"worker-{os.getpid()}-{i}", lease_duration=lease)
        thread = threading.Thread(
            target=coordinator.run_worker_loop,
            kwargs={"worker": worker, "executor": executor, "shutdown": shutdown},
            name=worker.worker_id,
            daemon=True,
        )
        thread.start()
        threads.append(thread)
    return threads


def cmd_serve(args, store: Store, file_cfg: dict[str, Any]) -> int:
    import uvicorn

    port = args.port or int(os.environ.get("KUMPUL_PORT", 0)) or file_cfg.get("port") or 8080
    static = args.static or file_cfg.get("static_path")
    if static is None and Path("webui/dist").is_dir():
        static = "webui/dist"
    config = ApiConfig(
        host=args.host,
        port=int(port),
        static_path=static,
        auth_token=args.auth_token or os.environ.get("KUMPUL_AUTH_TOKEN") or file_cfg.get("auth_token"),
    )
    shutdown = threading.Event()
    workers = _start_workers(store, args.workers, shutdown)
    print(f"kumpul API on http://{config.host}:{config.port} with {len(workers)} workers")
    try:
        uvicorn.run(create_app(store, config), host=config.host, port=config.port)
    finally:
        shutdown.set()
        for thread in workers:
            thread.join(timeout=5)
    return EXIT_OK


def cmd_worker(args, store: Store) -> int:
    capabilities = frozenset(
        c.strip() for c in args.capabilities.split(",") if c.strip()
    ) or frozenset(JOB_TYPES)
    coordinator = Coordinator(store, validator=validate_payload)
    worker = WorkerIdentity(
        worker_id=f"worker-{os.getpid()}",
        capabilities=capabilities,
        lease_duration=Coordinator.default_lease_duration(),
    )
    print(f"worker {worker.worker_id} polling for {sorted(capabilities)}")
    try:
        coordinator.run_worker_loop(worker, make_executor(store))
    except KeyboardInterrupt:
        pass
    return EXIT_OK


# ---------------------------------------------------------------------------
# parser
# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="kumpul", description="multi-source text research platform"
    )
    parser.add_argument("--store", help="store file path (env KUMPUL_STORE)")
    parser.add_argument("--config-file", help="JSON or TOML config file")
    parser.add_argument("--json", action="store_true", help="machine-readable output")
    parser.add_argument("--wait-secs", type=float, default=DEFAULT_WAIT_SECS)
    parser.add_argument("--no-wait", action="store_true", help="submit without waiting")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("serve", help="start the HTTP API plus a worker pool")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int)
    p.add_argument("--workers", type=int, default=4)
    p.add_argument("--static", help="static asset directory for the web UI")
    p.add_argument("--auth-token")

    p = sub.add_parser("worker", help="standalone worker against the shared store")
    p.add_argument("--capabilities", default=",".join(JOB_TYPES))

    p = sub.add_parser("collect", help="run a collection job")
    p.add_argument("--kind", required=True, help="file | http_feed | synthetic")
    p.add_argument("--name", required=True, help="dataset / source name")
    p.add_argument("--category", default="social_media",
                   help="social_media | news | ecommerce_review | academic")
    p.add_argument("--path", help="input file (file kind)")
    p.add_argument("--url", help="feed url (http_feed kind)")
    p.add_argument("--format", help="jsonl | csv (file kind)")
    p.add_argument("--map", help="FieldMapping JSON file")
    p.add_argument("--keywords", help="comma-separated collection keywords")
    p.add_argument("--param", action="append", metavar="KEY=VALUE",
                   help="extra connector params (repeatable)")

    p = sub.add_parser("preprocess", help="run the filter pipeline")
    p.add_argument("--inputs", required=True, help="comma-separated dataset refs")
    p.add_argument("--config", required=True, help="PipelineConfig JSON file")
    p.add_argument("--name", help="output dataset name")

    p = sub.add_parser("analyze", help="run an analyzer")
    p.add_argument("--dataset", required=True)
    p.add_argument("--analyzer", required=True, help=" | ".join(analyzer_catalog()))
    p.add_argument("--text-column", default="text")
    p.add_argument("--params", help="analyzer params JSON file")

    p = sub.add_parser("jobs", help="inspect the job queue")
    jobs_sub = p.add_subparsers(dest="jobs_command", required=True)
    pl = jobs_sub.add_parser("list")
    pl.add_argument("--status")
    pl.add_argument("--type")
    pl.add_argument("--limit", type=int, default=50)
    ps = jobs_sub.add_parser("show")
    ps.add_argument("job_id")
    pc = jobs_sub.add_parser("cancel")
    pc.add_argument("job_id")

    p = sub.add_parser("export", help="export a dataset")
    p.add_argument("--dataset", required=True)
    p.add_argument("--format", choices=("jsonl", "csv"), default="jsonl")
    p.add_argument("--out", required=True)

    return parser


def main(argv: Optional[list[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        file_cfg = _load_config_file(args.config_file)
        store = Store(_store_path(args, file_cfg))
        if args.command == "serve":
            return cmd_serve(args, store, file_cfg)
        if args.command == "worker":
            return cmd_worker(args, store)
        if args.command == "collect":
            return cmd_collect(args, store)
        if args.command == "preprocess":
            return cmd_preprocess(args, store)
        if args.command == "analyze":
            return cmd_analyze(args, store)
        if args.command == "jobs":
            return cmd_jobs(args, store)
        if args.command == "export":
            return cmd_export(args, store)
        raise ValidationError(f"unknown command {args.command!r}")
    except NotFoundError as exc:
        print(f"not found: {exc}", file=sys.stderr)
        return EXIT_NOT_FOUND
    except (ValidationError, json.JSONDecodeError, OSError) as exc:
        print(f"invalid: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except KumpulError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION


if __name__ == "__main__":
    sys.exit(main())
