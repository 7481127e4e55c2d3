"""SQLite-backed unified data store for datasets, records, jobs, and results.

Single file on disk, safe for concurrent worker threads and processes:
WAL journaling, short IMMEDIATE transactions for writes, and a fresh
connection per operation so handles can be shared freely. Record order is
insertion order, which makes stage reports deterministic.
"""

from __future__ import annotations

import json
import sqlite3
import uuid
from contextlib import contextmanager
from datetime import datetime, timezone
from pathlib import Path
from typing import Any, Iterator, Optional

from .errors import ConflictError, NotFoundError, ValidationError
from .model import (
    Dataset,
    Record,
    format_timestamp,
    merge_records,
    parse_timestamp,
    validate_dataset,
    validate_record,
)

_SCHEMA = """
CREATE TABLE IF NOT EXISTS datasets (
    dataset_id     TEXT PRIMARY KEY,
    name           TEXT NOT NULL,
    kind           TEXT NOT NULL,
    parent_ids     TEXT NOT NULL,
    created_by_job TEXT,
    record_count   INTEGER NOT NULL DEFAULT 0,
    created_at     TEXT NOT NULL
);
CREATE TABLE IF NOT EXISTS records (
    dataset_id TEXT NOT NULL,
    seq        INTEGER NOT NULL,
    record_id  TEXT NOT NULL,
    body       TEXT NOT NULL,
    PRIMARY KEY (dataset_id, seq)
);
CREATE UNIQUE INDEX IF NOT EXISTS records_by_id ON records (dataset_id, record_id);
CREATE TABLE IF NOT EXISTS jobs (
    job_id           TEXT PRIMARY KEY,
    job_type         TEXT NOT NULL,
    payload          TEXT NOT NULL,
    status           TEXT NOT NULL,
    attempts         INTEGER NOT NULL DEFAULT 0,
    max_attempts     INTEGER NOT NULL,
    worker_id        TEXT,
    lease_expires_at TEXT,
    result_ref       TEXT,
    error            TEXT,
    created_at       TEXT NOT NULL,
    updated_at       TEXT NOT NULL,
    idempotency_key  TEXT UNIQUE
);
CREATE INDEX IF NOT EXISTS jobs_by_status ON jobs (status, created_at);
CREATE TABLE IF NOT EXISTS results (
    job_id      TEXT PRIMARY KEY,
    body        TEXT NOT NULL,
    produced_at TEXT NOT NULL
);
"""


def _utc_now() -> str:
    return datetime.now(timezone.utc).strftime("%Y-%m-%dT%H:%M:%S.%fZ")


def new_id(prefix: str) -> str:
    return f"{prefix}-{uuid.uuid4().hex[:12]}"


class Store:
    """Handle on one store file; cheap to construct and share across threads."""

    def __init__(self, path: str | Path, mode: str = "read_write"):
        if mode not in ("read_write", "read_only"):
            raise ValidationError(f"unknown store mode {mode!r}")
        self.path = str(path)
        self.mode = mode
        if mode == "read_write":
            conn = self._connect()
            try:
                conn.executescript(_SCHEMA)  # manages its own transaction
            finally:
                conn.close()

    # -- connection plumbing --------------------------------------------

    def _connect(self) -> sqlite3.Connection:
        if self.mode == "read_only":
            conn = sqlite3.connect(f"file:{self.path}?mode=ro", uri=True, timeout=30)
        else:
            conn = sqlite3.connect(self.path, timeout=30)
        conn.row_factory = sqlite3.Row
        conn.execute("PRAGMA journal_mode=WAL")
        conn.execute("PRAGMA synchronous=NORMAL")
        conn.execute("PRAGMA busy_timeout=30000")
        return conn

    @contextmanager
    def _read(self) -> Iterator[sqlite3.Connection]:
        conn = self._connect()
        try:
            yield conn
        finally:
            conn.close()

    @contextmanager
    def _write(self) -> Iterator[sqlite3.Connection]:
        """One IMMEDIATE transaction: the write lock is held from the start,
        so read-then-update sequences inside are atomic against other writers."""
        if self.mode == "read_only":
            raise ConflictError("store opened read-only")
        conn = self._connect()
        try:
            conn.isolation_level = None
            conn.execute("BEGIN IMMEDIATE")
            yield conn
            conn.execute("COMMIT")
        except BaseException:
            try:
                conn.execute("ROLLBACK")
            except sqlite3.Error:
                pass
            raise
        finally:
            conn.close()

    # -- datasets ---------------------------------------------------------

    def create_dataset(self, meta: Dataset) -> str:
        problems = validate_dataset(meta)
        if problems:
            raise ValidationError(
                "invalid dataset", {v.code: v.message for v in problems}
            )
        with self._write() as conn:
            for parent in meta.parent_ids:
                row = conn.execute(
                    "SELECT 1 FROM datasets WHERE dataset_id=?", (parent,)
                ).fetchone()
                if row is None:
                    raise NotFoundError(f"unknown parent dataset {parent!r}")
            try:
                conn.execute(
                    "INSERT INTO datasets (dataset_id, name, kind, parent_ids,"
                    " created_by_job, record_count, created_at)"
                    " VALUES (?, ?, ?, ?, ?, 0, ?)",
                    (
                        meta.dataset_id,
                        meta.name,
                        meta.kind,
                        json.dumps(list(meta.parent_ids)),
                        meta.created_by_job,
                        format_timestamp(meta.created_at),
                    ),
                )
            except sqlite3.IntegrityError as exc:
                raise ConflictError(f"dataset id {meta.dataset_id!r} already exists") from exc
        return meta.dataset_id

    def new_dataset(
        self,
        name: str,
        kind: str = "raw",
        parent_ids: tuple[str, ...] = (),
        created_by_job: Optional[str] = None,
    ) -> Dataset:
        meta = Dataset(
            dataset_id=new_id("ds"),
            name=name,
            kind=kind,
            parent_ids=tuple(parent_ids),
            created_by_job=created_by_job,
            created_at=datetime.now(timezone.utc),
        )
        self.create_dataset(meta)
        return meta

    def get_dataset(self, dataset_id: str) -> Dataset:
        with self._read() as conn:
            row = conn.execute(
                "SELECT * FROM datasets WHERE dataset_id=?", (dataset_id,)
            ).fetchone()
        if row is None:
            raise NotFoundError(f"unknown dataset {dataset_id!r}")
        return _dataset_from_row(row)

    def find_dataset(self, ref: str) -> Dataset:
        """Resolve a dataset by id, falling back to a unique name match."""
        try:
            return self.get_dataset(ref)
        except NotFoundError:
            pass
        with self._read() as conn:
            rows = conn.execute("SELECT * FROM datasets WHERE name=?", (ref,)).fetchall()
        if not rows:
            raise NotFoundError(f"unknown dataset {ref!r}")
        if len(rows) > 1:
            raise ValidationError(f"dataset name {ref!r} is ambiguous", {"ref": ref})
        return _dataset_from_row(rows[0])

    def list_datasets(self) -> list[Dataset]:
        with self._read() as conn:
            rows = conn.execute("SELECT * FROM datasets ORDER BY created_at, rowid").fetchall()
        return [_dataset_from_row(r) for r in rows]

    # -- records ----------------------------------------------------------

    def append_records(self, dataset_id: str, records: list[Record]) -> int:
        """Append atomically; on any failure the dataset is left untouched."""
        with self._write() as conn:
            row = conn.execute(
                "SELECT record_count FROM datasets WHERE dataset_id=?", (dataset_id,)
            ).fetchone()
            if row is None:
                raise NotFoundError(f"unknown dataset {dataset_id!r}")
            seq = int(row["record_count"])
            for record in records:
                problems = [v for v in validate_record(record) if v.code != "empty_text"]
                if problems:
                    raise ValidationError(
                        f"invalid record {record.record_id!r}",
                        {v.code: v.message for v in problems},
                    )
                try:
                    conn.execute(
                        "INSERT INTO records (dataset_id, seq, record_id, body)"
                        " VALUES (?, ?, ?, ?)",
                        (dataset_id, seq, record.record_id, record.to_json()),
                    )
                except sqlite3.IntegrityError as exc:
                    raise ConflictError(
                        f"duplicate record_id {record.record_id!r} in dataset {dataset_id!r}"
                    ) from exc
                seq += 1
            conn.execute(
                "UPDATE datasets SET record_count=? WHERE dataset_id=?", (seq, dataset_id)
            )
            return seq

    def read_records(
        self, dataset_id: str, offset: int = 0, limit: Optional[int] = None
    ) -> list[Record]:
        if offset < 0 or (limit is not None and limit < 0):
            raise ValidationError("offset and limit must be >= 0")
        self.get_dataset(dataset_id)
        sql = "SELECT body FROM records WHERE dataset_id=? ORDER BY seq LIMIT ? OFFSET ?"
        with self._read() as conn:
            rows = conn.execute(
                sql, (dataset_id, -1 if limit is None else limit, offset)
            ).fetchall()
        return [Record.from_dict(json.loads(r["body"])) for r in rows]

    def iter_records(self, dataset_id: str, page_size: int = 1000) -> Iterator[Record]:
        offset = 0
        while True:
            page = self.read_records(dataset_id, offset=offset, limit=page_size)
            if not page:
                return
            yield from page
            offset += len(page)

    # -- lineage ----------------------------------------------------------

    def get_lineage(self, dataset_id: str) -> dict[str, Any]:
        """Ancestry tree: each node carries the job id that produced it."""

        def build(node_id: str, seen: frozenset[str]) -> dict[str, Any]:
            if node_id in seen:
                raise ConflictError(f"lineage cycle at dataset {node_id!r}")
            meta = self.get_dataset(node_id)
            return {
                "dataset_id": meta.dataset_id,
                "name": meta.name,
                "kind": meta.kind,
                "created_by_job": meta.created_by_job,
                "parents": [
                    build(parent, seen | {node_id}) for parent in meta.parent_ids
                ],
            }

        return build(dataset_id, frozenset())

    def merge_datasets(
        self,
        parent_refs: list[str],
        name: Optional[str] = None,
        created_by_job: Optional[str] = None,
    ) -> Dataset:
        """Concatenate parents into a new dataset (no deduplication).

        >=2 parents produce kind=merged with namespaced record ids; a single
        parent produces a lineage-preserving copy (kind=preprocessed, the
        only kind that admits exactly one parent).
        """
        if not parent_refs:
            raise ValidationError("merge needs at least one parent dataset")
        parents = [self.find_dataset(ref) for ref in parent_refs]
        kind = "merged" if len(parents) >= 2 else "preprocessed"
        meta = self.new_dataset(
            name=name or "+".join(p.name for p in parents),
            kind=kind,
            parent_ids=tuple(p.dataset_id for p in parents),
            created_by_job=created_by_job,
        )
        merged = merge_records(
            [(p.dataset_id, self.iter_records(p.dataset_id)) for p in parents]
        )
        self.append_records(meta.dataset_id, merged)
        return self.get_dataset(meta.dataset_id)

    # -- job rows (the coordinator owns the semantics) ---------------------

    def insert_job(
        self,
        job_id: str,
        job_type: str,
        payload: dict[str, Any],
        max_attempts: int,
        idempotency_key: Optional[str] = None,
    ) -> str:
        now = _utc_now()
        with self._write() as conn:
            if idempotency_key is not None:
                row = conn.execute(
                    "SELECT job_id FROM jobs WHERE idempotency_key=?", (idempotency_key,)
                ).fetchone()
                if row is not None:
                    return str(row["job_id"])
            conn.execute(
                "INSERT INTO jobs (job_id, job_type, payload, status, attempts,"
                " max_attempts, created_at, updated_at, idempotency_key)"
                " VALUES (?, ?, ?, 'pending', 0, ?, ?, ?, ?)",
                (job_id, job_type, json.dumps(payload), max_attempts, now, now, idempotency_key),
            )
        return job_id

    def get_job_row(self, job_id: str) -> dict[str, Any]:
        with self._read() as conn:
            row = conn.execute("SELECT * FROM jobs WHERE job_id=?", (job_id,)).fetchone()
        if row is None:
            raise NotFoundError(f"unknown job {job_id!r}")
        return dict(row)

    def list_job_rows(
        self,
        status: Optional[str] = None,
        job_type: Optional[str] = None,
        offset: int = 0,
        limit: int = 100,
    ) -> tuple[list[dict[str, Any]], int]:
        clauses, args = [], []
        if status:
            clauses.append("status=?")
            args.append(status)
        if job_type:
            clauses.append("job_type=?")
            args.append(job_type)
        where = f" WHERE {' AND '.join(clauses)}" if clauses else ""
        with self._read() as conn:
            total = conn.execute(f"SELECT COUNT(*) AS n FROM jobs{where}", args).fetchone()["n"]
            rows = conn.execute(
                f"SELECT * FROM jobs{where} ORDER BY created_at, rowid LIMIT ? OFFSET ?",
                (*args, limit, offset),
            ).fetchall()
        return [dict(r) for r in rows], int(total)

    def claim_pending_job(
        self, capabilities: tuple[str, ...], worker_id: str, now_iso: str, lease_iso: str
    ) -> Optional[dict[str, Any]]:
        """Atomically move the oldest matching pending job to running."""
        marks = ",".join("?" for _ in capabilities)
        with self._write() as conn:
            row = conn.execute(
                f"SELECT job_id FROM jobs WHERE status='pending' AND job_type IN ({marks})"
                " ORDER BY created_at, rowid LIMIT 1",
                capabilities,
            ).fetchone()
            if row is None:
                return None
            job_id = row["job_id"]
            conn.execute(
                "UPDATE jobs SET status='running', worker_id=?, lease_expires_at=?,"
                " attempts=attempts+1, updated_at=? WHERE job_id=?",
                (worker_id, lease_iso, now_iso, job_id),
            )
            claimed = conn.execute("SELECT * FROM jobs WHERE job_id=?", (job_id,)).fetchone()
            return dict(claimed)

    def update_job_if(
        self, job_id: str, expect: dict[str, Any], updates: dict[str, Any]
    ) -> bool:
        """Conditional update; returns False when the expectation no longer holds."""
        set_sql = ", ".join(f"{k}=?" for k in updates)
        cond_sql = " AND ".join(
            f"{k} IS ?" if v is None else f"{k}=?" for k, v in expect.items()
        )
        with self._write() as conn:
            cur = conn.execute(
                f"UPDATE jobs SET {set_sql}, updated_at=? WHERE job_id=? AND {cond_sql}",
                (*updates.values(), _utc_now(), job_id, *expect.values()),
            )
            return cur.rowcount == 1

    def sweep_expired_leases(self, now_iso: str) -> int:
        """Expired running jobs: back to pending, or failed at max attempts."""
        with self._write() as conn:
            cur = conn.execute(
                "UPDATE jobs SET status='pending', worker_id=NULL, lease_expires_at=NULL,"
                " updated_at=? WHERE status='running' AND lease_expires_at < ?"
                " AND attempts < max_attempts",
                (_utc_now(), now_iso),
            )
            reclaimed = cur.rowcount
            conn.execute(
                "UPDATE jobs SET status='failed', error='lease expired', worker_id=NULL,"
                " lease_expires_at=NULL, updated_at=? WHERE status='running'"
                " AND lease_expires_at < ? AND attempts >= max_attempts",
                (_utc_now(), now_iso),
            )
            return reclaimed

    # -- results ------------------------------------------------------------

    def put_result(self, job_id: str, body: dict[str, Any]) -> None:
        with self._write() as conn:
            conn.execute(
                "INSERT OR REPLACE INTO results (job_id, body, produced_at) VALUES (?, ?, ?)",
                (job_id, json.dumps(body, ensure_ascii=False), _utc_now()),
            )

    def get_result(self, job_id: str) -> dict[str, Any]:
        with self._read() as conn:
            row = conn.execute("SELECT body FROM results WHERE job_id=?", (job_id,)).fetchone()
        if row is None:
            raise NotFoundError(f"no result for job {job_id!r}")
        return json.loads(row["body"])


def _dataset_from_row(row: sqlite3.Row) -> Dataset:
    return Dataset(
        dataset_id=row["dataset_id"],
        name=row["name"],
        kind=row["kind"],
        parent_ids=tuple(json.loads(row["parent_ids"])),
        created_by_job=row["created_by_job"],
        record_count=int(row["record_count"]),
        created_at=parse_timestamp(row["created_at"]),
    )
