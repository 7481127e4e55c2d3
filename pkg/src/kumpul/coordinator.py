"""Database-driven job queue: polling workers, leases, at-most-once completion.

Jobs move pending -> running -> {completed, failed}, with running -> pending
on lease expiry or a retryable failure, and pending -> cancelled. The claim
is an atomic conditional update in the store, so any number of worker
threads or processes can poll the same queue; a job is handed to at most
one claimant per attempt, and terminal transitions check ownership so a
stale worker can never record a result.
"""

from __future__ import annotations

import json
import os
import threading
import time
from dataclasses import dataclass, field
from datetime import datetime, timedelta, timezone
from typing import Any, Callable, Optional

from .errors import ConflictError, JobError, KumpulError, NotFoundError, ValidationError
from .store import Store, new_id

JOB_TYPES = ("collect", "preprocess", "analyze")
JOB_STATUSES = ("pending", "running", "completed", "failed", "cancelled")

DEFAULT_LEASE_SECS = 60.0
DEFAULT_POLL_MS = 500
DEFAULT_MAX_ATTEMPTS = 3


def _env_float(name: str, default: float) -> float:
    raw = os.environ.get(name)
    return float(raw) if raw else default


def _job_ts(dt: datetime) -> str:
    """Fixed-width UTC timestamp; lexicographic order == chronological order."""
    return dt.astimezone(timezone.utc).strftime("%Y-%m-%dT%H:%M:%S.%fZ")


def _parse_job_ts(raw: Optional[str]) -> Optional[datetime]:
    if raw is None:
        return None
    return datetime.strptime(raw, "%Y-%m-%dT%H:%M:%S.%fZ").replace(tzinfo=timezone.utc)


class Clock:
    """Injection point so lease expiry is testable with a controlled clock."""

    def now(self) -> datetime:
        raise NotImplementedError

    def sleep(self, seconds: float) -> None:
        raise NotImplementedError


class SystemClock(Clock):
    def now(self) -> datetime:
        return datetime.now(timezone.utc)

    def sleep(self, seconds: float) -> None:
        time.sleep(seconds)


@dataclass(frozen=True)
class WorkerIdentity:
    worker_id: str
    capabilities: frozenset[str] = frozenset(JOB_TYPES)
    lease_duration: float = DEFAULT_LEASE_SECS

    def __post_init__(self) -> None:
        if not self.capabilities:
            raise ValidationError("worker capabilities must be non-empty")
        unknown = set(self.capabilities) - set(JOB_TYPES)
        if unknown:
            raise ValidationError(f"unknown capabilities: {sorted(unknown)}")


@dataclass(frozen=True)
class Job:
    job_id: str
    job_type: str
    payload: dict[str, Any]
    status: str
    attempts: int
    max_attempts: int
    worker_id: Optional[str]
    lease_expires_at: Optional[datetime]
    result_ref: Optional[str]
    error: Optional[str]
    created_at: datetime
    updated_at: datetime

    @classmethod
    def from_row(cls, row: dict[str, Any]) -> "Job":
        return cls(
            job_id=row["job_id"],
            job_type=row["job_type"],
            payload=json.loads(row["payload"]),
            status=row["status"],
            attempts=int(row["attempts"]),
            max_attempts=int(row["max_attempts"]),
            worker_id=row["worker_id"],
            lease_expires_at=_parse_job_ts(row["lease_expires_at"]),
            result_ref=row["result_ref"],
            error=row["error"],
            created_at=_parse_job_ts(row["created_at"]),  # type: ignore[arg-type]
            updated_at=_parse_job_ts(row["updated_at"]),  # type: ignore[arg-type]
        )

    def to_dict(self) -> dict[str, Any]:
        return {
            "job_id": self.job_id,
            "job_type": self.job_type,
            "payload": self.payload,
            "status": self.status,
            "attempts": self.attempts,
            "max_attempts": self.max_attempts,
            "worker_id": self.worker_id,
            "lease_expires_at": (
                _job_ts(self.lease_expires_at) if self.lease_expires_at else None
            ),
            "result_ref": self.result_ref,
            "error": self.error,
            "created_at": _job_ts(self.created_at),
            "updated_at": _job_ts(self.updated_at),
        }


# Validator signature: (store, job_type, payload) -> None, raising ValidationError.
PayloadValidator = Callable[[Store, str, dict[str, Any]], None]


class Coordinator:
    """Queue operations over one store; share one instance per process."""

    def __init__(
        self,
        store: Store,
        validator: Optional[PayloadValidator] = None,
        max_attempts: Optional[int] = None,
        poll_interval: Optional[float] = None,
    ):
        self.store = store
        self.validator = validator
        self.max_attempts = (
            max_attempts
            if max_attempts is not None
            else int(_env_float("KUMPUL_MAX_ATTEMPTS", DEFAULT_MAX_ATTEMPTS))
        )
        self.poll_interval = (
            poll_interval
            if poll_interval is not None
            else _env_float("KUMPUL_POLL_MS", DEFAULT_POLL_MS) / 1000.0
        )

    @staticmethod
    def default_lease_duration() -> float:
        return _env_float("KUMPUL_LEASE_SECS", DEFAULT_LEASE_SECS)

    # -- submission ---------------------------------------------------------

    def submit_job(
        self,
        job_type: str,
        payload: dict[str, Any],
        max_attempts: Optional[int] = None,
        idempotency_key: Optional[str] = None,
    ) -> str:
        if job_type not in JOB_TYPES:
            raise ValidationError(
                f"unknown job_type {job_type!r}", {"job_type": f"must be one of {JOB_TYPES}"}
            )
        if not isinstance(payload, dict):
            raise ValidationError("payload must be an object", {"payload": "expected object"})
        if self.validator is not None:
            self.validator(self.store, job_type, payload)
        return self.store.insert_job(
            job_id=new_id("job"),
            job_type=job_type,
            payload=payload,
            max_attempts=max_attempts or self.max_attempts,
            idempotency_key=idempotency_key,
        )

    # -- worker-side transitions ---------------------------------------------

    def claim_next(self, worker: WorkerIdentity, now: datetime) -> Optional[Job]:
        row = self.store.claim_pending_job(
            capabilities=tuple(sorted(worker.capabilities)),
            worker_id=worker.worker_id,
            now_iso=_job_ts(now),
            lease_iso=_job_ts(now + timedelta(seconds=worker.lease_duration)),
        )
        return Job.from_row(row) if row else None

    def renew_lease(
        self,
        job_id: str,
        worker_id: str,
        now: datetime,
        lease_duration: Optional[float] = None,
    ) -> datetime:
        duration = lease_duration if lease_duration is not None else self.default_lease_duration()
        expires = now + timedelta(seconds=duration)
        ok = self.store.update_job_if(
            job_id,
            expect={"status": "running", "worker_id": worker_id},
            updates={"lease_expires_at": _job_ts(expires)},
        )
        if not ok:
            self._raise_not_owner(job_id, worker_id, "renew")
        return expires

    def complete_job(self, job_id: str, worker_id: str, result_ref: str) -> None:
        ok = self.store.update_job_if(
            job_id,
            expect={"status": "running", "worker_id": worker_id},
            updates={
                "status": "completed",
                "result_ref": result_ref,
                "worker_id": None,
                "lease_expires_at": None,
            },
        )
        if not ok:
            self._raise_not_owner(job_id, worker_id, "complete")

    def fail_job(self, job_id: str, worker_id: str, error: str, retryable: bool) -> str:
        job = self.get_job(job_id)
        if job.status != "running" or job.worker_id != worker_id:
            self._raise_not_owner(job_id, worker_id, "fail")
        if retryable and job.attempts < job.max_attempts:
            target = {
                "status": "pending",
                "worker_id": None,
                "lease_expires_at": None,
                "error": error,
            }
            new_status = "pending"
        else:
            target = {
                "status": "failed",
                "worker_id": None,
                "lease_expires_at": None,
                "error": error,
            }
            new_status = "failed"
        # Pinning attempts guards the read-decide-update window: if anything
        # moved the job meanwhile, the conditional update misses and we re-check.
        ok = self.store.update_job_if(
            job_id,
            expect={"status": "running", "worker_id": worker_id, "attempts": job.attempts},
            updates=target,
        )
        if not ok:
            self._raise_not_owner(job_id, worker_id, "fail")
        return new_status

    def cancel_job(self, job_id: str) -> None:
        ok = self.store.update_job_if(
            job_id, expect={"status": "pending"}, updates={"status": "cancelled"}
        )
        if not ok:
            job = self.get_job(job_id)  # raises NotFoundError for unknown ids
            raise ConflictError(f"job {job_id!r} is {job.status}, only pending jobs cancel")

    def expire_leases(self, now: datetime) -> int:
        return self.store.sweep_expired_leases(_job_ts(now))

    # -- queries --------------------------------------------------------------

    def get_job(self, job_id: str) -> Job:
        return Job.from_row(self.store.get_job_row(job_id))

    def list_jobs(
        self,
        status: Optional[str] = None,
        job_type: Optional[str] = None,
        offset: int = 0,
        limit: int = 100,
    ) -> tuple[list[Job], int]:
        rows, total = self.store.list_job_rows(status, job_type, offset, limit)
        return [Job.from_row(r) for r in rows], total

    # -- worker runtime ---------------------------------------------------------

    def run_worker_loop(
        self,
        worker: WorkerIdentity,
        executor: Callable[[Job], str],
        poll_interval: Optional[float] = None,
        clock: Optional[Clock] = None,
        shutdown: Optional[threading.Event] = None,
        sweep: bool = True,
    ) -> None:
        """Poll-claim-execute until ``shutdown`` is set; finishes the in-flight job.

        The executor maps a claimed job to a result_ref; exceptions become
        fail_job (JobError carries its own retryable flag, anything else is
        retryable). The lease is heartbeat-renewed at a third of its duration
        while the executor runs; losing the lease abandons the result.
        """
        clock = clock or SystemClock()
        shutdown = shutdown or threading.Event()
        poll = self.poll_interval if poll_interval is None else poll_interval
        while not shutdown.is_set():
            now = clock.now()
            if sweep:
                self.expire_leases(now)
            job = self.claim_next(worker, now)
            if job is None:
                clock.sleep(poll)
                continue
            self._run_claimed(job, worker, executor, clock)

    def run_one(
        self,
        worker: WorkerIdentity,
        executor: Callable[[Job], str],
        clock: Optional[Clock] = None,
    ) -> bool:
        """Claim and execute at most one job; True when a job was processed."""
        clock = clock or SystemClock()
        now = clock.now()
        self.expire_leases(now)
        job = self.claim_next(worker, now)
        if job is None:
            return False
        self._run_claimed(job, worker, executor, clock)
        return True

    def _run_claimed(
        self,
        job: Job,
        worker: WorkerIdentity,
        executor: Callable[[Job], str],
        clock: Clock,
    ) -> None:
        done = threading.Event()
        outcome: dict[str, Any] = {}

        def call() -> None:
            try:
                outcome["result_ref"] = executor(job)
            except BaseException as exc:  # noqa: BLE001 - converted to fail_job
                outcome["error"] = exc
            finally:
                done.set()

        thread = threading.Thread(target=call, name=f"exec-{job.job_id}", daemon=True)
        thread.start()

        abandoned = False
        heartbeat = max(worker.lease_duration / 3.0, 0.02)
        while not done.wait(heartbeat):
            try:
                self.renew_lease(
                    job.job_id, worker.worker_id, clock.now(), worker.lease_duration
                )
            except KumpulError:
                abandoned = True  # lease lost; result must be discarded
                break
        done.wait()
        thread.join()
        if abandoned:
            return
        try:
            if "error" in outcome:
                exc = outcome["error"]
                retryable = exc.retryable if isinstance(exc, JobError) else True
                self.fail_job(job.job_id, worker.worker_id, str(exc) or repr(exc), retryable)
            else:
                self.complete_job(job.job_id, worker.worker_id, outcome["result_ref"])
        except KumpulError:
            pass  # lost ownership between execution and recording; discard

    def _raise_not_owner(self, job_id: str, worker_id: str, action: str) -> None:
        try:
            job = self.get_job(job_id)
        except NotFoundError:
            raise
        raise ConflictError(
            f"cannot {action} job {job_id!r}: status={job.status},"
            f" owner={job.worker_id!r}, caller={worker_id!r}"
        )
