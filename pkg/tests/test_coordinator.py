import sqlite3
import threading
import time
from datetime import timedelta

import pytest

from kumpul.coordinator import Coordinator, Job, WorkerIdentity
from kumpul.errors import ConflictError, JobError, NotFoundError, ValidationError

from conftest import T0


def worker(wid="w1", caps=("collect", "preprocess", "analyze"), lease=60.0):
    return WorkerIdentity(worker_id=wid, capabilities=frozenset(caps), lease_duration=lease)


@pytest.fixture
def coord(store):
    return Coordinator(store)


# -- submission ---------------------------------------------------------------


def test_submit_creates_pending_job(coord):
    job_id = coord.submit_job("preprocess", {"inputs": ["x"]})
    job = coord.get_job(job_id)
    assert job.status == "pending"
    assert job.attempts == 0


def test_two_submissions_two_ids(coord):
    a = coord.submit_job("collect", {})
    b = coord.submit_job("collect", {})
    assert a != b


def test_validator_rejects_at_submit(store):
    def validator(_store, _job_type, payload):
        if "dataset" not in payload:
            raise ValidationError("missing dataset")

    coord = Coordinator(store, validator=validator)
    with pytest.raises(ValidationError):
        coord.submit_job("analyze", {})
    coord.submit_job("analyze", {"dataset": "d"})


def test_unknown_job_type_rejected(coord):
    with pytest.raises(ValidationError):
        coord.submit_job("teleport", {})


def test_idempotency_key_deduplicates(coord):
    a = coord.submit_job("collect", {}, idempotency_key="k1")
    b = coord.submit_job("collect", {}, idempotency_key="k1")
    c = coord.submit_job("collect", {}, idempotency_key="k2")
    assert a == b and a != c


def test_worker_identity_requires_capabilities():
    with pytest.raises(ValidationError):
        WorkerIdentity(worker_id="w", capabilities=frozenset())


# -- claim --------------------------------------------------------------------


def test_claim_empty_queue_returns_none(coord, clock):
    assert coord.claim_next(worker(), clock.now()) is None


def test_claim_sets_running_state(coord, clock):
    job_id = coord.submit_job("collect", {})
    job = coord.claim_next(worker("w1", lease=60), clock.now())
    assert job.job_id == job_id
    assert job.status == "running"
    assert job.worker_id == "w1"
    assert job.attempts == 1
    assert job.lease_expires_at == clock.now() + timedelta(seconds=60)


def test_claim_respects_capabilities(coord, clock):
    coord.submit_job("analyze", {})
    assert coord.claim_next(worker(caps=("collect",)), clock.now()) is None
    assert coord.claim_next(worker(caps=("analyze",)), clock.now()) is not None


def test_claim_is_fifo_in_submission_order(coord, clock):
    ids = [coord.submit_job("collect", {"n": i}) for i in range(3)]
    claimed = []
    w = worker()
    for _ in range(3):
        job = coord.claim_next(w, clock.now())
        claimed.append(job.job_id)
        coord.complete_job(job.job_id, w.worker_id, "done")
    assert claimed == ids


def test_concurrent_claims_have_single_winner_per_trial(coord, clock):
    trials = 1000
    w1, w2 = worker("w1"), worker("w2")
    for _ in range(trials):
        coord.submit_job("collect", {})
        grants = []
        barrier = threading.Barrier(2)

        def run(w):
            barrier.wait()
            job = coord.claim_next(w, clock.now())
            if job is not None:
                grants.append(job)

        threads = [threading.Thread(target=run, args=(w,)) for w in (w1, w2)]
        for t in threads:
            t.start()
        for t in threads:
            t.join()
        assert len(grants) == 1
        coord.complete_job(grants[0].job_id, grants[0].worker_id, "ok")


# -- renew / complete / fail -----------------------------------------------------


def test_renew_extends_lease(coord, clock):
    coord.submit_job("collect", {})
    job = coord.claim_next(worker("w1", lease=60), clock.now())
    clock.advance(10)
    new_expiry = coord.renew_lease(job.job_id, "w1", clock.now(), 60)
    assert new_expiry > job.lease_expires_at


def test_renew_by_non_owner_fails(coord, clock):
    coord.submit_job("collect", {})
    job = coord.claim_next(worker("w1"), clock.now())
    with pytest.raises(ConflictError):
        coord.renew_lease(job.job_id, "w2", clock.now())


def test_renew_after_expiry_reassignment_fails(coord, clock):
    coord.submit_job("collect", {})
    job = coord.claim_next(worker("w1", lease=30), clock.now())
    clock.advance(31)
    assert coord.expire_leases(clock.now()) == 1
    reclaimed = coord.claim_next(worker("w2", lease=30), clock.now())
    assert reclaimed.job_id == job.job_id
    with pytest.raises(ConflictError):
        coord.renew_lease(job.job_id, "w1", clock.now())


def test_complete_records_result(coord, clock):
    coord.submit_job("collect", {})
    job = coord.claim_next(worker("w1"), clock.now())
    coord.complete_job(job.job_id, "w1", "ds-1")
    done = coord.get_job(job.job_id)
    assert done.status == "completed"
    assert done.result_ref == "ds-1"
    assert done.worker_id is None and done.lease_expires_at is None


def test_complete_twice_fails(coord, clock):
    coord.submit_job("collect", {})
    job = coord.claim_next(worker("w1"), clock.now())
    coord.complete_job(job.job_id, "w1", "ds-1")
    with pytest.raises(ConflictError):
        coord.complete_job(job.job_id, "w1", "ds-2")


def test_stale_owner_completion_discarded(coord, clock):
    coord.submit_job("collect", {})
    job = coord.claim_next(worker("w1", lease=10), clock.now())
    clock.advance(11)
    coord.expire_leases(clock.now())
    reclaimed = coord.claim_next(worker("w2", lease=60), clock.now())
    with pytest.raises(ConflictError):
        coord.complete_job(job.job_id, "w1", "stale-result")
    coord.complete_job(job.job_id, "w2", "fresh-result")
    assert coord.get_job(job.job_id).result_ref == "fresh-result"


def test_fail_retryable_below_max_returns_to_pending(coord, clock):
    coord.submit_job("collect", {}, max_attempts=3)
    job = coord.claim_next(worker("w1"), clock.now())
    assert coord.fail_job(job.job_id, "w1", "boom", retryable=True) == "pending"
    assert coord.get_job(job.job_id).status == "pending"


def test_fail_retryable_at_max_attempts_fails(coord, clock):
    coord.submit_job("collect", {}, max_attempts=3)
    w = worker("w1")
    for _ in range(2):
        job = coord.claim_next(w, clock.now())
        coord.fail_job(job.job_id, "w1", "boom", retryable=True)
    job = coord.claim_next(w, clock.now())
    assert job.attempts == 3
    assert coord.fail_job(job.job_id, "w1", "boom", retryable=True) == "failed"
    final = coord.get_job(job.job_id)
    assert final.status == "failed" and final.error == "boom"


def test_fail_non_retryable_is_final(coord, clock):
    coord.submit_job("collect", {})
    job = coord.claim_next(worker("w1"), clock.now())
    assert coord.fail_job(job.job_id, "w1", "bad input", retryable=False) == "failed"


def test_fail_by_non_owner_rejected(coord, clock):
    coord.submit_job("collect", {})
    job = coord.claim_next(worker("w1"), clock.now())
    with pytest.raises(ConflictError):
        coord.fail_job(job.job_id, "w2", "boom", retryable=True)


# -- expiry -------------------------------------------------------------------------


def test_expire_nothing_returns_zero(coord, clock):
    assert coord.expire_leases(clock.now()) == 0


def test_expire_returns_job_to_pending(coord, clock):
    coord.submit_job("collect", {}, max_attempts=3)
    coord.claim_next(worker("w1", lease=30), clock.now())
    clock.advance(31)
    assert coord.expire_leases(clock.now()) == 1
    job = coord.list_jobs()[0][0]
    assert job.status == "pending"
    assert job.worker_id is None


def test_expire_at_max_attempts_fails_job(coord, clock):
    coord.submit_job("collect", {}, max_attempts=1)
    job = coord.claim_next(worker("w1", lease=30), clock.now())
    clock.advance(31)
    assert coord.expire_leases(clock.now()) == 0
    final = coord.get_job(job.job_id)
    assert final.status == "failed"
    assert final.error == "lease expired"


# -- cancel -----------------------------------------------------------------------


def test_cancel_pending(coord):
    job_id = coord.submit_job("collect", {})
    coord.cancel_job(job_id)
    assert coord.get_job(job_id).status == "cancelled"


def test_cancel_running_conflicts(coord, clock):
    job_id = coord.submit_job("collect", {})
    coord.claim_next(worker(), clock.now())
    with pytest.raises(ConflictError):
        coord.cancel_job(job_id)


def test_cancel_unknown_not_found(coord):
    with pytest.raises(NotFoundError):
        coord.cancel_job("job-ghost")


# -- worker loop ---------------------------------------------------------------------


def run_loop_until(coord, store, n_workers, executor, predicate, timeout=20.0,
                   lease=30.0, poll=0.002):
    shutdown = threading.Event()
    threads = []
    for i in range(n_workers):
        w = worker(f"loop-{i}", lease=lease)
        t = threading.Thread(
            target=coord.run_worker_loop,
            kwargs={"worker": w, "executor": executor, "poll_interval": poll,
                    "shutdown": shutdown},
            daemon=True,
        )
        t.start()
        threads.append(t)
    deadline = time.monotonic() + timeout
    ok = False
    while time.monotonic() < deadline:
        if predicate():
            ok = True
            break
        time.sleep(0.01)
    shutdown.set()
    for t in threads:
        t.join(timeout=5)
    return ok


def test_single_worker_completes_jobs_in_order(coord, store):
    ids = [coord.submit_job("collect", {"n": i}) for i in range(3)]
    log = []

    def executor(job):
        log.append(job.job_id)
        return "ok"

    def all_done():
        jobs, _ = coord.list_jobs(status="completed")
        return len(jobs) == 3

    assert run_loop_until(coord, store, 1, executor, all_done)
    assert log == ids


def test_executor_exception_retries_then_succeeds(coord, store):
    job_id = coord.submit_job("collect", {}, max_attempts=3)
    attempts = []

    def executor(job):
        attempts.append(job.attempts)
        if len(attempts) < 2:
            raise RuntimeError("transient")
        return "ok"

    assert run_loop_until(
        coord, store, 1, executor,
        lambda: coord.get_job(job_id).status == "completed",
    )
    assert attempts == [1, 2]


def test_non_retryable_job_error_fails_immediately(coord, store):
    job_id = coord.submit_job("collect", {}, max_attempts=3)

    def executor(job):
        raise JobError("schema violation", retryable=False)

    assert run_loop_until(
        coord, store, 1, executor,
        lambda: coord.get_job(job_id).status == "failed",
    )
    assert coord.get_job(job_id).attempts == 1


def test_killed_worker_job_is_reclaimed_and_completed(coord, store, clock):
    job_id = coord.submit_job("collect", {}, max_attempts=3)
    # the doomed worker claims with a clock far in the past: its lease is
    # already expired from the live workers' point of view
    dead = worker("dead", lease=5)
    claimed = coord.claim_next(dead, T0 - timedelta(hours=1))
    assert claimed.job_id == job_id

    log = []

    def executor(job):
        log.append(job.job_id)
        return "ok"

    assert run_loop_until(
        coord, store, 2, executor,
        lambda: coord.get_job(job_id).status == "completed",
    )
    assert log == [job_id]
    assert coord.get_job(job_id).attempts == 2


def test_liveness_all_pending_jobs_reach_terminal_state(coord, store):
    ids = [coord.submit_job("collect", {"n": i}) for i in range(20)]

    def executor(job):
        return "ok"

    def all_terminal():
        return all(coord.get_job(i).status == "completed" for i in ids)

    assert run_loop_until(coord, store, 3, executor, all_terminal)


# -- exhaustive small-scope model check -----------------------------------------------


ALLOWED = {
    ("pending", "running"),
    ("running", "completed"),
    ("running", "failed"),
    ("running", "pending"),
    ("pending", "cancelled"),
}


def snapshot(store):
    conn = sqlite3.connect(store.path)
    conn.row_factory = sqlite3.Row
    rows = conn.execute("SELECT * FROM jobs ORDER BY job_id").fetchall()
    conn.close()
    return tuple(tuple(r) for r in rows)


def restore(store, snap, columns):
    conn = sqlite3.connect(store.path)
    conn.execute("DELETE FROM jobs")
    marks = ",".join("?" for _ in columns)
    conn.executemany(f"INSERT INTO jobs ({','.join(columns)}) VALUES ({marks})", snap)
    conn.commit()
    conn.close()


def job_states(store):
    conn = sqlite3.connect(store.path)
    conn.row_factory = sqlite3.Row
    rows = conn.execute(
        "SELECT job_id, status, attempts, max_attempts, worker_id,"
        " lease_expires_at, result_ref, error FROM jobs ORDER BY job_id"
    ).fetchall()
    conn.close()
    return [dict(r) for r in rows]


def check_invariants(states):
    for s in states:
        running = s["status"] == "running"
        assert (s["worker_id"] is not None) == running, s
        assert (s["lease_expires_at"] is not None) == running, s
        assert s["attempts"] <= s["max_attempts"], s
        if s["status"] == "completed":
            assert s["result_ref"] is not None, s
        if s["status"] == "failed":
            assert s["error"] is not None, s


def test_model_check_small_scope(store, clock):
    coord = Coordinator(store)
    for _ in range(2):
        coord.submit_job("collect", {}, max_attempts=2)

    conn = sqlite3.connect(store.path)
    columns = [r[1] for r in conn.execute("PRAGMA table_info(jobs)")]
    conn.close()

    far_future = T0 + timedelta(days=365)
    workers = [worker("w1", lease=30), worker("w2", lease=30)]

    def actions(states):
        acts = []
        for w in workers:
            acts.append(("claim", w.worker_id))
            for s in states:
                if s["status"] == "running" and s["worker_id"] == w.worker_id:
                    acts.append(("complete", w.worker_id, s["job_id"]))
                    acts.append(("fail_retry", w.worker_id, s["job_id"]))
                    acts.append(("fail_final", w.worker_id, s["job_id"]))
                    acts.append(("renew", w.worker_id, s["job_id"]))
        for s in states:
            if s["status"] == "pending":
                acts.append(("cancel", s["job_id"]))
        if any(s["status"] == "running" for s in states):
            acts.append(("expire",))
        return acts

    def apply(action):
        kind = action[0]
        try:
            if kind == "claim":
                coord.claim_next(next(w for w in workers if w.worker_id == action[1]), T0)
            elif kind == "complete":
                coord.complete_job(action[2], action[1], "r")
            elif kind == "fail_retry":
                coord.fail_job(action[2], action[1], "e", retryable=True)
            elif kind == "fail_final":
                coord.fail_job(action[2], action[1], "e", retryable=False)
            elif kind == "renew":
                coord.renew_lease(action[2], action[1], T0)
            elif kind == "cancel":
                coord.cancel_job(action[1])
            elif kind == "expire":
                coord.expire_leases(far_future)
        except (ConflictError, NotFoundError):
            pass  # rejected transitions are part of the model

    def semantic(states):
        # volatile columns (updated_at, lease timestamps) are not part of
        # the state space; what matters is who owns what in which status
        return tuple(
            (s["job_id"], s["status"], s["attempts"], s["worker_id"],
             s["lease_expires_at"] is not None, s["result_ref"], s["error"])
            for s in states
        )

    initial = snapshot(store)
    seen = {semantic(job_states(store))}
    frontier = [(initial, 0)]
    explored_edges = 0
    while frontier:
        snap, depth = frontier.pop()
        if depth >= 6:
            continue
        restore(store, snap, columns)
        before = {s["job_id"]: s["status"] for s in job_states(store)}
        for action in actions(job_states(store)):
            restore(store, snap, columns)
            apply(action)
            states = job_states(store)
            check_invariants(states)
            for s in states:
                old, new = before[s["job_id"]], s["status"]
                if old != new:
                    assert (old, new) in ALLOWED, (old, new, action)
            explored_edges += 1
            key = semantic(states)
            if key not in seen:
                seen.add(key)
                frontier.append((snapshot(store), depth + 1))
    assert explored_edges > 50  # the exploration actually went somewhere
