"""Job payload validation and execution dispatch.

Both submission gates (API and CLI) validate through the same function a
worker later uses to execute, so a payload that submits cleanly can always
be dispatched. Executors write fresh dataset ids on every attempt, which is
what makes the coordinator's at-least-once execution safe.
"""

from __future__ import annotations

from typing import Any

from .analysis import AnalysisRequest, run_analysis
from .collection import ConnectorSpec, run_collection, validate_spec
from .coordinator import Job
from .errors import NotFoundError, ValidationError
from .preprocessing import PipelineConfig, run_pipeline
from .store import Store


def validate_payload(store: Store, job_type: str, payload: dict[str, Any]) -> None:
    """Reject malformed payloads and unknown references at submit time."""
    if job_type == "collect":
        validate_spec(ConnectorSpec.from_dict(payload))
    elif job_type == "preprocess":
        inputs = payload.get("inputs")
        if not inputs or not isinstance(inputs, list):
            raise ValidationError(
                "preprocess payload needs a non-empty inputs list",
                {"inputs": "non-empty list of dataset refs"},
            )
        for ref in inputs:
            try:
                store.find_dataset(str(ref))
            except NotFoundError:
                raise ValidationError(
                    f"unknown input dataset {ref!r}", {"inputs": f"unknown dataset {ref!r}"}
                )
        PipelineConfig.from_dict(payload.get("config") or {})
    elif job_type == "analyze":
        request = AnalysisRequest.from_dict(payload)
        from .analysis import analyzer_registered

        if not analyzer_registered(request.analyzer):
            raise ValidationError(
                f"unknown analyzer {request.analyzer!r}", {"analyzer": "not registered"}
            )
        try:
            store.find_dataset(request.dataset_id)
        except NotFoundError:
            raise ValidationError(
                f"unknown dataset {request.dataset_id!r}", {"dataset_id": "unknown dataset"}
            )
    else:
        raise ValidationError(f"unknown job_type {job_type!r}", {"job_type": "invalid"})


def execute_job(store: Store, job: Job) -> str:
    """Run one claimed job; returns the result_ref and persists the result doc."""
    if job.job_type == "collect":
        spec = ConnectorSpec.from_dict(job.payload)
        outcome = run_collection(store, spec, created_by_job=job.job_id)
        store.put_result(
            job.job_id,
            {
                "dataset_id": outcome.dataset_id,
                "count": outcome.count,
                "skipped": outcome.skipped,
            },
        )
        return outcome.dataset_id
    if job.job_type == "preprocess":
        cfg = PipelineConfig.from_dict(job.payload.get("config") or {})
        inputs = [str(ref) for ref in job.payload["inputs"]]
        dataset_id, report = run_pipeline(
            store, inputs, cfg, created_by_job=job.job_id, name=job.payload.get("name")
        )
        store.put_result(job.job_id, {"dataset_id": dataset_id, **report.to_dict()})
        return dataset_id
    if job.job_type == "analyze":
        request = AnalysisRequest.from_dict(job.payload)
        result = run_analysis(store, request)
        store.put_result(job.job_id, result.to_dict())
        return f"result:{job.job_id}"
    raise ValidationError(f"unknown job_type {job.job_type!r}")


def make_executor(store: Store):
    def executor(job: Job) -> str:
        return execute_job(store, job)

    return executor
