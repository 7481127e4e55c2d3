// Thin client for the /v1 API. Every list fetch is tagged with a sequence
// number so a stale response that lands after a newer one is discarded.

import type { DatasetRecord, JobRecord, JobResult, SourceEntry } from "./types";

export interface ApiError {
  status: number;
  error: string;
  fields?: Record<string, string>;
}

export class RequestFailed extends Error {
  readonly detail: ApiError;
  constructor(detail: ApiError) {
    super(detail.error);
    this.detail = detail;
  }
}

const BASE = "/v1";

async function request<T>(path: string, init?: RequestInit): Promise<T> {
  let response: Response;
  try {
    response = await fetch(`${BASE}${path}`, init);
  } catch {
    throw new RequestFailed({ status: 0, error: "API unreachable" });
  }
  let body: unknown = null;
  try {
    body = await response.json();
  } catch {
    /* non-JSON error body */
  }
  if (!response.ok) {
    const parsed = (body ?? {}) as Partial<ApiError>;
    throw new RequestFailed({
      status: response.status,
      error: parsed.error ?? `HTTP ${response.status}`,
      fields: parsed.fields,
    });
  }
  return body as T;
}

export const api = {
  sources: () => request<{ sources: SourceEntry[] }>("/sources"),
  analyzers: () => request<{ analyzers: string[] }>("/analyzers"),
  submitJob: (jobType: string, payload: unknown) =>
    request<{ job_id: string }>("/jobs", {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify({ job_type: jobType, payload }),
    }),
  jobs: (params: Record<string, string> = {}) => {
    const query = new URLSearchParams({ limit: "200", ...params }).toString();
    return request<{ jobs: JobRecord[]; total: number }>(`/jobs?${query}`);
  },
  job: (jobId: string) => request<JobRecord>(`/jobs/${jobId}`),
  cancelJob: (jobId: string) =>
    request<{ job_id: string; status: string }>(`/jobs/${jobId}/cancel`, { method: "POST" }),
  jobResult: (jobId: string) => request<JobResult>(`/jobs/${jobId}/result`),
  datasets: () => request<{ datasets: DatasetRecord[] }>("/datasets"),
};

// Wraps an async fetcher so only the newest in-flight call may deliver.
export function latestOnly<A extends unknown[], R>(
  fetcher: (...args: A) => Promise<R>,
): (...args: A) => Promise<R | undefined> {
  let sequence = 0;
  return async (...args: A) => {
    const ticket = ++sequence;
    const result = await fetcher(...args);
    return ticket === sequence ? result : undefined;
  };
}
