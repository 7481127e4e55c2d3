// Shapes of the /v1 API responses the UI consumes.

export interface SourceEntry {
  kind: string;
  params: Record<string, string>;
}

export interface JobRecord {
  job_id: string;
  job_type: "collect" | "preprocess" | "analyze";
  payload: Record<string, unknown>;
  status: "pending" | "running" | "completed" | "failed" | "cancelled";
  attempts: number;
  max_attempts: number;
  worker_id: string | null;
  lease_expires_at: string | null;
  result_ref: string | null;
  error: string | null;
  created_at: string;
  updated_at: string;
}

export interface DatasetRecord {
  dataset_id: string;
  name: string;
  kind: "raw" | "merged" | "preprocessed";
  parent_ids: string[];
  created_by_job: string | null;
  record_count: number;
  created_at: string;
}

export interface StageRow {
  name: string;
  input_count: number;
  output_count: number;
  removed: number;
  reduction_pct: number;
  enabled: boolean;
}

export interface StageReport {
  stages: StageRow[];
  totals: {
    raw_count: number;
    final_count: number;
    total_removed: number;
    total_reduction_pct: number;
  };
}

export interface CollectResult {
  dataset_id: string;
  count: number;
  skipped: number;
}

export interface AnalysisResult {
  analyzer_id: string;
  summary: Record<string, unknown>;
  detail: Record<string, unknown>;
  produced_at: string;
}

export type JobResult =
  | CollectResult
  | (StageReport & { dataset_id: string })
  | AnalysisResult;
