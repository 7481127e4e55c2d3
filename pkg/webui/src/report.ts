// Stage-report rendering. Every numeric cell is String(value) straight from
// the API response (sign and % are fixed decoration), so what the table
// shows is byte-for-byte what the backend computed; the UI never rounds or
// reformats numbers.

import type { StageReport } from "./types";

export const STAGE_LABELS: Record<string, string> = {
  dedup: "After deduplication",
  date: "After date filtering",
  language: "After language detection",
  keyword: "After keyword filtering",
  relevancy: "After relevancy classification",
};

export interface ReportRow {
  label: string;
  records: string;
  removed: string;
  reduction: string;
  isTotal: boolean;
}

export function reductionCell(removed: number, pct: number): string {
  return removed === 0 ? `${String(pct)}%` : `-${String(pct)}%`;
}

export function stageReportRows(report: StageReport): ReportRow[] {
  const rows: ReportRow[] = [
    {
      label: "Raw collected data",
      records: String(report.totals.raw_count),
      removed: "",
      reduction: "",
      isTotal: false,
    },
  ];
  for (const stage of report.stages) {
    const label =
      (STAGE_LABELS[stage.name] ?? stage.name) + (stage.enabled === false ? " (off)" : "");
    rows.push({
      label,
      records: String(stage.output_count),
      removed: String(stage.removed),
      reduction: reductionCell(stage.removed, stage.reduction_pct),
      isTotal: false,
    });
  }
  rows.push({
    label: "Total",
    records: String(report.totals.final_count),
    removed: String(report.totals.total_removed),
    reduction: reductionCell(report.totals.total_removed, report.totals.total_reduction_pct),
    isTotal: true,
  });
  return rows;
}

export function stageReportTableHtml(report: StageReport): string {
  const rows = stageReportRows(report)
    .map(
      (row) =>
        `<tr class="${row.isTotal ? "total-row" : ""}">` +
        `<td>${escapeHtml(row.label)}</td>` +
        `<td class="num">${row.records}</td>` +
        `<td class="num">${row.removed}</td>` +
        `<td class="num">${row.reduction}</td></tr>`,
    )
    .join("");
  return (
    `<table class="stage-report"><thead><tr>` +
    `<th>Stage</th><th class="num">Records</th><th class="num">Removed</th>` +
    `<th class="num">Reduction</th></tr></thead><tbody>${rows}</tbody></table>`
  );
}

export function escapeHtml(text: string): string {
  return text
    .replaceAll("&", "&amp;")
    .replaceAll("<", "&lt;")
    .replaceAll(">", "&gt;")
    .replaceAll('"', "&quot;");
}
