import { describe, expect, it } from "vitest";

import { reductionCell, stageReportRows, stageReportTableHtml } from "../src/report";
import type { StageReport } from "../src/types";

// Fixture equal to the reference preprocessing-impact table: raw 12847,
// four enabled stages, final 5614.
const FIXTURE: StageReport = {
  stages: [
    { name: "dedup", input_count: 12847, output_count: 10203, removed: 2644, reduction_pct: 20.6, enabled: true },
    { name: "language", input_count: 10203, output_count: 9451, removed: 752, reduction_pct: 7.4, enabled: true },
    { name: "keyword", input_count: 9451, output_count: 7832, removed: 1619, reduction_pct: 17.1, enabled: true },
    { name: "relevancy", input_count: 7832, output_count: 5614, removed: 2218, reduction_pct: 28.3, enabled: true },
  ],
  totals: {
    raw_count: 12847,
    final_count: 5614,
    total_removed: 7233,
    total_reduction_pct: 56.3,
  },
};

describe("stage report rendering", () => {
  it("renders six rows for the reference fixture", () => {
    const rows = stageReportRows(FIXTURE);
    expect(rows).toHaveLength(6); // raw + four stages + total
    expect(rows[0].label).toBe("Raw collected data");
    expect(rows[5].label).toBe("Total");
  });

  it("numeric cells are byte-for-byte the fixture values", () => {
    const rows = stageReportRows(FIXTURE);
    // every record/removed cell is String(fixture value), nothing reformatted
    expect(rows.map((r) => r.records)).toEqual([
      "12847", "10203", "9451", "7832", "5614", "5614",
    ]);
    expect(rows.slice(1).map((r) => r.removed)).toEqual([
      "2644", "752", "1619", "2218", "7233",
    ]);
    // reduction cells: the fixture number verbatim inside sign and percent
    expect(rows.slice(1).map((r) => r.reduction)).toEqual([
      "-20.6%", "-7.4%", "-17.1%", "-28.3%", "-56.3%",
    ]);
    for (const [row, value] of [
      [rows[1], 20.6],
      [rows[2], 7.4],
      [rows[3], 17.1],
      [rows[4], 28.3],
      [rows[5], 56.3],
    ] as const) {
      expect(row.reduction).toBe(`-${String(value)}%`);
    }
  });

  it("zero-removal rows carry no sign", () => {
    expect(reductionCell(0, 0)).toBe("0%");
    expect(reductionCell(0, 0.0)).toBe("0%");
    expect(reductionCell(5, 2.5)).toBe("-2.5%");
  });

  it("disabled stages are marked, html table holds the same cells", () => {
    const withDisabled: StageReport = {
      stages: [
        { name: "dedup", input_count: 10, output_count: 10, removed: 0, reduction_pct: 0.0, enabled: false },
        ...FIXTURE.stages.slice(1),
      ],
      totals: FIXTURE.totals,
    };
    const rows = stageReportRows(withDisabled);
    expect(rows[1].label).toBe("After deduplication (off)");

    const html = stageReportTableHtml(FIXTURE);
    for (const cell of ["12847", "10203", "9451", "7832", "5614", "2644",
                        "-20.6%", "-7.4%", "-17.1%", "-28.3%", "-56.3%"]) {
      expect(html).toContain(`>${cell}</td>`);
    }
  });

  it("escapes markup in stage names", () => {
    const hostile: StageReport = {
      stages: [
        { name: "<script>", input_count: 1, output_count: 1, removed: 0, reduction_pct: 0, enabled: true },
      ],
      totals: { raw_count: 1, final_count: 1, total_removed: 0, total_reduction_pct: 0 },
    };
    expect(stageReportTableHtml(hostile)).not.toContain("<script>");
  });
});
