"""End-to-end demo of the fuel-price research workflow on a throwaway store.

Collects the bundled fixture, runs the five-stage pipeline with the study
config (dedup, Indonesian-only, "BlackBerry Messenger" excluded, relevancy
against the fuel-price context), then runs every analyzer and prints the
results. Mirrors what the web UI drives over HTTP.

    python scripts/run_walkthrough.py [store.db]
"""

from __future__ import annotations

import json
import sys
import tempfile
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parents[1] / "src"))

from kumpul.analysis import AnalysisRequest, run_analysis
from kumpul.cli import format_stage_table
from kumpul.collection import ConnectorSpec, run_collection
from kumpul.preprocessing import PipelineConfig, run_pipeline
from kumpul.store import Store

FIXTURES = Path(__file__).resolve().parents[1] / "src" / "kumpul" / "data" / "fixtures"


def main() -> None:
    store_path = sys.argv[1] if len(sys.argv) > 1 else tempfile.mktemp(suffix=".db")
    store = Store(store_path)
    print(f"store: {store_path}\n")

    spec = ConnectorSpec.from_dict(
        {
            "connector_kind": "file",
            "source_name": "raw-bbm",
            "source_category": "social_media",
            "params": {
                "path": str(FIXTURES / "walkthrough_posts.jsonl"),
                "mapping": (FIXTURES / "walkthrough_mapping.json").read_text(),
            },
        }
    )
    outcome = run_collection(store, spec)
    print(f"[1] collected {outcome.count} records into {outcome.dataset_id}"
          f" (skipped {outcome.skipped})")

    config = PipelineConfig.from_dict(
        json.loads((FIXTURES / "walkthrough_pipeline.json").read_text())
    )
    clean_id, report = run_pipeline(store, [outcome.dataset_id], config, name="clean-bbm")
    print(f"\n[2] preprocessed into {clean_id}:\n")
    print(format_stage_table(report.to_dict()))

    for analyzer in ("sentiment", "trend", "network", "terms"):
        result = run_analysis(
            store,
            AnalysisRequest(dataset_id=clean_id, analyzer=analyzer,
                            params={"bucket": "day"} if analyzer == "trend" else {}),
        )
        print(f"\n[3] {analyzer}: {json.dumps(result.summary, ensure_ascii=False)}")

    print(f"\nlineage: {json.dumps(store.get_lineage(clean_id), indent=2)}")


if __name__ == "__main__":
    main()
