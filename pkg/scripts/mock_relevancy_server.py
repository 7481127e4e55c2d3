"""Reference relevancy model server speaking the remote wire protocol.

Wraps the lexical baseline behind POST /classify so `classifier: remote`
pipelines can be exercised without a real fine-tuned model. A server
wrapping a sentence-pair model would assemble each input as the context
and candidate text joined as one pair and fill in the same response shape.

    python scripts/mock_relevancy_server.py [port]
"""

from __future__ import annotations

import json
import sys
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parents[1] / "src"))

from kumpul.relevancy import baseline_score


class Handler(BaseHTTPRequestHandler):
    def do_POST(self):  # noqa: N802 - stdlib naming
        if self.path.rstrip("/") != "/classify":
            self.send_error(404)
            return
        length = int(self.headers.get("Content-Length", 0))
        try:
            body = json.loads(self.rfile.read(length))
            context = body["context"]
            texts = body["texts"]
            threshold = float(body.get("threshold", 0.1))
        except (ValueError, KeyError, TypeError):
            self.send_error(400, "bad request body")
            return
        verdicts = []
        for text in texts:
            score = baseline_score(context, text)
            verdicts.append({"relevant": score >= threshold, "score": score})
        payload = json.dumps(
            {"classifier_id": "mock-baseline-server", "verdicts": verdicts}
        ).encode("utf-8")
        self.send_response(200)
        self.send_header("Content-Type", "application/json")
        self.send_header("Content-Length", str(len(payload)))
        self.end_headers()
        self.wfile.write(payload)

    def log_message(self, fmt, *args):
        print(f"{self.address_string()} {fmt % args}")


def main() -> None:
    port = int(sys.argv[1]) if len(sys.argv) > 1 else 8901
    server = ThreadingHTTPServer(("127.0.0.1", port), Handler)
    print(f"mock relevancy server on http://127.0.0.1:{port}/classify")
    try:
        server.serve_forever()
    except KeyboardInterrupt:
        pass


if __name__ == "__main__":
    main()
