"""Fixture-replay HTTP server for tests and the acceptance suite.

Serves the web-adapter wire format: GET /search?q=...&k=... returns the
hits of the first fixture entry whose `match` substring occurs in the
query (case-folded), after an optional artificial delay. Use as a context
manager or via `verify mock-server`.
"""

from __future__ import annotations

import json
import threading
import time
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer
from pathlib import Path
from urllib.parse import parse_qs, urlparse


class MockKnowledgeServer:
    def __init__(self, fixture: dict | str | Path, delay_ms: float | None = None, host: str = "127.0.0.1", port: int = 0):
        if not isinstance(fixture, dict):
            fixture = json.loads(Path(fixture).read_text(encoding="utf-8"))
        self.entries = fixture.get("entries", [])
        self.default_hits = fixture.get("default", [])
        self.delay_ms = fixture.get("delay_ms", 0.0) if delay_ms is None else delay_ms
        self._host = host
        self._port = port
        self._server: ThreadingHTTPServer | None = None
        self._thread: threading.Thread | None = None
        self.request_count = 0

    def _hits_for(self, query: str) -> list:
        q = query.casefold()
        for entry in self.entries:
            if entry.get("match", "").casefold() in q:
                return entry.get("hits", [])
        return self.default_hits

    def start(self) -> "MockKnowledgeServer":
        outer = self

        class Handler(BaseHTTPRequestHandler):
            def log_message(self, *args):  # noqa: N802 - stdlib signature
                pass

            def do_GET(self):  # noqa: N802 - stdlib signature
                parsed = urlparse(self.path)
                if parsed.path not in ("/", "/search", "/health"):
                    self.send_response(404)
                    self.end_headers()
                    return
                outer.request_count += 1
                if parsed.path == "/health":
                    body = b'{"status": "ok"}'
                else:
                    params = parse_qs(parsed.query)
                    query = params.get("q", [""])[0]
                    k = int(params.get("k", ["10"])[0])
                    if outer.delay_ms:
                        time.sleep(outer.delay_ms / 1000.0)
                    body = json.dumps(outer._hits_for(query)[:k]).encode("utf-8")
                try:
                    self.send_response(200)
                    self.send_header("Content-Type", "application/json")
                    self.send_header("Content-Length", str(len(body)))
                    self.end_headers()
                    self.wfile.write(body)
                except (BrokenPipeError, ConnectionResetError):
                    pass  # client gave up (e.g. timed out) while we slept

        class Server(ThreadingHTTPServer):
            daemon_threads = True

            def handle_error(self, request, client_address):
                pass  # disconnects during artificial delays are expected

        self._server = Server((self._host, self._port), Handler)
        self._thread = threading.Thread(target=self._server.serve_forever, daemon=True)
        self._thread.start()
        return self

    @property
    def url(self) -> str:
        assert self._server is not None, "server not started"
        host, port = self._server.server_address[:2]
        return f"http://{host}:{port}/search"

    def stop(self) -> None:
        if self._server is not None:
            self._server.shutdown()
            self._server.server_close()
            self._server = None

    def __enter__(self) -> "MockKnowledgeServer":
        return self.start()

    def __exit__(self, *exc) -> None:
        self.stop()
