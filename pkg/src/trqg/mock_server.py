"""Deterministic in-process backend for tests and offline development.

Speaks the generation wire protocol. Outputs come from an ordered
fixture list (first matching fixture wins); inputs no fixture matches
fall back to a deterministic echo: the text between the two highlight
tokens with trailing terminators trimmed, or the first five whitespace
tokens of the input. Repeated request_ids return the cached first
response, so client retries are idempotent.
"""

from __future__ import annotations

import json
import threading
import time
from dataclasses import dataclass
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer
from pathlib import Path
from typing import Iterable

from .errors import SchemaError
from .formatting import HIGHLIGHT_TOKEN
from .sentences import TERMINATORS

MATCH_KINDS = ("exact", "prefix", "contains")
FALLBACK_TOKEN_COUNT = 5


@dataclass
class MockFixture:
    kind: str
    pattern: str
    output: str

    def matches(self, text: str) -> bool:
        if self.kind == "exact":
            return text == self.pattern
        if self.kind == "prefix":
            return text.startswith(self.pattern)
        return self.pattern in text


def load_fixtures(source: Path | str | Iterable[dict]) -> list[MockFixture]:
    """Load fixtures from a JSON file, JSON text, or parsed objects.

    The document is a list of {"match": {"kind", "pattern"}, "output"}
    objects; kind is exact, prefix or contains. Order is significant.
    """
    if isinstance(source, Path):
        doc = json.loads(source.read_text(encoding="utf-8"))
    elif isinstance(source, str):
        doc = json.loads(source)
    else:
        doc = list(source)
    if not isinstance(doc, list):
        raise SchemaError("fixtures document must be a list")
    fixtures = []
    for i, item in enumerate(doc):
        path = f"$[{i}]"
        if not isinstance(item, dict):
            raise SchemaError("fixture must be an object", path)
        match = item.get("match")
        if not isinstance(match, dict):
            raise SchemaError("missing 'match' object", path)
        kind = match.get("kind")
        pattern = match.get("pattern")
        output = item.get("output")
        if kind not in MATCH_KINDS:
            raise SchemaError(
                f"match kind must be one of {MATCH_KINDS}, got {kind!r}", path
            )
        if not isinstance(pattern, str):
            raise SchemaError("match pattern must be a string", path)
        if not isinstance(output, str):
            raise SchemaError("fixture output must be a string", path)
        fixtures.append(MockFixture(kind=kind, pattern=pattern, output=output))
    return fixtures


def fallback_output(text: str) -> str:
    """The echo used when no fixture matches.

    If the input carries exactly one highlighted stretch, echo that
    stretch without surrounding whitespace and trailing terminators.
    Otherwise echo the first five whitespace tokens joined by single
    spaces.
    """
    first = text.find(HIGHLIGHT_TOKEN)
    if first >= 0:
        second = text.find(HIGHLIGHT_TOKEN, first + len(HIGHLIGHT_TOKEN))
        if second >= 0:
            inner = text[first + len(HIGHLIGHT_TOKEN) : second].strip()
            inner = inner.rstrip(TERMINATORS).rstrip()
            if inner:
                return inner
    return " ".join(text.split()[:FALLBACK_TOKEN_COUNT])


class MockBackendServer:
    """Threaded HTTP server implementing the wire protocol.

    port 0 binds an ephemeral port; read .port after construction.
    handled_max_in_flight exposes the high-water mark of concurrent
    generate requests, for concurrency tests. delay stretches each
    generate call to make overlap observable.
    """

    def __init__(
        self,
        fixtures: Iterable[MockFixture] = (),
        port: int = 0,
        model_id: str = "mock-backend",
        delay: float = 0.0,
    ):
        self.fixtures = list(fixtures)
        self.model_id = model_id
        self.delay = delay
        self.generate_calls = 0
        self.handled_max_in_flight = 0
        self._in_flight = 0
        self._lock = threading.Lock()
        self._responses: dict[str, dict] = {}
        self._httpd = ThreadingHTTPServer(("127.0.0.1", port), self._handler_class())
        self._httpd.daemon_threads = True
        self._thread: threading.Thread | None = None

    @property
    def port(self) -> int:
        return self._httpd.server_address[1]

    @property
    def endpoint(self) -> str:
        return f"http://127.0.0.1:{self.port}"

    def output_for(self, text: str) -> str:
        for fixture in self.fixtures:
            if fixture.matches(text):
                return fixture.output
        return fallback_output(text)

    def _respond(self, inputs: list[str], request_id: str) -> dict:
        with self._lock:
            if request_id in self._responses:
                return self._responses[request_id]
            self._in_flight += 1
            self.generate_calls += 1
            self.handled_max_in_flight = max(
                self.handled_max_in_flight, self._in_flight
            )
        try:
            if self.delay:
                time.sleep(self.delay)
            payload = {
                "outputs": [self.output_for(text) for text in inputs],
                "model_id": self.model_id,
            }
            with self._lock:
                self._responses[request_id] = payload
            return payload
        finally:
            with self._lock:
                self._in_flight -= 1

    def _handler_class(self):
        server = self

        class Handler(BaseHTTPRequestHandler):
            protocol_version = "HTTP/1.1"

            def log_message(self, *args):
                pass

            def _send(self, status: int, payload: dict):
                body = json.dumps(payload, ensure_ascii=False).encode("utf-8")
                self.send_response(status)
                self.send_header("Content-Type", "application/json; charset=utf-8")
                self.send_header("Content-Length", str(len(body)))
                self.end_headers()
                self.wfile.write(body)

            def do_GET(self):
                if self.path == "/health":
                    self._send(200, {"status": "ok", "model_id": server.model_id})
                else:
                    self._send(404, {"error": f"no route {self.path}"})

            def do_POST(self):
                if self.path != "/generate":
                    self._send(404, {"error": f"no route {self.path}"})
                    return
                length = int(self.headers.get("Content-Length") or 0)
                raw = self.rfile.read(length)
                try:
                    body = json.loads(raw.decode("utf-8"))
                except (UnicodeDecodeError, json.JSONDecodeError):
                    self._send(400, {"error": "body is not valid JSON"})
                    return
                inputs = body.get("inputs") if isinstance(body, dict) else None
                request_id = body.get("request_id") if isinstance(body, dict) else None
                max_new = body.get("max_new_tokens") if isinstance(body, dict) else None
                if (
                    not isinstance(inputs, list)
                    or not all(isinstance(item, str) for item in inputs)
                    or not isinstance(request_id, str)
                    or not request_id
                    or not isinstance(max_new, int)
                    or isinstance(max_new, bool)
                    or max_new < 1
                ):
                    self._send(400, {"error": "malformed generate request"})
                    return
                self._send(200, server._respond(inputs, request_id))

        return Handler

    def start(self) -> "MockBackendServer":
        self._thread = threading.Thread(target=self._httpd.serve_forever, daemon=True)
        self._thread.start()
        return self

    def stop(self) -> None:
        self._httpd.shutdown()
        self._httpd.server_close()
        if self._thread is not None:
            self._thread.join(timeout=5)
            self._thread = None

    def __enter__(self) -> "MockBackendServer":
        return self.start()

    def __exit__(self, *exc_info) -> None:
        self.stop()


def serve_mock(
    fixtures: Iterable[MockFixture] = (),
    port: int = 8008,
    model_id: str = "mock-backend",
) -> None:
    """Run a mock backend in the foreground until interrupted."""
    server = MockBackendServer(fixtures=fixtures, port=port, model_id=model_id)
    print(f"mock backend {model_id!r} listening on {server.endpoint}", flush=True)
    try:
        server._httpd.serve_forever()
    except KeyboardInterrupt:
        pass
    finally:
        server._httpd.server_close()
