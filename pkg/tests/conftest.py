"""Shared fixtures: document builders and a programmable HTTP stub."""

from __future__ import annotations

import json
import threading
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer
from urllib.parse import parse_qs, urlparse

import pytest

from paperscout.remote import ServiceEndpoint
from paperscout.textprep import CleanDocument, RawDocument, preprocess


def make_doc(text: str, source_id: str = "doc") -> CleanDocument:
    return preprocess(RawDocument(source_id=source_id, body=text))


@pytest.fixture
def doc_factory():
    return make_doc


class StubService:
    """A local HTTP server whose per-path behavior each test programs.

    Responders receive the decoded request (JSON body for POST, query
    params for GET) and return (status, body); a dict body is sent as
    JSON, a str verbatim.  Every request is recorded for inspection.
    """

    def __init__(self) -> None:
        self._post: dict[str, object] = {}
        self._get: dict[str, object] = {}
        self.requests: list[tuple[str, str, object]] = []
        stub = self

        class Handler(BaseHTTPRequestHandler):
            def log_message(self, *args):  # keep test output quiet
                pass

            def _send(self, status: int, body) -> None:
                if isinstance(body, (dict, list)):
                    payload = json.dumps(body).encode("utf-8")
                    content_type = "application/json"
                else:
                    payload = str(body).encode("utf-8")
                    content_type = "text/plain"
                self.send_response(status)
                self.send_header("Content-Type", content_type)
                self.send_header("Content-Length", str(len(payload)))
                self.end_headers()
                self.wfile.write(payload)

            def do_POST(self):
                path = urlparse(self.path).path
                length = int(self.headers.get("Content-Length", 0))
                raw = self.rfile.read(length)
                try:
                    payload = json.loads(raw) if raw else None
                except json.JSONDecodeError:
                    payload = raw.decode("utf-8", "replace")
                stub.requests.append(("POST", path, payload))
                responder = stub._post.get(path)
                if responder is None:
                    self._send(404, {"error": f"no POST handler for {path}"})
                    return
                status, body = responder(payload)
                self._send(status, body)

            def do_GET(self):
                parsed = urlparse(self.path)
                params = {k: v[0] for k, v in parse_qs(parsed.query).items()}
                stub.requests.append(("GET", parsed.path, params))
                responder = stub._get.get(parsed.path)
                if responder is None:
                    self._send(404, {"error": f"no GET handler for {parsed.path}"})
                    return
                status, body = responder(params)
                self._send(status, body)

        self._server = ThreadingHTTPServer(("127.0.0.1", 0), Handler)
        self._thread = threading.Thread(target=self._server.serve_forever, daemon=True)
        self._thread.start()

    @property
    def url(self) -> str:
        host, port = self._server.server_address
        return f"http://{host}:{port}"

    def endpoint(self, **kwargs) -> ServiceEndpoint:
        return ServiceEndpoint(url=self.url, timeout_s=5.0, **kwargs)

    def on_post(self, path: str, responder) -> None:
        self._post[path] = responder

    def on_get(self, path: str, responder) -> None:
        self._get[path] = responder

    def close(self) -> None:
        self._server.shutdown()
        self._server.server_close()


@pytest.fixture
def stub_service():
    service = StubService()
    yield service
    service.close()


# ---------------------------------------------------------------------------
# acceptance-criterion reporting: one pass/fail line per criterion
# ---------------------------------------------------------------------------

_ACCEPTANCE_RESULTS: dict[str, str] = {}


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    marker = item.get_closest_marker("acceptance")
    if marker and report.when == "call":
        _ACCEPTANCE_RESULTS[marker.args[0]] = "PASS" if report.passed else "FAIL"


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if not _ACCEPTANCE_RESULTS:
        return
    terminalreporter.write_sep("-", "acceptance criteria")
    for name, verdict in _ACCEPTANCE_RESULTS.items():
        terminalreporter.write_line(f"ACCEPTANCE {name}: {verdict}")
