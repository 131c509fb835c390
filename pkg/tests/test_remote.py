import json
import threading
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer

import pytest

from trialrank import EmbedderConfig, embed_remote, embed_remote_many
from trialrank.errors import DimMismatch, MalformedResponse, RemoteUnavailable

DIM = 8
FAST = {"backoff": 0.01, "timeout": 5.0}


class _Handler(BaseHTTPRequestHandler):
    def do_POST(self):
        server = self.server
        length = int(self.headers.get("Content-Length", "0"))
        body = json.loads(self.rfile.read(length))
        with server.lock:
            server.requests.append(body["texts"])
            action = server.script.pop(0) if server.script else "ok"

        if action == "ok":
            # v[0] tags the text so the client's ordering is observable
            vectors = [[float(text)] + [0.5] * (DIM - 1) for text in body["texts"]]
            self._reply(200, {"vectors": vectors, "dim": DIM})
        elif action == "wrong-dim-field":
            vectors = [[0.0] * DIM for _ in body["texts"]]
            self._reply(200, {"vectors": vectors, "dim": DIM + 1})
        elif action == "short-vector":
            vectors = [[0.0] * (DIM - 1) for _ in body["texts"]]
            self._reply(200, {"vectors": vectors, "dim": DIM})
        elif action == "missing-key":
            self._reply(200, {"dim": DIM})
        elif action == "wrong-count":
            self._reply(200, {"vectors": [[0.0] * DIM], "dim": DIM})
        elif action == "not-json":
            raw = b"<html>oops</html>"
            self.send_response(200)
            self.send_header("Content-Length", str(len(raw)))
            self.end_headers()
            self.wfile.write(raw)
        elif action == "nan":
            raw = json.dumps({"vectors": [[float("nan")] * DIM], "dim": DIM}).encode()
            self.send_response(200)
            self.send_header("Content-Type", "application/json")
            self.send_header("Content-Length", str(len(raw)))
            self.end_headers()
            self.wfile.write(raw)
        else:
            self._reply(int(action), {})

    def _reply(self, status, payload):
        raw = json.dumps(payload).encode()
        self.send_response(status)
        self.send_header("Content-Type", "application/json")
        self.send_header("Content-Length", str(len(raw)))
        self.end_headers()
        self.wfile.write(raw)

    def log_message(self, *args):
        pass


@pytest.fixture
def stub():
    server = ThreadingHTTPServer(("127.0.0.1", 0), _Handler)
    server.script = []
    server.requests = []
    server.lock = threading.Lock()
    thread = threading.Thread(target=server.serve_forever, daemon=True)
    thread.start()
    yield server
    server.shutdown()
    server.server_close()


def _cfg(server) -> EmbedderConfig:
    url = f"http://127.0.0.1:{server.server_address[1]}/embed"
    return EmbedderConfig(backend="remote", dim=DIM, remote_url=url)


def test_order_preserved(stub):
    out = embed_remote(["0", "1", "2"], _cfg(stub), source_ids=["a", "b", "c"], **FAST)
    assert [v.values[0] for v in out] == [0.0, 1.0, 2.0]
    assert [v.source_id for v in out] == ["a", "b", "c"]
    assert stub.requests == [["0", "1", "2"]]


def test_empty_batch_no_network(stub):
    assert embed_remote([], _cfg(stub), **FAST) == []
    assert stub.requests == []


def test_batch_limit_enforced(stub):
    with pytest.raises(ValueError):
        embed_remote([str(i) for i in range(65)], _cfg(stub), **FAST)


def test_many_chunks_at_64(stub):
    texts = [str(i) for i in range(150)]
    out = embed_remote_many(texts, _cfg(stub), **FAST)
    assert [len(batch) for batch in stub.requests] == [64, 64, 22]
    assert [v.values[0] for v in out] == [float(i) for i in range(150)]


def test_dim_field_mismatch(stub):
    stub.script[:] = ["wrong-dim-field"]
    with pytest.raises(DimMismatch):
        embed_remote(["0"], _cfg(stub), **FAST)


def test_vector_length_mismatch(stub):
    stub.script[:] = ["short-vector"]
    with pytest.raises(DimMismatch):
        embed_remote(["0"], _cfg(stub), **FAST)


@pytest.mark.parametrize("action", ["missing-key", "wrong-count", "not-json", "nan"])
def test_malformed_responses(stub, action):
    stub.script[:] = [action]
    texts = ["0", "1"] if action == "wrong-count" else ["0"]
    with pytest.raises(MalformedResponse):
        embed_remote(texts, _cfg(stub), **FAST)


def test_transient_5xx_retried_then_succeeds(stub):
    stub.script[:] = ["500", "503", "ok"]
    out = embed_remote(["7"], _cfg(stub), **FAST)
    assert out[0].values[0] == 7.0
    assert len(stub.requests) == 3


def test_persistent_5xx_exhausts_retries(stub):
    stub.script[:] = ["500"] * 10
    with pytest.raises(RemoteUnavailable):
        embed_remote(["0"], _cfg(stub), retries=3, **FAST)
    # one initial attempt plus exactly three retries
    assert len(stub.requests) == 4


def test_4xx_fails_immediately(stub):
    stub.script[:] = ["404"]
    with pytest.raises(RemoteUnavailable):
        embed_remote(["0"], _cfg(stub), **FAST)
    assert len(stub.requests) == 1


def test_connection_refused():
    cfg = EmbedderConfig(backend="remote", dim=DIM, remote_url="http://127.0.0.1:1/embed")
    with pytest.raises(RemoteUnavailable):
        embed_remote(["0"], cfg, retries=1, backoff=0.01, timeout=1.0)
