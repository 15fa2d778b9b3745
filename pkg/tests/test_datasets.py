import hashlib
import json
import threading
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer

import pytest

import trqg.datasets as datasets
from trqg.datasets import available_datasets, default_cache_dir, fetch_dataset, load_dataset
from trqg.errors import IntegrityError, TransportError, UsageError

DOC = json.dumps(
    {
        "data": [
            {
                "title": "t",
                "paragraphs": [
                    {
                        "context": "Ali geldi.",
                        "qas": [
                            {
                                "id": "q1",
                                "question": "Kim geldi?",
                                "answers": [{"text": "Ali", "answer_start": 0}],
                            }
                        ],
                    }
                ],
            }
        ]
    },
    ensure_ascii=False,
).encode("utf-8")


class FileServer:
    """Serves a dict of path -> bytes and counts every request."""

    def __init__(self, files):
        self.files = dict(files)
        self.requests = []
        server = self

        class Handler(BaseHTTPRequestHandler):
            def log_message(self, *args):
                pass

            def do_GET(self):
                server.requests.append(self.path)
                body = server.files.get(self.path)
                if body is None:
                    self.send_response(404)
                    self.end_headers()
                    return
                self.send_response(200)
                self.send_header("Content-Length", str(len(body)))
                self.end_headers()
                self.wfile.write(body)

        self.httpd = ThreadingHTTPServer(("127.0.0.1", 0), Handler)
        self.port = self.httpd.server_address[1]
        self.thread = threading.Thread(target=self.httpd.serve_forever, daemon=True)
        self.thread.start()

    def url(self, path):
        return f"http://127.0.0.1:{self.port}{path}"

    def stop(self):
        self.httpd.shutdown()
        self.httpd.server_close()


@pytest.fixture
def file_server():
    server = FileServer({"/corpus.json": DOC})
    yield server
    server.stop()


@pytest.fixture
def patched_manifest(file_server, monkeypatch):
    manifest = {
        "toy": {
            "license": "test",
            "splits": {
                "train": {
                    "url": file_server.url("/corpus.json"),
                    "sha256": hashlib.sha256(DOC).hexdigest(),
                }
            },
        }
    }
    monkeypatch.setattr(datasets, "_manifest", lambda: manifest)
    return manifest


class TestFetch:
    def test_downloads_and_verifies(self, patched_manifest, file_server, tmp_path):
        path = fetch_dataset("toy", "train", tmp_path)
        assert path == tmp_path / "toy-train.json"
        assert path.read_bytes() == DOC
        assert file_server.requests == ["/corpus.json"]

    def test_second_fetch_does_no_network_io(self, patched_manifest, file_server, tmp_path):
        fetch_dataset("toy", "train", tmp_path)
        fetch_dataset("toy", "train", tmp_path)
        assert len(file_server.requests) == 1

    def test_corrupted_cache_refetches(self, patched_manifest, file_server, tmp_path):
        path = fetch_dataset("toy", "train", tmp_path)
        path.write_bytes(b"corrupted")
        again = fetch_dataset("toy", "train", tmp_path)
        assert again.read_bytes() == DOC
        assert len(file_server.requests) == 2

    def test_digest_mismatch_rejected(self, file_server, monkeypatch, tmp_path):
        manifest = {
            "toy": {
                "license": "test",
                "splits": {
                    "train": {
                        "url": file_server.url("/corpus.json"),
                        "sha256": "0" * 64,
                    }
                },
            }
        }
        monkeypatch.setattr(datasets, "_manifest", lambda: manifest)
        with pytest.raises(IntegrityError):
            fetch_dataset("toy", "train", tmp_path)
        # no poisoned cache entry and no leftover temp file
        assert list(tmp_path.glob("*.json")) == []
        assert list(tmp_path.glob("*.part")) == []

    def test_unknown_dataset_is_usage_error(self, tmp_path):
        with pytest.raises(UsageError) as exc:
            fetch_dataset("nope", "train", tmp_path)
        assert "tquad1" in str(exc.value)

    def test_unknown_split_is_usage_error(self, tmp_path):
        with pytest.raises(UsageError) as exc:
            fetch_dataset("xquad.tr", "train", tmp_path)
        assert "val" in str(exc.value)

    def test_http_404_is_transport_error(self, file_server, monkeypatch, tmp_path):
        manifest = {
            "toy": {
                "license": "test",
                "splits": {
                    "train": {"url": file_server.url("/missing.json"), "sha256": "0" * 64}
                },
            }
        }
        monkeypatch.setattr(datasets, "_manifest", lambda: manifest)
        with pytest.raises(TransportError):
            fetch_dataset("toy", "train", tmp_path)

    def test_connection_failure_is_transport_error(self, monkeypatch, tmp_path):
        manifest = {
            "toy": {
                "license": "test",
                "splits": {
                    # a port nothing listens on
                    "train": {"url": "http://127.0.0.1:9/corpus.json", "sha256": "0" * 64}
                },
            }
        }
        monkeypatch.setattr(datasets, "_manifest", lambda: manifest)
        with pytest.raises(TransportError):
            fetch_dataset("toy", "train", tmp_path)

    def test_mirror_env_rewrites_github_urls(self, file_server, monkeypatch, tmp_path):
        manifest = {
            "toy": {
                "license": "test",
                "splits": {
                    "train": {
                        "url": "https://github.com/org/repo/raw/main/corpus.json",
                        "sha256": hashlib.sha256(DOC).hexdigest(),
                    }
                },
            }
        }
        monkeypatch.setattr(datasets, "_manifest", lambda: manifest)
        file_server.files["/mirror/org/repo/raw/main/corpus.json"] = DOC
        monkeypatch.setenv(datasets.MIRROR_ENV, file_server.url("/mirror"))
        path = fetch_dataset("toy", "train", tmp_path)
        assert path.read_bytes() == DOC
        assert file_server.requests == ["/mirror/org/repo/raw/main/corpus.json"]

    def test_mirror_env_ignores_other_hosts(self, patched_manifest, file_server, monkeypatch, tmp_path):
        monkeypatch.setenv(datasets.MIRROR_ENV, "http://127.0.0.1:9/unused")
        path = fetch_dataset("toy", "train", tmp_path)
        assert path.read_bytes() == DOC

    def test_load_dataset_parses(self, patched_manifest, tmp_path):
        corpus = load_dataset("toy", "train", tmp_path)
        assert corpus.articles[0].paragraphs[0].qas[0].id == "q1"


class TestManifest:
    def test_known_datasets(self):
        known = available_datasets()
        assert known == {
            "tquad1": ["train", "val"],
            "tquad2": ["train", "val"],
            "xquad.tr": ["val"],
        }

    def test_entries_are_well_formed(self):
        for name, entry in datasets._manifest().items():
            assert entry["license"]
            for split, spec in entry["splits"].items():
                assert spec["url"].startswith("https://"), (name, split)
                assert len(spec["sha256"]) == 64
                int(spec["sha256"], 16)

    def test_cache_dir_env_override(self, monkeypatch, tmp_path):
        monkeypatch.setenv(datasets.CACHE_ENV, str(tmp_path / "elsewhere"))
        assert default_cache_dir() == tmp_path / "elsewhere"
