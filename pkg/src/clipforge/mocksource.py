"""Offline mock of the source API, seeded from a fixture directory.

Fixture layout::

    fixture_dir/
      assets.jsonl          # one asset record per line
      media/<video_id>.crv  # media blob per downloadable asset

The in-process :class:`MockSource` implements the client interface directly
and records every request, so tests can assert that permission-skipped
assets never triggered a media fetch. ``serve_http`` wraps the same fixture
in a real HTTP server for end-to-end client tests.
"""

from __future__ import annotations

import json
import threading
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer
from pathlib import Path
from urllib.parse import parse_qs, urlparse

from .errors import AuthError, SourceError, TransientSourceError
from .ingest import SourcePage, _parse_asset_record
from .model import VideoAsset

DEFAULT_PAGE_SIZE = 100


def load_fixture_assets(fixture_dir: str | Path) -> list[VideoAsset]:
    path = Path(fixture_dir) / "assets.jsonl"
    try:
        lines = path.read_text(encoding="utf-8").splitlines()
    except OSError as exc:
        raise SourceError(f"cannot read fixture assets {path}: {exc}") from exc
    assets = []
    for lineno, line in enumerate(lines, start=1):
        if not line.strip():
            continue
        try:
            assets.append(_parse_asset_record(json.loads(line)))
        except json.JSONDecodeError as exc:
            raise SourceError(f"{path} line {lineno}: not valid JSON") from exc
    return assets


class MockSource:
    """In-process source backend with a request log and scriptable failures.

    ``fail_plan`` maps an endpoint key (e.g. ``("videos", "piano", 1)`` for
    page 1 of a hashtag listing, or ``("media", video_id)``) to a number of
    times that request should fail transiently before succeeding.
    """

    def __init__(self, fixture_dir: str | Path, page_size: int = DEFAULT_PAGE_SIZE,
                 token: str | None = None,
                 fail_plan: dict[tuple, int] | None = None):
        self.fixture_dir = Path(fixture_dir)
        self.page_size = page_size
        self.token = token
        self.fail_plan = dict(fail_plan or {})
        self.request_log: list[tuple] = []
        self._lock = threading.Lock()
        self._by_tag: dict[str, list[VideoAsset]] = {}
        for asset in sorted(load_fixture_assets(fixture_dir), key=lambda a: a.video_id):
            self._by_tag.setdefault(asset.hashtag, []).append(asset)

    def _check_fail(self, key: tuple) -> None:
        with self._lock:
            remaining = self.fail_plan.get(key, 0)
            if remaining > 0:
                self.fail_plan[key] = remaining - 1
                raise TransientSourceError(f"scripted failure for {key}")

    def _log(self, *entry) -> None:
        with self._lock:
            self.request_log.append(entry)

    def media_requests(self) -> list[str]:
        with self._lock:
            return [e[1] for e in self.request_log if e[0] == "media"]

    def list_page(self, hashtag: str, cursor: str | None) -> SourcePage:
        page_no = int(cursor) if cursor else 0
        self._log("videos", hashtag, page_no)
        self._check_fail(("videos", hashtag, page_no))
        assets = self._by_tag.get(hashtag, [])
        start = page_no * self.page_size
        chunk = assets[start:start + self.page_size]
        next_cursor = str(page_no + 1) if start + self.page_size < len(assets) else None
        return SourcePage(items=tuple(chunk), next_cursor=next_cursor)

    def fetch_media(self, video_id: str) -> bytes:
        self._log("media", video_id)
        self._check_fail(("media", video_id))
        blob = self.fixture_dir / "media" / f"{video_id}.crv"
        if not blob.exists():
            raise TransientSourceError(f"no media for {video_id} (404)")
        return blob.read_bytes()


class _Handler(BaseHTTPRequestHandler):
    source: MockSource  # set by serve_http

    def log_message(self, *args):  # silence default stderr chatter
        pass

    def _reject(self, code: int, message: str):
        body = json.dumps({"error": message}).encode()
        self.send_response(code)
        self.send_header("Content-Type", "application/json")
        self.send_header("Content-Length", str(len(body)))
        self.end_headers()
        self.wfile.write(body)

    def do_GET(self):
        if self.source.token is not None:
            supplied = self.headers.get("Authorization", "")
            if supplied != f"Bearer {self.source.token}":
                return self._reject(401, "bad or missing token")
        parsed = urlparse(self.path)
        try:
            if parsed.path == "/videos":
                qs = parse_qs(parsed.query)
                hashtag = qs.get("hashtag", [""])[0]
                cursor = qs.get("cursor", [None])[0]
                page = self.source.list_page(hashtag, cursor)
                body = json.dumps({
                    "items": [_asset_record(a) for a in page.items],
                    "next_cursor": page.next_cursor,
                }).encode()
                self.send_response(200)
                self.send_header("Content-Type", "application/json")
                self.send_header("Content-Length", str(len(body)))
                self.end_headers()
                self.wfile.write(body)
            elif parsed.path.startswith("/media/"):
                blob = self.source.fetch_media(parsed.path[len("/media/"):])
                self.send_response(200)
                self.send_header("Content-Type", "application/octet-stream")
                self.send_header("Content-Length", str(len(blob)))
                self.end_headers()
                self.wfile.write(blob)
            else:
                self._reject(404, "unknown endpoint")
        except TransientSourceError as exc:
            self._reject(500, str(exc))
        except AuthError as exc:
            self._reject(401, str(exc))


def _asset_record(asset: VideoAsset) -> dict:
    return {
        "video_id": asset.video_id,
        "hashtag": asset.hashtag,
        "duration_s": asset.duration_s,
        "frame_rate": asset.frame_rate,
        "download_permitted": asset.download_permitted,
        "meta": dict(asset.source_meta),
    }


def serve_http(source: MockSource, port: int = 0) -> tuple[ThreadingHTTPServer, int]:
    """Start the fixture server on a background thread; returns (server, port)."""
    handler = type("BoundHandler", (_Handler,), {"source": source})
    server = ThreadingHTTPServer(("127.0.0.1", port), handler)
    thread = threading.Thread(target=server.serve_forever, daemon=True)
    thread.start()
    return server, server.server_address[1]
