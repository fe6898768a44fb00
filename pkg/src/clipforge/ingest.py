"""Client for the abstract short-video source API.

The real platform API is access-restricted, so the pipeline talks to a
two-endpoint interface (list-by-hashtag with cursor pagination, fetch-media)
that any backend can implement; ``mocksource`` provides an offline one.
Downloads are permission-gated: assets without explicit download permission
never cause a media request.
"""

from __future__ import annotations

import os
import threading
import time
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Callable, Protocol, Sequence

import requests

from .errors import AuthError, SourceError, TransientSourceError, ValidationError
from .model import VideoAsset

TOKEN_ENV = "CLIPFORGE_API_TOKEN"
RETRY_ATTEMPTS = 3


@dataclass(frozen=True, slots=True)
class SourcePage:
    items: tuple[VideoAsset, ...]
    next_cursor: str | None


class SourceClient(Protocol):
    def list_page(self, hashtag: str, cursor: str | None) -> SourcePage: ...

    def fetch_media(self, video_id: str) -> bytes: ...


class RateLimiter:
    """Token bucket shared by all request workers.

    ``clock``/``sleep`` are injectable so tests can run on a fake clock.
    """

    def __init__(self, capacity: float, refill_per_s: float,
                 clock: Callable[[], float] = time.monotonic,
                 sleep: Callable[[float], None] = time.sleep):
        if capacity <= 0 or refill_per_s <= 0:
            raise ValidationError("rate limiter capacity and refill rate must be > 0")
        self.capacity = float(capacity)
        self.refill_per_s = float(refill_per_s)
        self._clock = clock
        self._sleep = sleep
        self._available = float(capacity)
        self._last = clock()
        self._lock = threading.Lock()

    def _refill_locked(self) -> None:
        now = self._clock()
        self._available = min(self.capacity,
                              self._available + (now - self._last) * self.refill_per_s)
        self._last = now

    @property
    def available(self) -> float:
        with self._lock:
            self._refill_locked()
            return self._available

    def acquire(self, n: float = 1.0) -> None:
        """Block until n tokens are available, then deduct them atomically."""
        if n > self.capacity:
            raise ValidationError(f"cannot acquire {n} tokens from capacity {self.capacity}")
        if n < 0:
            raise ValidationError("token count must be >= 0")
        while True:
            with self._lock:
                self._refill_locked()
                if self._available >= n:
                    self._available -= n
                    return
                wait = (n - self._available) / self.refill_per_s
            # floor the wait so float dust cannot stall an injected fake clock
            self._sleep(max(wait, 1e-6))


def _with_retries(op: Callable[[], object], what: str,
                  attempts: int = RETRY_ATTEMPTS,
                  backoff_s: float = 0.1,
                  sleep: Callable[[float], None] = time.sleep):
    last: Exception | None = None
    for attempt in range(attempts):
        try:
            return op()
        except TransientSourceError as exc:
            last = exc
            if attempt + 1 < attempts:
                sleep(backoff_s * (2 ** attempt))
    raise SourceError(f"{what} failed after {attempts} attempts: {last}") from last


def list_videos(hashtag: str, cap: int, client: SourceClient,
                sleep: Callable[[float], None] = time.sleep) -> list[VideoAsset]:
    """Up to ``cap`` assets for one hashtag, following pagination cursors."""
    if cap < 1:
        raise ValidationError("cap must be >= 1")
    assets: list[VideoAsset] = []
    seen: set[str] = set()
    cursor: str | None = None
    while len(assets) < cap:
        page = _with_retries(
            lambda: client.list_page(hashtag, cursor),
            f"list_page({hashtag!r}, cursor={cursor!r})",
            sleep=sleep,
        )
        for asset in page.items:
            if asset.video_id in seen:
                continue
            seen.add(asset.video_id)
            assets.append(asset)
            if len(assets) >= cap:
                break
        if page.next_cursor is None:
            break
        cursor = page.next_cursor
    return assets


def download_if_permitted(asset: VideoAsset, client: SourceClient,
                          media_dir: str | Path,
                          sleep: Callable[[float], None] = time.sleep) -> Path | None:
    """Fetch the asset's media only when download permission was granted.

    Returns the media file path, or None for a permission skip. Skips issue
    zero media requests.
    """
    if not asset.download_permitted:
        return None
    blob = _with_retries(
        lambda: client.fetch_media(asset.video_id),
        f"fetch_media({asset.video_id!r})",
        sleep=sleep,
    )
    media_dir = Path(media_dir)
    media_dir.mkdir(parents=True, exist_ok=True)
    dest = media_dir / f"{asset.video_id}.crv"
    dest.write_bytes(blob)
    return dest


def fetch_hashtag(hashtag: str, cap: int, client: SourceClient,
                  media_dir: str | Path,
                  sleep: Callable[[float], None] = time.sleep) -> list[tuple[VideoAsset, Path | None]]:
    """List one hashtag and download its permitted assets sequentially."""
    out = []
    for asset in list_videos(hashtag, cap, client, sleep=sleep):
        media = download_if_permitted(asset, client, media_dir, sleep=sleep)
        out.append((asset, media))
    return out


def _parse_asset_record(obj: dict) -> VideoAsset:
    try:
        return VideoAsset(
            video_id=str(obj["video_id"]),
            hashtag=str(obj["hashtag"]),
            duration_s=float(obj["duration_s"]),
            frame_rate=float(obj["frame_rate"]),
            media_path="",
            download_permitted=bool(obj["download_permitted"]),
            source_meta={str(k): str(v) for k, v in obj.get("meta", {}).items()},
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise SourceError(f"bad asset record from source: {exc}") from exc


class HttpSourceClient:
    """Talks to a source server over HTTP; auth token from CLIPFORGE_API_TOKEN."""

    def __init__(self, base_url: str, limiter: RateLimiter | None = None,
                 timeout_s: float = 30.0):
        self.base_url = base_url.rstrip("/")
        self.limiter = limiter
        self.timeout_s = timeout_s
        self._session = requests.Session()
        token = os.environ.get(TOKEN_ENV)
        if token:
            self._session.headers["Authorization"] = f"Bearer {token}"

    def _get(self, path: str, params: dict | None = None) -> requests.Response:
        if self.limiter is not None:
            self.limiter.acquire(1)
        try:
            resp = self._session.get(self.base_url + path, params=params,
                                     timeout=self.timeout_s)
        except requests.RequestException as exc:
            raise TransientSourceError(f"request to {path} failed: {exc}") from exc
        if resp.status_code in (401, 403):
            raise AuthError(f"source rejected credentials ({resp.status_code})")
        if resp.status_code >= 500:
            raise TransientSourceError(f"source returned {resp.status_code} for {path}")
        if resp.status_code != 200:
            raise TransientSourceError(f"source returned {resp.status_code} for {path}")
        return resp

    def list_page(self, hashtag: str, cursor: str | None) -> SourcePage:
        params = {"hashtag": hashtag}
        if cursor is not None:
            params["cursor"] = cursor
        data = self._get("/videos", params).json()
        items = tuple(_parse_asset_record(rec) for rec in data.get("items", []))
        return SourcePage(items=items, next_cursor=data.get("next_cursor"))

    def fetch_media(self, video_id: str) -> bytes:
        return self._get(f"/media/{video_id}").content


def relativize_media_path(media_file: Path | None, manifest_dir: Path) -> str:
    """Media paths are stored relative to the manifest so reruns into
    different directories stay byte-identical."""
    if media_file is None:
        return ""
    return os.path.relpath(media_file, manifest_dir)


def with_media_path(asset: VideoAsset, media_path: str) -> VideoAsset:
    return replace(asset, media_path=media_path)


def ingest_hashtags(tags: Sequence[str], client: SourceClient, cap: int,
                    media_dir: Path, manifest_dir: Path, workers: int = 4,
                    sleep: Callable[[float], None] = time.sleep) -> list[VideoAsset]:
    """Fetch all hashtags concurrently; result sorted by video_id."""
    from concurrent.futures import ThreadPoolExecutor

    def job(tag: str) -> list[tuple[VideoAsset, Path | None]]:
        return fetch_hashtag(tag, cap, client, media_dir, sleep=sleep)

    results: list[VideoAsset] = []
    with ThreadPoolExecutor(max_workers=max(1, workers)) as pool:
        for pairs in pool.map(job, tags):
            for asset, media in pairs:
                results.append(
                    with_media_path(asset, relativize_media_path(media, manifest_dir))
                )
    results.sort(key=lambda a: a.video_id)
    return results
