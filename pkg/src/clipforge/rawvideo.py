"""Raw planar-RGB frame dumps: the decoded-frame interchange format.

Two on-disk flavors are accepted:

* **Container** (``.crv``): first line ``CRV1 <json-header>``, then the raw
  bytes of all frames, each frame stored planar (R plane, G plane, B plane,
   8 bits per sample, row-major).
* **Sidecar**: a bare frame dump plus ``<path>.json`` holding the same
  header fields.

Header fields: ``width``, ``height``, ``frame_rate`` (required); ``frames``
(exact frame count) and ``duration_s`` optional. When ``frames`` is absent
the count must be estimated from duration and rate.

Real codecs are out of scope: anything that is not already a frame dump is
decoded by an external command template (config key ``decoder_cmd``) that
must emit a CRV1 stream on stdout.
"""

from __future__ import annotations

import json
import shlex
import subprocess
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import MediaError

MAGIC = b"CRV1 "


@dataclass(frozen=True)
class RawVideoInfo:
    width: int
    height: int
    frame_rate: float
    frame_count: int | None
    duration_s: float | None

    @property
    def frame_bytes(self) -> int:
        return 3 * self.width * self.height


def _info_from_header(obj: dict, origin: str) -> RawVideoInfo:
    try:
        info = RawVideoInfo(
            width=int(obj["width"]),
            height=int(obj["height"]),
            frame_rate=float(obj["frame_rate"]),
            frame_count=int(obj["frames"]) if "frames" in obj else None,
            duration_s=float(obj["duration_s"]) if "duration_s" in obj else None,
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise MediaError(f"{origin}: bad raw-video header ({exc})") from exc
    if info.width <= 0 or info.height <= 0 or info.frame_rate <= 0:
        raise MediaError(f"{origin}: non-positive dimensions or frame rate")
    return info


def read_header(path: str | Path) -> tuple[RawVideoInfo, int]:
    """Return (info, byte offset of frame data) for either on-disk flavor."""
    path = Path(path)
    try:
        with path.open("rb") as fh:
            prefix = fh.read(len(MAGIC))
            if prefix == MAGIC:
                header_line = fh.readline()
                try:
                    obj = json.loads(header_line.decode("utf-8"))
                except (UnicodeDecodeError, json.JSONDecodeError) as exc:
                    raise MediaError(f"{path}: unparsable CRV1 header") from exc
                return _info_from_header(obj, str(path)), len(MAGIC) + len(header_line)
    except OSError as exc:
        raise MediaError(f"cannot read media {path}: {exc}") from exc

    sidecar = path.with_name(path.name + ".json")
    try:
        obj = json.loads(sidecar.read_text(encoding="utf-8"))
    except OSError as exc:
        raise MediaError(
            f"{path}: no CRV1 magic and no sidecar header {sidecar.name}"
        ) from exc
    except json.JSONDecodeError as exc:
        raise MediaError(f"{sidecar}: unparsable sidecar header") from exc
    return _info_from_header(obj, str(sidecar)), 0


def read_frames(path: str | Path, indices: list[int] | None = None) -> np.ndarray:
    """Load frames as a uint8 array of shape (n, 3, height, width).

    ``indices`` selects specific frames (ascending); default is all frames.
    """
    path = Path(path)
    info, offset = read_header(path)
    size = path.stat().st_size - offset
    if size % info.frame_bytes:
        raise MediaError(f"{path}: frame data is not a whole number of frames")
    total = size // info.frame_bytes
    if info.frame_count is not None and info.frame_count != total:
        raise MediaError(
            f"{path}: header declares {info.frame_count} frames, file holds {total}"
        )

    with path.open("rb") as fh:
        if indices is None:
            fh.seek(offset)
            data = np.frombuffer(fh.read(total * info.frame_bytes), dtype=np.uint8)
            return data.reshape(total, 3, info.height, info.width).copy()
        out = np.empty((len(indices), 3, info.height, info.width), dtype=np.uint8)
        for row, idx in enumerate(indices):
            if not 0 <= idx < total:
                raise MediaError(f"{path}: frame index {idx} out of range [0, {total})")
            fh.seek(offset + idx * info.frame_bytes)
            chunk = np.frombuffer(fh.read(info.frame_bytes), dtype=np.uint8)
            out[row] = chunk.reshape(3, info.height, info.width)
        return out


def iter_frame_blocks(path: str | Path, block: int = 256):
    """Yield (start_index, frames) blocks so whole videos never sit in memory."""
    path = Path(path)
    info, offset = read_header(path)
    size = path.stat().st_size - offset
    if size % info.frame_bytes:
        raise MediaError(f"{path}: frame data is not a whole number of frames")
    total = size // info.frame_bytes
    with path.open("rb") as fh:
        fh.seek(offset)
        start = 0
        while start < total:
            n = min(block, total - start)
            data = np.frombuffer(fh.read(n * info.frame_bytes), dtype=np.uint8)
            yield start, data.reshape(n, 3, info.height, info.width)
            start += n


def crv_bytes(frames: np.ndarray, frame_rate: float, declare_count: bool = True) -> bytes:
    """Serialize frames (n, 3, h, w) uint8 into a CRV1 container."""
    if frames.ndim != 4 or frames.shape[1] != 3 or frames.dtype != np.uint8:
        raise MediaError("frames must be a uint8 array of shape (n, 3, h, w)")
    n, _, h, w = frames.shape
    header = {"width": w, "height": h, "frame_rate": frame_rate}
    if declare_count:
        header["frames"] = n
    header["duration_s"] = n / frame_rate
    line = json.dumps(header, sort_keys=True, separators=(",", ":"))
    return MAGIC + line.encode() + b"\n" + np.ascontiguousarray(frames).tobytes()


def write_crv(path: str | Path, frames: np.ndarray, frame_rate: float,
              declare_count: bool = True) -> None:
    Path(path).write_bytes(crv_bytes(frames, frame_rate, declare_count))


def decode_with_command(template: str, media_path: str | Path, dest: str | Path) -> Path:
    """Run the decoder command template and capture its CRV1 stdout to ``dest``.

    The template gets ``{input}`` substituted; e.g.
    ``mydecoder --raw {input}``.
    """
    if not template:
        raise MediaError(f"{media_path}: not a raw frame dump and no decoder_cmd configured")
    argv = [part.format(input=str(media_path)) for part in shlex.split(template)]
    dest = Path(dest)
    try:
        result = subprocess.run(argv, capture_output=True, timeout=300)
    except (OSError, subprocess.TimeoutExpired) as exc:
        raise MediaError(f"decoder command failed for {media_path}: {exc}") from exc
    if result.returncode != 0:
        tail = result.stderr.decode(errors="replace")[-500:]
        raise MediaError(f"decoder exited {result.returncode} for {media_path}: {tail}")
    if not result.stdout.startswith(MAGIC):
        raise MediaError(f"decoder output for {media_path} is not a CRV1 stream")
    dest.write_bytes(result.stdout)
    return dest
