"""Client side of the detector wire protocol, plus an in-process stub.

Protocol v1, newline-delimited UTF-8 over the backend's stdin/stdout:

* handshake: client sends ``HELLO clipforge-detect v1``, backend answers
  ``READY <model-name>``;
* request: ``{"id": <int>, "op": "detect", "path": "<image path>"}``;
* response: ``{"id": <int>, "boxes": [{"x","y","w","h","label","score"}]}``
  (responses may arrive in any order; the client restores request order);
* shutdown: client sends ``{"op": "quit"}``.

A session is single-owner: one worker issues requests on it at a time.
After a backend crash or timeout the session is dead and every later call
fails fast.
"""

from __future__ import annotations

import json
import logging
import queue
import shlex
import subprocess
import threading
from pathlib import Path
from typing import Mapping, Sequence

from .errors import DeadSessionError, DetectorError, ProtocolError
from .model import DetectionBox, DetectionFrame

log = logging.getLogger(__name__)

HELLO = "HELLO clipforge-detect v1"


def identity_from_path(path: str | Path) -> tuple[str, int]:
    """Derive (video_id, frame_index) from a ``frames/<vid>/<idx>.png`` path."""
    p = Path(path)
    try:
        return p.parent.name, int(p.stem)
    except ValueError as exc:
        raise DetectorError(f"cannot derive frame identity from path {path}") from exc


def _parse_boxes(raw, request_id: int) -> tuple[DetectionBox, ...]:
    try:
        return tuple(
            DetectionBox(
                x=float(b["x"]), y=float(b["y"]), w=float(b["w"]), h=float(b["h"]),
                label=str(b["label"]), score=float(b["score"]),
            )
            for b in raw
        )
    except (TypeError, KeyError, ValueError) as exc:
        raise ProtocolError(f"malformed boxes in response to request {request_id}: {exc}") from exc


class DetectorSession:
    """Base session: request-id bookkeeping and batch ordering."""

    def __init__(self):
        self._next_id = 0
        self.dead = False
        self.model_name = "unknown"

    def _check_alive(self):
        if self.dead:
            raise DeadSessionError("detector session is dead")

    def detect(self, image_paths: Sequence[str | Path]) -> list[DetectionFrame]:
        self._check_alive()
        if not image_paths:
            return []
        ids = []
        for path in image_paths:
            rid = self._next_id
            self._next_id += 1
            ids.append(rid)
            self._send({"id": rid, "op": "detect", "path": str(path)})
        by_id = self._collect(set(ids))
        frames = []
        for rid, path in zip(ids, image_paths):
            raw = by_id[rid]
            if "error" in raw:
                log.warning("detector error for %s: %s", path, raw["error"])
            vid, frame_index = identity_from_path(path)
            frames.append(DetectionFrame(vid, frame_index, _parse_boxes(raw.get("boxes", []), rid)))
        return frames

    def _send(self, message: dict) -> None:
        raise NotImplementedError

    def _collect(self, pending: set[int]) -> dict[int, dict]:
        raise NotImplementedError

    def close(self) -> None:
        pass

    def __enter__(self):
        return self

    def __exit__(self, *exc):
        self.close()


class SubprocessDetectorSession(DetectorSession):
    """Session owning an external backend process."""

    def __init__(self, backend_cmd: str | Sequence[str], timeout_s: float = 30.0):
        super().__init__()
        self.timeout_s = timeout_s
        argv = shlex.split(backend_cmd) if isinstance(backend_cmd, str) else list(backend_cmd)
        try:
            self._proc = subprocess.Popen(
                argv,
                stdin=subprocess.PIPE,
                stdout=subprocess.PIPE,
                stderr=subprocess.PIPE,
                text=True,
                bufsize=1,
            )
        except OSError as exc:
            raise DetectorError(f"cannot spawn detector backend {argv!r}: {exc}") from exc

        self._lines: queue.Queue[str | None] = queue.Queue()
        self._stderr_tail: list[str] = []
        threading.Thread(target=self._pump_stdout, daemon=True).start()
        threading.Thread(target=self._pump_stderr, daemon=True).start()
        self._handshake()

    def _pump_stdout(self):
        for line in self._proc.stdout:
            self._lines.put(line.rstrip("\n"))
        self._lines.put(None)

    def _pump_stderr(self):
        for line in self._proc.stderr:
            self._stderr_tail.append(line.rstrip("\n"))
            del self._stderr_tail[:-20]

    def _die(self, exc: Exception) -> Exception:
        self.dead = True
        if self._proc.poll() is None:
            self._proc.kill()
        return exc

    def _read_line(self) -> str:
        try:
            line = self._lines.get(timeout=self.timeout_s)
        except queue.Empty:
            raise self._die(DetectorError(f"detector backend silent for {self.timeout_s}s"))
        if line is None:
            tail = "; ".join(self._stderr_tail[-3:])
            raise self._die(DetectorError(f"detector backend exited unexpectedly ({tail})"))
        return line

    def _handshake(self):
        self._write_line(HELLO)
        reply = self._read_line()
        parts = reply.split(maxsplit=1)
        if len(parts) != 2 or parts[0] != "READY" or not parts[1].strip():
            raise self._die(ProtocolError(f"bad handshake reply {reply!r}"))
        self.model_name = parts[1].strip()

    def _write_line(self, line: str):
        self._check_alive()
        try:
            self._proc.stdin.write(line + "\n")
            self._proc.stdin.flush()
        except (OSError, ValueError) as exc:
            raise self._die(DetectorError(f"cannot write to detector backend: {exc}"))

    def _send(self, message: dict) -> None:
        self._write_line(json.dumps(message, separators=(",", ":")))

    def _collect(self, pending: set[int]) -> dict[int, dict]:
        out: dict[int, dict] = {}
        while pending:
            line = self._read_line()
            try:
                obj = json.loads(line)
                rid = int(obj["id"])
            except (json.JSONDecodeError, KeyError, TypeError, ValueError):
                raise self._die(ProtocolError(f"malformed response line {line!r}"))
            if rid not in pending:
                raise self._die(ProtocolError(f"orphan response for unknown request id {rid}"))
            pending.discard(rid)
            out[rid] = obj
        return out

    def close(self) -> None:
        if not self.dead and self._proc.poll() is None:
            try:
                self._send({"op": "quit"})
                self._proc.wait(timeout=self.timeout_s)
            except (DetectorError, subprocess.TimeoutExpired):
                self._proc.kill()
        self.dead = True


class StubDetectorSession(DetectorSession):
    """Deterministic in-process detector for tests and offline runs.

    ``spec`` maps frame index -> box list (applies to every video), or
    video_id -> {frame index -> box list}. A box is a DetectionBox or a
    ``[x, y, w, h, label, score]`` list. Frames absent from the spec get no
    boxes.
    """

    DEFAULT_BOX = DetectionBox(x=10.0, y=10.0, w=20.0, h=40.0, label="person", score=0.9)

    def __init__(self, spec: Mapping):
        super().__init__()
        self.model_name = "stub"
        self._per_video: dict[str, dict[int, tuple[DetectionBox, ...]]] = {}
        self._global: dict[int, tuple[DetectionBox, ...]] = {}
        for key, value in spec.items():
            if isinstance(key, str) and not key.lstrip("-").isdigit():
                self._per_video[key] = self._norm_frames(value)
            else:
                self._global[int(key)] = self._norm_boxes(value)
        self._staged: dict[int, dict] = {}

    @classmethod
    def _norm_frames(cls, value) -> dict[int, tuple[DetectionBox, ...]]:
        if isinstance(value, Mapping):
            return {int(k): cls._norm_boxes(v) for k, v in value.items()}
        # bare list of frame indices: one default person box each
        return {int(idx): (cls.DEFAULT_BOX,) for idx in value}

    @staticmethod
    def _norm_boxes(boxes) -> tuple[DetectionBox, ...]:
        out = []
        for b in boxes:
            if isinstance(b, DetectionBox):
                out.append(b)
            else:
                x, y, w, h, label, score = b
                out.append(DetectionBox(float(x), float(y), float(w), float(h),
                                        str(label), float(score)))
        return tuple(out)

    def _boxes_for(self, path: str) -> tuple[DetectionBox, ...]:
        vid, frame_index = identity_from_path(path)
        if vid in self._per_video:
            return self._per_video[vid].get(frame_index, ())
        return self._global.get(frame_index, ())

    def _send(self, message: dict) -> None:
        self._staged[message["id"]] = message

    def _collect(self, pending: set[int]) -> dict[int, dict]:
        out = {}
        for rid in pending:
            path = self._staged.pop(rid)["path"]
            boxes = self._boxes_for(path)
            out[rid] = {
                "id": rid,
                "boxes": [
                    {"x": b.x, "y": b.y, "w": b.w, "h": b.h, "label": b.label, "score": b.score}
                    for b in boxes
                ],
            }
        return out


def open_session(backend_cmd: str | Sequence[str], timeout_s: float = 30.0) -> SubprocessDetectorSession:
    """Spawn a backend and complete the protocol handshake."""
    return SubprocessDetectorSession(backend_cmd, timeout_s=timeout_s)


def stub_detector(spec: Mapping) -> StubDetectorSession:
    """In-process session returning exactly the boxes in ``spec``."""
    return StubDetectorSession(spec)


def detect_batch(session: DetectorSession, image_paths: Sequence[str | Path]) -> list[DetectionFrame]:
    """Detect over a batch; result order always equals request order."""
    return session.detect(image_paths)


def load_stub_spec(path: str | Path) -> dict:
    """Read a stub spec JSON file (see StubDetectorSession for the shape)."""
    try:
        data = json.loads(Path(path).read_text(encoding="utf-8"))
    except OSError as exc:
        raise DetectorError(f"cannot read stub spec {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise DetectorError(f"stub spec {path} is not valid JSON: {exc}") from exc
    if not isinstance(data, dict):
        raise DetectorError("stub spec must be a JSON object")
    return data
