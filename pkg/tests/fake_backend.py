"""Scriptable detector backend for protocol tests.

Modes:
  ok            handshake, then empty boxes for every request
  person        handshake, then one person box (score 0.9) per request
  bare-ready    answers handshake with a bare "READY" (no model name)
  silent        never answers anything
  swap-pairs    answers requests two at a time in reversed order
  crash-after N answers N requests then exits without warning
  orphan        answers with an unknown request id
  error-field   answers with an "error" field and empty boxes
"""

import json
import sys


def say(obj):
    sys.stdout.write(json.dumps(obj) + "\n")
    sys.stdout.flush()


def respond(req, boxes):
    say({"id": req["id"], "boxes": boxes})


PERSON = [{"x": 10, "y": 10, "w": 20, "h": 40, "label": "person", "score": 0.9}]


def main():
    mode = sys.argv[1] if len(sys.argv) > 1 else "ok"
    crash_after = int(sys.argv[2]) if mode == "crash-after" else -1

    line = sys.stdin.readline()
    if mode == "silent":
        sys.stdin.read()
        return 0
    if not line.startswith("HELLO clipforge-detect v1"):
        sys.stdout.write("ERR unexpected greeting\n")
        sys.stdout.flush()
        return 1
    if mode == "bare-ready":
        sys.stdout.write("READY\n")
    else:
        sys.stdout.write("READY fake-backend-1.0\n")
    sys.stdout.flush()

    answered = 0
    held = []
    for line in sys.stdin:
        req = json.loads(line)
        if req.get("op") == "quit":
            return 0
        if mode == "swap-pairs":
            held.append(req)
            if len(held) == 2:
                respond(held[1], [])
                respond(held[0], [])
                held = []
            continue
        if mode == "orphan":
            say({"id": req["id"] + 1000, "boxes": []})
            continue
        if mode == "error-field":
            say({"id": req["id"], "error": "unreadable image", "boxes": []})
            continue
        respond(req, PERSON if mode == "person" else [])
        answered += 1
        if answered == crash_after:
            return 7
    for req in held:
        respond(req, [])
    return 0


if __name__ == "__main__":
    sys.exit(main())
