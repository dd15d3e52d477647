#!/usr/bin/env python3
# Copyright 2026 The ERAlign Authors.
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     https://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

"""Test double for the stdio JSON-lines scorer worker.

Modes:
  normal        score = shared-prefix length / longer length (1.0 if equal)
  shuffle       like normal, but replies to buffered requests in reverse
  die-after N   exits without answering after N replies
  error-at N    answers request number N with an error object
  no-ready      exits before the ready line
"""

import json
import select
import sys


def score(a, b):
    if a == b:
        return 1.0
    n = 0
    for x, y in zip(a, b):
        if x != y:
            break
        n += 1
    return n / max(len(a), len(b), 1)


def reply(obj):
    sys.stdout.write(json.dumps(obj) + "\n")
    sys.stdout.flush()


def main():
    mode = sys.argv[1] if len(sys.argv) > 1 else "normal"
    arg = int(sys.argv[2]) if len(sys.argv) > 2 else 0
    if mode == "no-ready":
        return
    reply({"ready": True})
    answered = 0
    pending = []
    stdin = sys.stdin
    while True:
        line = stdin.readline()
        if not line:
            break
        try:
            req = json.loads(line)
        except ValueError:
            reply({"id": None, "error": "malformed request"})
            continue
        if mode == "die-after" and answered >= arg:
            sys.exit(1)
        if mode == "error-at" and answered == arg:
            reply({"id": req["id"], "error": "boom"})
            answered += 1
            continue
        if mode == "shuffle":
            pending.append(req)
            ready, _, _ = select.select([stdin], [], [], 0.005)
            if len(pending) < 7 and ready:
                continue
            for r in reversed(pending):
                reply({"id": r["id"], "score": score(r["a"], r["b"])})
            answered += len(pending)
            pending = []
            continue
        reply({"id": req["id"], "score": score(req["a"], req["b"])})
        answered += 1


if __name__ == "__main__":
    main()
