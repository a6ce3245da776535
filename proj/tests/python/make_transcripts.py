# Copyright 2026 The WorldGauge Authors.
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

"""Regenerate the golden bridge transcripts from request scripts.

Usage: make_transcripts.py BRIDGE_BINARY OUTPUT_DIR

Each transcript starts with "# server: ARGS" naming the worldgauge-bridge
arguments, followed by alternating "> request" and "< response" lines.
Review the diff before committing regenerated files.
"""

import json
import subprocess
import sys
from pathlib import Path

C4 = [str(c) for c in range(1, 8)]
SEATING = (
    [f"seat({p},{s})" for p in "ABC" for s in (1, 2, 3)]
    + [f"dist({a},{b},{d})" for a, b in (("A", "B"), ("A", "C"), ("B", "C")) for d in (1, 2)]
)


def hello(i, alphabet, version="wgv1"):
    return {"id": i, "op": "hello", "version": version, "alphabet": alphabet}


def nd(i, prefix):
    return {"id": i, "op": "next_dist", "prefix": prefix}


def acc(i, prefix, suffix):
    return {"id": i, "op": "accepts", "prefix": prefix, "suffix": suffix}


def bye(i):
    return {"id": i, "op": "bye"}


def line(msg):
    return msg if isinstance(msg, str) else json.dumps(msg, separators=(",", ":"))


SCRIPTS = {
    "handshake": (
        ["--world", "connect4", "--size", "1", "--model", "uniform"],
        [hello(1, C4), bye(2)],
    ),
    "uniform_next_dist": (
        ["--world", "connect4", "--size", "2", "--model", "uniform"],
        [hello(1, C4), nd(2, []), nd(3, [0, 0]), nd(4, [0, 0, 0]), bye(5)],
    ),
    "exact_connect4": (
        ["--world", "connect4", "--size", "2", "--model", "exact", "--judge-rule", "epsilon=0.01"],
        [
            hello(1, C4),
            nd(2, []),
            nd(3, [0, 0]),
            nd(4, [0, 0, 0]),
            acc(5, [0, 0], [0]),
            acc(6, [], [0, 0]),
            acc(7, [0], [1, 1, 1]),
            bye(8),
        ],
    ),
    "batch": (
        ["--world", "connect4", "--size", "1", "--model", "exact", "--judge-rule", "epsilon=0.01"],
        [
            hello(1, C4),
            {
                "id": 2,
                "op": "batch",
                "requests": [
                    {"op": "next_dist", "prefix": [0]},
                    {"op": "accepts", "prefix": [0], "suffix": [0]},
                    {"op": "next_dist", "prefix": [9]},
                    {"op": "accepts", "prefix": [], "suffix": []},
                    {"op": "accepts", "prefix": [], "suffix": [6]},
                ],
            },
            {"id": 3, "op": "batch", "requests": []},
            bye(4),
        ],
    ),
    "errors": (
        ["--world", "connect4", "--size", "1", "--model", "uniform"],
        [
            nd(1, []),
            "this is not json",
            '{"op":"bye"}',
            '{"id":2,"op":"teleport"}',
            hello(3, C4, version="wgv0"),
            hello(4, C4[:6]),
            hello(5, C4),
            '{"id":6,"op":"next_dist","prefix":[-1]}',
            '{"id":7,"op":"next_dist"}',
            '{"id":11,"op":"next_dist","prefix":[1e999]}',
            acc(8, [], [0]),
            {"id": 9, "op": "batch", "requests": [{"op": "next_dist", "prefix": []}] * 65},
            bye(10),
        ],
    ),
    "judge_only_seating": (
        ["--world", "seating", "--size", "3", "--model", "exact-judge"],
        [
            hello(1, SEATING),
            acc(2, [0], [4]),
            acc(3, [0], [3]),
            acc(4, [0, 4], [11]),
            acc(5, [9], [12]),
            nd(6, []),
            bye(7),
        ],
    ),
}


def main() -> int:
    binary, out_dir = sys.argv[1], Path(sys.argv[2])
    out_dir.mkdir(parents=True, exist_ok=True)
    for name, (args, requests) in SCRIPTS.items():
        lines = [line(r) for r in requests]
        proc = subprocess.run(
            [binary, *args], input="\n".join(lines) + "\n", capture_output=True, text=True, check=True
        )
        replies = proc.stdout.splitlines()
        if len(replies) != len(lines):
            print(f"{name}: {len(lines)} requests but {len(replies)} replies", file=sys.stderr)
            return 1
        body = [f"# server: {' '.join(args)}"]
        for req, rep in zip(lines, replies):
            body += [f"> {req}", f"< {rep}"]
        (out_dir / f"{name}.transcript").write_text("\n".join(body) + "\n", encoding="utf-8")
    return 0


if __name__ == "__main__":
    sys.exit(main())
