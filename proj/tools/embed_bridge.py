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


"""Sentence-embedding bridge for eralign.

  export  encode a `<id><TAB><name>` file into an EMB1 matrix (row i = i-th
          line), rows unit-normalised
  serve   long-running similarity worker speaking the newline-delimited JSON
          protocol of `verify.scorer = process`

Model identifiers are passed to sentence-transformers unchanged. The builtin
identifier `hashed-trigram` needs no download and is meant for smoke tests.
"""

import argparse
import hashlib
import json
import struct
import sys

import numpy as np

HASHED = "hashed-trigram"
HASHED_DIM = 256


def surface_name(name):
    """URIs reduce to their last path segment with underscores as spaces."""
    if "://" not in name:
        return name
    name = name.rstrip("/")
    return name.rsplit("/", 1)[-1].replace("_", " ")


class HashedTrigramEncoder:
    """Character trigrams hashed into a fixed number of buckets."""

    dim = HASHED_DIM

    def encode(self, texts):
        out = np.zeros((len(texts), self.dim), dtype=np.float32)
        for row, text in enumerate(texts):
            padded = "  " + text.lower() + " "
            for k in range(len(padded) - 2):
                digest = hashlib.blake2b(padded[k:k + 3].encode(), digest_size=4).digest()
                out[row, int.from_bytes(digest, "little") % self.dim] += 1.0
        return out


class SentenceTransformerEncoder:
    def __init__(self, model, batch_size):
        from sentence_transformers import SentenceTransformer

        self.model = SentenceTransformer(model)
        self.batch_size = batch_size
        self.dim = self.model.get_sentence_embedding_dimension()

    def encode(self, texts):
        return np.asarray(
            self.model.encode(texts, batch_size=self.batch_size, show_progress_bar=False),
            dtype=np.float32)


def make_encoder(model, batch_size=64):
    if model == HASHED:
        return HashedTrigramEncoder()
    return SentenceTransformerEncoder(model, batch_size)


def normalise(rows):
    norms = np.linalg.norm(rows, axis=1, keepdims=True)
    return np.where(norms > 0, rows / np.where(norms > 0, norms, 1), rows).astype(np.float32)


def read_names(path):
    names = []
    with open(path, encoding="utf-8") as f:
        for line_no, line in enumerate(f, 1):
            line = line.rstrip("\r\n")
            if not line:
                continue
            if "\t" not in line:
                raise SystemExit(f"{path}:{line_no}: expected <id><TAB><name>")
            names.append(surface_name(line.split("\t", 1)[1]))
    return names


def write_emb1(path, rows):
    rows = np.ascontiguousarray(rows, dtype="<f4")
    with open(path, "wb") as f:
        f.write(b"EMB1")
        f.write(struct.pack("<II", rows.shape[0], rows.shape[1]))
        f.write(rows.tobytes())


def export(args):
    names = read_names(args.names)
    encoder = make_encoder(args.model, args.batch_size)
    rows = np.zeros((len(names), encoder.dim), dtype=np.float32)
    for start in range(0, len(names), args.batch_size):
        batch = names[start:start + args.batch_size]
        try:
            rows[start:start + len(batch)] = encoder.encode(batch)
        except Exception as e:  # report the first row of the failing batch
            raise SystemExit(f"encoding failed at row {start}: {e}")
    if not np.all(np.isfinite(rows)):
        raise SystemExit("encoder produced non-finite values")
    write_emb1(args.out, normalise(rows))


def reply(obj):
    sys.stdout.write(json.dumps(obj) + "\n")
    sys.stdout.flush()


def serve(args):
    encoder = make_encoder(args.model, args.batch_size)
    reply({"ready": True})
    for line in sys.stdin:
        rid = None
        try:
            req = json.loads(line)
            if isinstance(req, dict):
                rid = req.get("id")
            a, b = normalise(encoder.encode([str(req["a"]), str(req["b"])]))
            reply({"id": rid, "score": float(np.dot(a, b))})
        except Exception as e:
            reply({"id": rid, "error": f"malformed request: {e}"})


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    p = sub.add_parser("export", help="write an EMB1 matrix for a name file")
    p.add_argument("--names", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--model", default="sentence-transformers/LaBSE")
    p.add_argument("--batch-size", type=int, default=64)
    p.set_defaults(run=export)
    s = sub.add_parser("serve", help="run the similarity worker on stdin/stdout")
    s.add_argument("--model", default="sentence-transformers/all-MiniLM-L6-v2")
    s.add_argument("--batch-size", type=int, default=64)
    s.set_defaults(run=serve)
    args = parser.parse_args()
    args.run(args)


if __name__ == "__main__":
    main()
