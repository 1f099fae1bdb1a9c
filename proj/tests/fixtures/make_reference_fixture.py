#!/usr/bin/env python3
# Copyright 2026 The w2v Authors
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

"""Writes vector files laid out exactly as the classic word2vec C tool
writes them, plus the expected nearest-neighbour rankings.

Binary: "V D\\n", then per word "<word> " + D little-endian float32 + "\\n".
Text:   "V D\\n", then per word "<word> " + ("%lf " per value) + "\\n"
        (note the trailing space and six decimals).
The vocabulary starts with the "</s>" sentence token, as the tool's does.

Rankings are computed here in float64 from the values each file holds,
independently of the library under test. The script refuses seeds whose
rankings contain near-ties that float32 search could legitimately reorder.
"""

import json
import pathlib
import struct

import numpy as np

HERE = pathlib.Path(__file__).resolve().parent
WORDS = ["</s>", "the", "of", "and", "king", "queen", "man", "woman", "paris", "france",
         "rome", "italy", "dog", "cat", "puppy", "kitten", "big", "bigger", "small", "smaller",
         "run", "running", "walk", "walking", "red", "green", "blue", "one", "two", "three"]
PROBES = ["king", "woman", "paris", "italy", "dog", "kitten", "bigger", "walk", "green", "two"]
DIM = 24
TOP_K = 5
MIN_GAP = 1e-4


def write_binary(path, words, vecs):
    with open(path, "wb") as f:
        f.write(b"%d %d\n" % vecs.shape)
        for w, v in zip(words, vecs):
            f.write(w.encode("utf-8") + b" ")
            f.write(struct.pack("<%df" % len(v), *v))
            f.write(b"\n")


def write_text(path, words, vecs):
    with open(path, "wb") as f:
        f.write(b"%d %d\n" % vecs.shape)
        for w, v in zip(words, vecs):
            f.write(w.encode("utf-8") + b" ")
            f.write("".join("%f " % float(x) for x in v).encode("ascii"))
            f.write(b"\n")


def rankings(words, vecs):
    m = vecs.astype(np.float64)
    m /= np.linalg.norm(m, axis=1, keepdims=True)
    out = {}
    ok = True
    for p in PROBES:
        i = words.index(p)
        cos = m @ m[i]
        cos[i] = -np.inf
        order = sorted(range(len(words)), key=lambda j: (-cos[j], j))[: TOP_K + 1]
        gaps = np.diff([-cos[j] for j in order])
        ok &= bool(np.all(gaps > MIN_GAP))
        out[p] = [words[j] for j in order[:TOP_K]]
    return out, ok


def main():
    seed = 0
    while True:
        rng = np.random.default_rng(seed)
        vecs = rng.normal(size=(len(WORDS), DIM)).astype(np.float32)
        text_vecs = np.array([[float("%f" % x) for x in row] for row in vecs], dtype=np.float32)
        bin_rank, ok_b = rankings(WORDS, vecs)
        txt_rank, ok_t = rankings(WORDS, text_vecs)
        if ok_b and ok_t:
            break
        seed += 1
    write_binary(HERE / "reference_vectors.bin", WORDS, vecs)
    write_text(HERE / "reference_vectors.txt", WORDS, vecs)
    with open(HERE / "reference_neighbors.json", "w") as f:
        json.dump({"seed": seed, "k": TOP_K, "binary": bin_rank, "text": txt_rank}, f, indent=1, sort_keys=True)
        f.write("\n")


if __name__ == "__main__":
    main()
