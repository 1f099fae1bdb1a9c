// Copyright 2026 The w2v Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Huffman tree over word counts, used as the hierarchical-softmax output layer.
//
// Conventions (serialized checkpoints depend on them):
//  - the k-th inner node created while merging gets index k, so the root is
//    inner node V-2;
//  - of the two nodes merged, the lighter one is the left child (bit 0) and
//    the other is the right child (bit 1);
//  - on equal weight the node queued first wins, leaves before inner nodes,
//    leaves in ascending count order (reverse vocabulary order);
//  - paths and codes are stored root first: code[j] is the branch taken at
//    inner node path[j].

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include "w2v/corpus.hpp"
#include "w2v/error.hpp"

namespace w2v {

class HuffmanCoding {
 public:
  HuffmanCoding() = default;

  /// Builds from explicit per-word codes and paths (e.g. a loaded checkpoint).
  /// Checks shapes and index ranges; throws FormatError on violations.
  static HuffmanCoding from_codes(const std::vector<std::vector<std::uint8_t>>& codes,
                                  const std::vector<std::vector<std::uint32_t>>& paths) {
    if (codes.size() != paths.size()) throw FormatError("huffman: code/path count mismatch");
    if (codes.size() < 2) throw FormatError("huffman: vocabulary must have at least 2 words");
    HuffmanCoding h;
    h.vocab_size_ = codes.size();
    const auto root = static_cast<std::uint32_t>(h.vocab_size_ - 2);
    h.offsets_.push_back(0);
    for (std::size_t w = 0; w < codes.size(); ++w) {
      if (codes[w].empty() || codes[w].size() != paths[w].size()) {
        throw FormatError("huffman: bad code length for word " + std::to_string(w));
      }
      if (paths[w].front() != root) throw FormatError("huffman: path does not start at root");
      for (std::size_t j = 0; j < codes[w].size(); ++j) {
        if (codes[w][j] > 1 || paths[w][j] > root) {
          throw FormatError("huffman: code bit or node index out of range");
        }
        h.bits_.push_back(codes[w][j]);
        h.nodes_.push_back(paths[w][j]);
      }
      h.offsets_.push_back(h.bits_.size());
    }
    return h;
  }

  std::size_t vocab_size() const noexcept { return vocab_size_; }
  std::size_t inner_count() const noexcept { return vocab_size_ == 0 ? 0 : vocab_size_ - 1; }

  std::span<const std::uint8_t> code(std::size_t w) const {
    return std::span<const std::uint8_t>(bits_).subspan(offsets_[w], offsets_[w + 1] - offsets_[w]);
  }
  std::span<const std::uint32_t> path(std::size_t w) const {
    return std::span<const std::uint32_t>(nodes_).subspan(offsets_[w], offsets_[w + 1] - offsets_[w]);
  }
  std::size_t code_length(std::size_t w) const { return offsets_[w + 1] - offsets_[w]; }

  std::size_t max_code_length() const {
    std::size_t m = 0;
    for (std::size_t w = 0; w < vocab_size_; ++w) m = std::max(m, code_length(w));
    return m;
  }

  bool operator==(const HuffmanCoding&) const = default;

 private:
  friend HuffmanCoding build_huffman(std::span<const std::uint64_t> counts);

  std::size_t vocab_size_ = 0;
  std::vector<std::uint8_t> bits_;
  std::vector<std::uint32_t> nodes_;
  std::vector<std::size_t> offsets_;
};

/// Two-queue linear merge over leaves sorted by ascending count.
inline HuffmanCoding build_huffman(std::span<const std::uint64_t> counts) {
  const std::size_t V = counts.size();
  if (V == 0) throw InvalidArgument("huffman: empty vocabulary");
  if (V < 2) throw InvalidArgument("huffman: need at least 2 words for hierarchical softmax");

  // Leaf queue: ascending count; among equal counts, higher vocabulary index first.
  std::vector<std::size_t> leaves(V);
  std::iota(leaves.begin(), leaves.end(), std::size_t{0});
  std::stable_sort(leaves.begin(), leaves.end(), [&](std::size_t a, std::size_t b) {
    if (counts[a] != counts[b]) return counts[a] < counts[b];
    return a > b;
  });

  // Node ids: leaves 0..V-1, inner node k is V+k.
  const std::size_t total = 2 * V - 1;
  std::vector<std::uint64_t> weight(total, 0);
  std::vector<std::size_t> parent(total, 0);
  std::vector<std::uint8_t> bit(total, 0);
  for (std::size_t i = 0; i < V; ++i) weight[i] = counts[i];

  std::size_t next_leaf = 0;
  std::size_t next_inner = V;
  std::size_t created = V;
  auto pop_min = [&]() {
    const bool leaf_ok = next_leaf < V;
    const bool inner_ok = next_inner < created;
    if (leaf_ok && (!inner_ok || weight[leaves[next_leaf]] <= weight[next_inner])) {
      return leaves[next_leaf++];
    }
    return next_inner++;
  };
  for (std::size_t k = 0; k + 1 < V; ++k) {
    const std::size_t lo = pop_min();
    const std::size_t hi = pop_min();
    weight[created] = weight[lo] + weight[hi];
    parent[lo] = created;
    parent[hi] = created;
    bit[lo] = 0;
    bit[hi] = 1;
    ++created;
  }

  const std::size_t root = total - 1;
  HuffmanCoding h;
  h.vocab_size_ = V;
  h.offsets_.reserve(V + 1);
  h.offsets_.push_back(0);
  std::vector<std::uint8_t> code;
  std::vector<std::uint32_t> path;
  for (std::size_t w = 0; w < V; ++w) {
    code.clear();
    path.clear();
    for (std::size_t node = w; node != root; node = parent[node]) {
      code.push_back(bit[node]);
      path.push_back(static_cast<std::uint32_t>(parent[node] - V));
    }
    h.bits_.insert(h.bits_.end(), code.rbegin(), code.rend());
    h.nodes_.insert(h.nodes_.end(), path.rbegin(), path.rend());
    h.offsets_.push_back(h.bits_.size());
  }
  return h;
}

inline HuffmanCoding build_huffman(const Vocabulary& vocab) {
  std::vector<std::uint64_t> counts;
  counts.reserve(vocab.size());
  for (const auto& e : vocab.entries()) counts.push_back(e.count);
  return build_huffman(counts);
}

/// Mean code length in bits, weighted by unigram frequency.
inline double expected_code_length(const HuffmanCoding& coding, const Vocabulary& vocab) {
  if (coding.vocab_size() != vocab.size()) {
    throw InvalidArgument("expected_code_length: coding built for a different vocabulary size");
  }
  if (vocab.total_tokens() == 0) throw InvalidArgument("expected_code_length: vocabulary has no counts");
  long double acc = 0;
  for (std::size_t w = 0; w < vocab.size(); ++w) {
    acc += static_cast<long double>(vocab.count(w)) * coding.code_length(w);
  }
  return static_cast<double>(acc / vocab.total_tokens());
}

/// Entropy (bits) of the unigram distribution; log2 of the unigram perplexity.
inline double unigram_entropy(const Vocabulary& vocab) {
  if (vocab.total_tokens() == 0) throw InvalidArgument("unigram_entropy: vocabulary has no counts");
  const long double total = static_cast<long double>(vocab.total_tokens());
  long double h = 0;
  for (const auto& e : vocab.entries()) {
    if (e.count == 0) continue;
    const long double p = e.count / total;
    h -= p * std::log2(p);
  }
  return static_cast<double>(h);
}

}  // namespace w2v
