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

#include <gtest/gtest.h>

#include <random>
#include <set>

#include "support/oracles.hpp"
#include "w2v/huffman.hpp"

namespace w2v {
namespace {

Vocabulary vocab_of(const std::vector<std::uint64_t>& counts) {
  std::vector<Vocabulary::Entry> e;
  for (std::size_t i = 0; i < counts.size(); ++i) e.push_back({"w" + std::to_string(i), counts[i]});
  return Vocabulary::from_entries(std::move(e));
}

std::vector<std::uint64_t> sorted_desc(std::vector<std::uint64_t> c) {
  std::sort(c.begin(), c.end(), std::greater<>());
  return c;
}

// Checks every structural invariant of a coding.
void expect_valid(const HuffmanCoding& h, const std::vector<std::uint64_t>& counts) {
  const std::size_t V = counts.size();
  ASSERT_EQ(h.vocab_size(), V);
  ASSERT_EQ(h.inner_count(), V - 1);
  std::set<std::vector<std::uint8_t>> codes;
  std::set<std::uint32_t> inner;
  long double kraft = 0;
  for (std::size_t w = 0; w < V; ++w) {
    const auto code = h.code(w);
    const auto path = h.path(w);
    ASSERT_GE(code.size(), 1u);
    ASSERT_EQ(code.size(), path.size());
    EXPECT_EQ(path[0], V - 2) << "path must start at the root";
    for (auto n : path) {
      EXPECT_LE(n, V - 2);
      inner.insert(n);
    }
    codes.insert(std::vector<std::uint8_t>(code.begin(), code.end()));
    kraft += std::ldexp(1.0L, -static_cast<int>(code.size()));
  }
  EXPECT_EQ(kraft, 1.0L);
  EXPECT_EQ(inner.size(), V - 1);
  // Prefix-free: in sorted order, a prefix would sit right before a word it prefixes.
  std::vector<std::vector<std::uint8_t>> sorted(codes.begin(), codes.end());
  ASSERT_EQ(sorted.size(), V);
  for (std::size_t i = 1; i < sorted.size(); ++i) {
    const auto& a = sorted[i - 1];
    const auto& b = sorted[i];
    EXPECT_FALSE(a.size() <= b.size() && std::equal(a.begin(), a.end(), b.begin())) << "prefix found";
  }
  // Monotone: more frequent never longer; equal counts, lower index never longer.
  for (std::size_t a = 0; a < V; ++a) {
    for (std::size_t b = 0; b < V; ++b) {
      if (counts[a] > counts[b] || (counts[a] == counts[b] && a < b)) {
        EXPECT_LE(h.code_length(a), h.code_length(b));
      }
    }
  }
}

TEST(Huffman, TextbookExample) {
  const std::vector<std::uint64_t> counts = {5, 2, 1, 1};
  const auto h = build_huffman(counts);
  expect_valid(h, counts);
  EXPECT_EQ(h.code_length(0), 1u);
  EXPECT_EQ(h.code_length(1), 2u);
  EXPECT_EQ(h.code_length(2), 3u);
  EXPECT_EQ(h.code_length(3), 3u);
  EXPECT_EQ(testing::brute_force_optimal_cost(counts), 15u);
  // Conventions: lighter merge operand is bit 0, root is inner node V-2.
  // Merges: (d,c)->n0, (b,n0)->n1, (n1,a)->n2.
  EXPECT_EQ(std::vector<std::uint8_t>(h.code(0).begin(), h.code(0).end()), (std::vector<std::uint8_t>{1}));
  EXPECT_EQ(std::vector<std::uint8_t>(h.code(1).begin(), h.code(1).end()), (std::vector<std::uint8_t>{0, 0}));
  EXPECT_EQ(std::vector<std::uint8_t>(h.code(2).begin(), h.code(2).end()), (std::vector<std::uint8_t>{0, 1, 1}));
  EXPECT_EQ(std::vector<std::uint8_t>(h.code(3).begin(), h.code(3).end()), (std::vector<std::uint8_t>{0, 1, 0}));
  EXPECT_EQ(std::vector<std::uint32_t>(h.path(3).begin(), h.path(3).end()), (std::vector<std::uint32_t>{2, 1, 0}));
  EXPECT_NEAR(expected_code_length(h, vocab_of(counts)), 15.0 / 9.0, 1e-15);
}

TEST(Huffman, TwoWords) {
  const auto h = build_huffman(std::vector<std::uint64_t>{1, 1});
  EXPECT_EQ(h.code_length(0), 1u);
  EXPECT_EQ(h.code_length(1), 1u);
  EXPECT_NE(h.code(0)[0], h.code(1)[0]);
}

TEST(Huffman, UniformEightIsBalanced) {
  const std::vector<std::uint64_t> counts(8, 10);
  const auto h = build_huffman(counts);
  expect_valid(h, counts);
  for (std::size_t w = 0; w < 8; ++w) EXPECT_EQ(h.code_length(w), 3u);
  EXPECT_EQ(expected_code_length(h, vocab_of(counts)), 3.0);
}

TEST(Huffman, RejectsTinyVocabularies) {
  EXPECT_THROW(build_huffman(std::vector<std::uint64_t>{}), InvalidArgument);
  EXPECT_THROW(build_huffman(std::vector<std::uint64_t>{7}), InvalidArgument);
}

TEST(Huffman, ExpectedLengthRejectsMismatch) {
  const auto h = build_huffman(std::vector<std::uint64_t>{3, 2, 1});
  EXPECT_THROW(expected_code_length(h, vocab_of({3, 2})), InvalidArgument);
}

TEST(Huffman, Deterministic) {
  const std::vector<std::uint64_t> counts = {9, 9, 7, 7, 7, 3, 3, 1, 1, 1, 1};
  EXPECT_EQ(build_huffman(counts), build_huffman(counts));
}

TEST(Huffman, DeepChainHasNoLengthCap) {
  // Fibonacci-like counts give a maximally skewed tree of depth V-1.
  std::vector<std::uint64_t> counts = {1, 1};
  while (counts.size() < 80) counts.push_back(counts[counts.size() - 1] + counts[counts.size() - 2]);
  counts = sorted_desc(counts);
  const auto h = build_huffman(counts);
  EXPECT_EQ(h.max_code_length(), counts.size() - 1);
  expect_valid(h, counts);
}

TEST(Huffman, FromCodesValidates) {
  const auto h = build_huffman(std::vector<std::uint64_t>{4, 3, 2, 1});
  std::vector<std::vector<std::uint8_t>> codes;
  std::vector<std::vector<std::uint32_t>> paths;
  for (std::size_t w = 0; w < 4; ++w) {
    codes.emplace_back(h.code(w).begin(), h.code(w).end());
    paths.emplace_back(h.path(w).begin(), h.path(w).end());
  }
  EXPECT_EQ(HuffmanCoding::from_codes(codes, paths), h);
  auto bad = paths;
  bad[1][0] = 0;
  EXPECT_THROW(HuffmanCoding::from_codes(codes, bad), FormatError);
}

// Brute force over all complete prefix codes for small vocabularies.
TEST(HuffmanProperty, OptimalForSmallVocabularies) {
  std::mt19937 rng(2024);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t V = std::uniform_int_distribution<std::size_t>(2, 8)(rng);
    std::vector<std::uint64_t> counts(V);
    for (auto& c : counts) c = std::uniform_int_distribution<std::uint64_t>(1, 8)(rng);
    counts = sorted_desc(counts);
    const auto h = build_huffman(counts);
    expect_valid(h, counts);
    std::uint64_t cost = 0;
    for (std::size_t w = 0; w < V; ++w) cost += counts[w] * h.code_length(w);
    EXPECT_EQ(cost, testing::brute_force_optimal_cost(counts)) << "trial " << trial;
  }
}

TEST(HuffmanProperty, EntropyBound) {
  std::mt19937 rng(77);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t V = std::uniform_int_distribution<std::size_t>(9, 3000)(rng);
    std::vector<std::uint64_t> counts(V);
    // Zipf-like with noise, the shape of real word counts.
    for (std::size_t i = 0; i < V; ++i) {
      counts[i] = 1 + static_cast<std::uint64_t>(1e6 / (i + 1)) + std::uniform_int_distribution<std::uint64_t>(0, 50)(rng);
    }
    counts = sorted_desc(counts);
    const auto vocab = vocab_of(counts);
    const auto h = build_huffman(vocab);
    const double H = testing::entropy_bits(counts);
    const double L = expected_code_length(h, vocab);
    EXPECT_GE(L, H - 1e-12);
    EXPECT_LT(L, H + 1);
    EXPECT_NEAR(unigram_entropy(vocab), H, 1e-9);
  }
}

}  // namespace
}  // namespace w2v
