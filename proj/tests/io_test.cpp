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

#include <cstring>
#include <random>
#include <sstream>

#include "w2v/io.hpp"

namespace w2v {
namespace {

WordVectors random_vectors(std::size_t V, std::size_t D, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<float> g;
  std::vector<Vocabulary::Entry> entries;
  for (std::size_t w = 0; w < V; ++w) entries.push_back({"w\xc3\xa9" + std::to_string(w), V - w});
  WordVectors wv{Vocabulary::from_entries(std::move(entries)), D, {}, false};
  for (std::size_t i = 0; i < V * D; ++i) wv.data.push_back(g(rng) * std::pow(10.0f, std::uniform_int_distribution<int>(-8, 8)(rng)));
  return wv;
}

std::string to_text(const WordVectors& wv) {
  std::ostringstream out;
  save_vectors_text(wv, out);
  return out.str();
}

std::string to_binary(const WordVectors& wv) {
  std::ostringstream out;
  save_vectors_binary(wv, out);
  return out.str();
}

std::vector<std::string> words_of(const WordVectors& wv) {
  std::vector<std::string> w;
  for (const auto& e : wv.vocab.entries()) w.push_back(e.word);
  return w;
}

std::string error_of(std::string_view buf, VectorFormat fmt) {
  try {
    parse_vectors(buf, fmt);
  } catch (const FormatError& e) {
    return e.what();
  }
  return "";
}

TEST(VectorFile, TextLayout) {
  WordVectors wv{Vocabulary::from_entries({{"a", 2}, {"b", 1}}), 2, {0.5f, -1.0f, 0.1f, 3.0f}, false};
  EXPECT_EQ(to_text(wv), "2 2\na 0.5 -1\nb 0.100000001 3\n");
}

TEST(VectorFile, BinaryLayout) {
  WordVectors wv{Vocabulary::from_entries({{"a", 1}, {"bc", 1}}), 1, {1.0f, -2.0f}, false};
  const std::string expect = std::string("2 1\na ") + std::string("\x00\x00\x80\x3f", 4) + "\nbc " +
                             std::string("\x00\x00\x00\xc0", 4) + "\n";
  EXPECT_EQ(to_binary(wv), expect);
}

TEST(VectorFileProperty, BinaryRoundTripIsBitExact) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto wv = random_vectors(1 + seed * 7, 1 + seed % 9, seed);
    const auto bin = to_binary(wv);
    const auto back = parse_vectors(bin, VectorFormat::binary);
    EXPECT_EQ(words_of(back), words_of(wv));
    ASSERT_EQ(back.data.size(), wv.data.size());
    EXPECT_EQ(std::memcmp(back.data.data(), wv.data.data(), wv.data.size() * sizeof(float)), 0);
    EXPECT_EQ(to_binary(back), bin);
    // Auto-detection picks binary.
    EXPECT_EQ(std::memcmp(parse_vectors(bin).data.data(), wv.data.data(), wv.data.size() * sizeof(float)), 0);
  }
}

// Nine significant digits are enough to recover every float exactly.
TEST(VectorFileProperty, TextRoundTripIsExact) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto wv = random_vectors(1 + seed * 5, 1 + seed % 7, seed + 100);
    const auto back = parse_vectors(to_text(wv));
    EXPECT_EQ(words_of(back), words_of(wv));
    EXPECT_EQ(back.data, wv.data);
  }
}

TEST(VectorFile, BinaryWithNewlineBytesInValuesIsDetected) {
  // 0x0a bytes inside the float data must not confuse format detection.
  WordVectors wv{Vocabulary::from_entries({{"x", 1}}), 2, {}, false};
  float v;
  std::memcpy(&v, "\x0a\x0a\x0a\x3f", 4);
  wv.data = {v, v};
  const auto back = parse_vectors(to_binary(wv));
  EXPECT_EQ(back.data, wv.data);
}

TEST(VectorFile, RejectsUnsavableWords) {
  WordVectors wv{Vocabulary::from_entries({{"new york", 1}}), 1, {1.0f}, false};
  std::ostringstream out;
  EXPECT_THROW(save_vectors_text(wv, out), InvalidArgument);
  EXPECT_THROW(save_vectors_binary(wv, out), InvalidArgument);
}

TEST(VectorFile, TruncatedBinaryFailsWithOffset) {
  const auto bin = to_binary(random_vectors(10, 4, 1));
  for (std::size_t cut : {bin.size() - 1, bin.size() - 5, bin.size() / 2, std::size_t{6}}) {
    const auto msg = error_of(std::string_view(bin).substr(0, cut), VectorFormat::binary);
    EXPECT_TRUE(msg.starts_with("byte ")) << cut << ": " << msg;
  }
}

TEST(VectorFile, TextErrors) {
  EXPECT_NE(error_of("2 2\na 1 2\n", VectorFormat::text), "");
  EXPECT_NE(error_of("1 2\na 1\n", VectorFormat::text), "");
  EXPECT_NE(error_of("1 2\na 1 nan\n", VectorFormat::text), "");
  EXPECT_NE(error_of("1 1\na 1\nb 2\n", VectorFormat::text), "");
  EXPECT_NE(error_of("x 1\na 1\n", VectorFormat::text), "");
  EXPECT_NE(error_of("2 1\na 1\na 2\n", VectorFormat::text), "");
  EXPECT_EQ(error_of("1 2\na 1 2\n", VectorFormat::text), "");
  // The missing-row error names the offset of the row that should follow.
  EXPECT_EQ(error_of("2 1\nalpha 1.000\n", VectorFormat::text), "byte 16: unexpected end of file at row 1");
  EXPECT_EQ(error_of("2 1\na 1\n", VectorFormat::text), "byte 4: header sizes exceed file length");
}

TEST(VectorFile, HugeHeaderDoesNotAllocate) {
  EXPECT_NE(error_of("99999999999 99999999999\n", VectorFormat::binary), "");
  EXPECT_NE(error_of("18446744073709551615 18446744073709551615\nx", VectorFormat::text), "");
}

TEST(VectorFile, SaveAndLoadFromDisk) {
  const auto wv = random_vectors(5, 3, 9);
  const auto dir = std::filesystem::temp_directory_path() / "w2v_io_test";
  std::filesystem::create_directories(dir);
  for (auto fmt : {VectorFormat::text, VectorFormat::binary}) {
    const auto path = dir / (fmt == VectorFormat::text ? "v.txt" : "v.bin");
    save_vectors(wv, path, fmt);
    EXPECT_EQ(load_vectors(path).data, wv.data);
  }
  EXPECT_THROW(load_vectors(dir / "missing.bin"), Error);
  std::filesystem::remove_all(dir);
}

Checkpoint<float> small_checkpoint() {
  Checkpoint<float> ck;
  ck.vocab = Vocabulary::from_entries({{"the", 9}, {"cat", 4}, {"sat", 2}, {"mat", 1}});
  ck.coding = build_huffman(ck.vocab);
  ck.config.dim = 3;
  ck.config.architecture = Architecture::skipgram;
  ck.config.epochs = 4;
  ck.config.seed = 77;
  ck.params = init_params<float>(4, 3, 77);
  ck.params.node_row(1)[2] = 0.25f;
  ck.state.words_processed = 123;
  ck.state.epoch = 1;
  ck.state.sentence = 2;
  ck.state.position = 3;
  ck.state.rng_state = "1 2 3";
  return ck;
}

std::string checkpoint_bytes(const Checkpoint<float>& ck) {
  std::ostringstream out;
  save_checkpoint(ck, out);
  return out.str();
}

TEST(Checkpoint, RoundTrip) {
  const auto ck = small_checkpoint();
  const auto bytes = checkpoint_bytes(ck);
  EXPECT_TRUE(bytes.starts_with("W2VCKPT\n"));
  const auto back = parse_checkpoint<float>(bytes);
  EXPECT_EQ(back.vocab, ck.vocab);
  EXPECT_EQ(back.coding, ck.coding);
  EXPECT_EQ(back.params, ck.params);
  EXPECT_EQ(back.state, ck.state);
  EXPECT_EQ(back.config.architecture, Architecture::skipgram);
  EXPECT_EQ(back.config.epochs, 4u);
  EXPECT_EQ(back.config.seed, 77u);
  EXPECT_EQ(checkpoint_bytes(back), bytes);
}

TEST(Checkpoint, WrongVersionIsRejected) {
  auto bytes = checkpoint_bytes(small_checkpoint());
  bytes[8] = 2;
  try {
    parse_checkpoint<float>(bytes);
    FAIL();
  } catch (const FormatError& e) {
    EXPECT_STREQ(e.what(), "unsupported checkpoint version 2 (expected 1)");
  }
}

TEST(Checkpoint, CorruptedSectionIsNamed) {
  auto bytes = checkpoint_bytes(small_checkpoint());
  // Flip one byte in the last parameter value, inside the PARM payload.
  const auto parm = bytes.find("PARM");
  ASSERT_NE(parm, std::string::npos);
  const auto stat = bytes.find("STAT", parm);
  bytes[stat - 1] ^= 0x40;
  try {
    parse_checkpoint<float>(bytes);
    FAIL();
  } catch (const FormatError& e) {
    EXPECT_STREQ(e.what(), "checkpoint section 'PARM' is corrupted");
  }
}

TEST(Checkpoint, TruncationAndGarbage) {
  const auto bytes = checkpoint_bytes(small_checkpoint());
  for (std::size_t cut = 0; cut < bytes.size(); cut += 7) {
    EXPECT_THROW(parse_checkpoint<float>(std::string_view(bytes).substr(0, cut)), FormatError) << cut;
  }
  EXPECT_THROW(parse_checkpoint<float>("2 2\na 1 2\n"), FormatError);
}

TEST(Checkpoint, DoublePrecisionParameters) {
  Checkpoint<double> ck;
  const auto f = small_checkpoint();
  ck.vocab = f.vocab;
  ck.coding = f.coding;
  ck.config = f.config;
  ck.params = init_params<double>(4, 3, 5);
  std::ostringstream out;
  save_checkpoint(ck, out);
  EXPECT_EQ(parse_checkpoint<double>(out.str()).params, ck.params);
  EXPECT_THROW(parse_checkpoint<float>(out.str()), FormatError);
}

}  // namespace
}  // namespace w2v
