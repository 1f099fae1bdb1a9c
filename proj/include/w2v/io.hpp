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

// Word-vector interchange files and training checkpoints.
//
// Text:    "V D\n", then per word "word v1 ... vD\n" (%.9g values).
// Binary:  "V D\n", then per word the word bytes, one space, D little-endian
//          IEEE-754 float32 values and a newline byte.
// Both formats store float32 regardless of the training precision. Vector
// files carry no counts; loaded vocabularies have count 0.
//
// Checkpoint: "W2VCKPT\n", u32 version, u32 section count, then sections of
// (4-byte tag, u64 length, u64 FNV-1a checksum, payload):
//   CONF  training config (JSON)     VOCB  "word count" lines
//   HUFF  per-word codes and paths   PARM  both parameter matrices
//   STAT  single-worker cursor (JSON)

#pragma once

#include <bit>
#include <cctype>
#include <charconv>
#include <cmath>
#include <concepts>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <map>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "w2v/corpus.hpp"
#include "w2v/error.hpp"
#include "w2v/eval.hpp"
#include "w2v/huffman.hpp"
#include "w2v/model.hpp"
#include "w2v/trainer.hpp"

namespace w2v {

static_assert(std::endian::native == std::endian::little, "binary formats assume a little-endian host");

enum class VectorFormat { automatic, text, binary };

namespace detail {

inline bool has_separator(std::string_view word) {
  return word.find_first_of(" \t\n\r\v\f") != std::string_view::npos;
}

inline void check_savable(const WordVectors& wv) {
  if (wv.size() == 0 || wv.dim == 0) throw InvalidArgument("cannot save empty vector set");
  if (wv.data.size() != wv.size() * wv.dim) throw InvalidArgument("vector data does not match V x D");
  for (const auto& e : wv.vocab.entries()) {
    if (e.word.empty() || has_separator(e.word)) {
      throw InvalidArgument("word cannot be represented in a vector file: '" + e.word + "'");
    }
  }
}

inline std::string read_all(std::istream& in) {
  return std::string(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

inline std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path.string());
  return read_all(in);
}

inline std::ofstream open_output(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot write " + path.string());
  return out;
}

[[noreturn]] inline void format_error(std::size_t offset, const std::string& msg) {
  throw FormatError("byte " + std::to_string(offset) + ": " + msg);
}

/// Cursor over an in-memory file.
class Reader {
 public:
  explicit Reader(std::string_view buf) : buf_(buf) {}

  std::size_t offset() const noexcept { return pos_; }
  std::size_t remaining() const noexcept { return buf_.size() - pos_; }
  bool at_end() const noexcept { return pos_ >= buf_.size(); }

  std::string_view line() {
    const auto nl = buf_.find('\n', pos_);
    if (nl == std::string_view::npos) format_error(pos_, "unexpected end of file (missing newline)");
    auto out = buf_.substr(pos_, nl - pos_);
    pos_ = nl + 1;
    return out;
  }

  std::string_view until(char c) {
    const auto at = buf_.find(c, pos_);
    if (at == std::string_view::npos) format_error(pos_, "unexpected end of file");
    auto out = buf_.substr(pos_, at - pos_);
    pos_ = at + 1;
    return out;
  }

  std::string_view take(std::size_t n) {
    if (n > remaining()) format_error(pos_, "unexpected end of file");
    auto out = buf_.substr(pos_, n);
    pos_ += n;
    return out;
  }

  char byte() { return take(1)[0]; }

  bool only_whitespace_left() const {
    for (std::size_t i = pos_; i < buf_.size(); ++i) {
      if (!std::isspace(static_cast<unsigned char>(buf_[i]))) return false;
    }
    return true;
  }

 private:
  std::string_view buf_;
  std::size_t pos_ = 0;
};

/// Splits on ASCII whitespace.
inline std::vector<std::string_view> split_fields(std::string_view s) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && std::isspace(static_cast<unsigned char>(s[i]))) ++i;
    const std::size_t start = i;
    while (i < s.size() && !std::isspace(static_cast<unsigned char>(s[i]))) ++i;
    if (i > start) out.push_back(s.substr(start, i - start));
  }
  return out;
}

template <class Int>
bool parse_int(std::string_view s, Int& out) {
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc() && p == s.data() + s.size();
}

inline bool parse_float(std::string_view s, float& out) {
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc() && p == s.data() + s.size() && std::isfinite(out);
}

struct Header {
  std::size_t vocab_size = 0;
  std::size_t dim = 0;
};

inline Header read_header(Reader& r) {
  const auto line = r.line();
  const auto f = split_fields(line);
  Header h;
  if (f.size() != 2 || !parse_int(f[0], h.vocab_size) || !parse_int(f[1], h.dim)) {
    format_error(0, "header must be 'V D'");
  }
  if (h.vocab_size == 0) format_error(0, "vocabulary size must be positive");
  if (h.dim == 0) format_error(0, "dimension must be positive");
  return h;
}

/// Parses one text row; returns false (without throwing) when `line` is not a
/// well-formed row of `dim` values.
inline bool parse_text_row(std::string_view line, std::size_t dim, std::string& word, float* values) {
  const auto f = split_fields(line);
  if (f.size() != dim + 1) return false;
  for (std::size_t i = 0; i < dim; ++i) {
    if (!parse_float(f[i + 1], values[i])) return false;
  }
  word.assign(f[0]);
  return true;
}

inline WordVectors finish(std::vector<Vocabulary::Entry> entries, std::size_t dim, std::vector<float> data) {
  WordVectors wv;
  try {
    wv.vocab = Vocabulary::from_entries(std::move(entries));
  } catch (const InvalidArgument& e) {
    throw FormatError(e.what());
  }
  wv.dim = dim;
  wv.data = std::move(data);
  return wv;
}

inline WordVectors parse_text_vectors(std::string_view buf) {
  Reader r(buf);
  const auto h = read_header(r);
  // Every row needs at least 2 bytes per value plus a word and a newline.
  if (h.dim > r.remaining() || h.vocab_size > r.remaining() / (2 * h.dim + 2)) format_error(r.offset(), "header sizes exceed file length");
  std::vector<Vocabulary::Entry> entries;
  entries.reserve(h.vocab_size);
  std::vector<float> data(h.vocab_size * h.dim);
  std::string word;
  for (std::size_t w = 0; w < h.vocab_size; ++w) {
    const auto at = r.offset();
    if (r.at_end()) format_error(at, "unexpected end of file at row " + std::to_string(w));
    const auto line = r.line();
    if (!parse_text_row(line, h.dim, word, data.data() + w * h.dim)) {
      format_error(at, "row " + std::to_string(w) + " is not 'word' followed by " + std::to_string(h.dim) + " numbers");
    }
    entries.push_back({word, 0});
  }
  if (!r.only_whitespace_left()) format_error(r.offset(), "extra data after last row");
  return finish(std::move(entries), h.dim, std::move(data));
}

inline WordVectors parse_binary_vectors(std::string_view buf) {
  Reader r(buf);
  const auto h = read_header(r);
  if (h.dim > r.remaining() || h.vocab_size > r.remaining() / (4 * h.dim + 3)) {
    format_error(r.offset(), "header sizes exceed file length");
  }
  std::vector<Vocabulary::Entry> entries;
  entries.reserve(h.vocab_size);
  std::vector<float> data(h.vocab_size * h.dim);
  for (std::size_t w = 0; w < h.vocab_size; ++w) {
    const auto at = r.offset();
    const auto word = r.until(' ');
    if (word.empty() || has_separator(word)) format_error(at, "bad word at row " + std::to_string(w));
    const auto raw = r.take(4 * h.dim);
    std::memcpy(data.data() + w * h.dim, raw.data(), raw.size());
    if (r.at_end()) format_error(r.offset(), "unexpected end of file (missing row terminator)");
    if (r.byte() != '\n') format_error(r.offset() - 1, "expected newline after row " + std::to_string(w));
    entries.push_back({std::string(word), 0});
  }
  if (!r.at_end()) format_error(r.offset(), "extra data after last row");
  return finish(std::move(entries), h.dim, std::move(data));
}

inline bool looks_like_text(std::string_view buf) {
  try {
    Reader r(buf);
    const auto h = read_header(r);
    std::vector<float> row(h.dim);
    std::string word;
    return parse_text_row(r.line(), h.dim, word, row.data());
  } catch (const FormatError&) {
    return false;
  }
}

}  // namespace detail

inline void save_vectors_text(const WordVectors& wv, std::ostream& out) {
  detail::check_savable(wv);
  out << wv.size() << ' ' << wv.dim << '\n';
  char num[32];
  for (std::size_t w = 0; w < wv.size(); ++w) {
    out << wv.vocab.word(w);
    for (auto x : wv.row(w)) {
      const int n = std::snprintf(num, sizeof num, " %.9g", static_cast<double>(x));
      out.write(num, n);
    }
    out << '\n';
  }
  if (!out) throw Error("failed to write vectors");
}

inline void save_vectors_binary(const WordVectors& wv, std::ostream& out) {
  detail::check_savable(wv);
  out << wv.size() << ' ' << wv.dim << '\n';
  for (std::size_t w = 0; w < wv.size(); ++w) {
    out << wv.vocab.word(w) << ' ';
    const auto r = wv.row(w);
    out.write(reinterpret_cast<const char*>(r.data()), static_cast<std::streamsize>(r.size() * sizeof(float)));
    out << '\n';
  }
  if (!out) throw Error("failed to write vectors");
}

inline void save_vectors(const WordVectors& wv, const std::filesystem::path& path, VectorFormat format) {
  auto out = detail::open_output(path);
  if (format == VectorFormat::binary) {
    save_vectors_binary(wv, out);
  } else {
    save_vectors_text(wv, out);
  }
}

/// Parses a complete vector file held in memory. Never returns a partial
/// result: any mismatch between header and body throws FormatError.
inline WordVectors parse_vectors(std::string_view buf, VectorFormat format = VectorFormat::automatic) {
  if (format == VectorFormat::automatic) {
    format = detail::looks_like_text(buf) ? VectorFormat::text : VectorFormat::binary;
  }
  return format == VectorFormat::text ? detail::parse_text_vectors(buf) : detail::parse_binary_vectors(buf);
}

inline WordVectors load_vectors(std::istream& in, VectorFormat format = VectorFormat::automatic) {
  return parse_vectors(detail::read_all(in), format);
}

inline WordVectors load_vectors(const std::filesystem::path& path, VectorFormat format = VectorFormat::automatic) {
  return parse_vectors(detail::read_file(path), format);
}

// ---------------------------------------------------------------------------
// Checkpoints

inline constexpr std::uint32_t kCheckpointVersion = 1;
inline constexpr std::string_view kCheckpointMagic = "W2VCKPT\n";

template <std::floating_point T = float>
struct Checkpoint {
  Vocabulary vocab;
  HuffmanCoding coding;
  ModelParams<T> params;
  TrainingConfig config;
  TrainState state;
};

namespace detail {

inline std::uint64_t fnv1a(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

template <class U>
void put(std::string& out, U v) {
  char b[sizeof(U)];
  std::memcpy(b, &v, sizeof(U));
  out.append(b, sizeof(U));
}

template <class U>
U get(Reader& r) {
  U v;
  const auto raw = r.take(sizeof(U));
  std::memcpy(&v, raw.data(), sizeof(U));
  return v;
}

inline nlohmann::json config_to_json(const TrainingConfig& c) {
  return {{"architecture", to_string(c.architecture)},
          {"dim", c.dim},
          {"window", c.window},
          {"epochs", c.epochs},
          {"initial_lr", c.initial_lr},
          {"min_count", c.min_count},
          {"max_vocab", c.max_vocab},
          {"lowercase", c.lowercase},
          {"workers", c.workers},
          {"seed", c.seed},
          {"lr_floor_ratio", c.lr_floor_ratio},
          {"static_window", c.static_window},
          {"sigmoid", c.step.sigmoid == SigmoidMode::exact ? "exact" : "table"},
          {"cbow_mean_gradient", c.step.cbow_mean_gradient}};
}

inline TrainingConfig config_from_json(const nlohmann::json& j) {
  TrainingConfig c;
  const auto arch = parse_architecture(j.at("architecture").get<std::string>());
  if (!arch) throw FormatError("unknown architecture");
  c.architecture = *arch;
  j.at("dim").get_to(c.dim);
  j.at("window").get_to(c.window);
  j.at("epochs").get_to(c.epochs);
  j.at("initial_lr").get_to(c.initial_lr);
  j.at("min_count").get_to(c.min_count);
  j.at("max_vocab").get_to(c.max_vocab);
  j.at("lowercase").get_to(c.lowercase);
  j.at("workers").get_to(c.workers);
  j.at("seed").get_to(c.seed);
  j.at("lr_floor_ratio").get_to(c.lr_floor_ratio);
  j.at("static_window").get_to(c.static_window);
  c.step.sigmoid = j.at("sigmoid").get<std::string>() == "exact" ? SigmoidMode::exact : SigmoidMode::table;
  j.at("cbow_mean_gradient").get_to(c.step.cbow_mean_gradient);
  c.validate();
  return c;
}

inline std::string encode_huffman(const HuffmanCoding& h) {
  std::string out;
  put<std::uint64_t>(out, h.vocab_size());
  for (std::size_t w = 0; w < h.vocab_size(); ++w) {
    put<std::uint32_t>(out, static_cast<std::uint32_t>(h.code_length(w)));
    for (auto b : h.code(w)) out.push_back(static_cast<char>(b));
    for (auto n : h.path(w)) put<std::uint32_t>(out, n);
  }
  return out;
}

inline HuffmanCoding decode_huffman(std::string_view payload) {
  Reader r(payload);
  const auto v = get<std::uint64_t>(r);
  if (v > r.remaining() / 9) throw FormatError("vocabulary size exceeds section length");
  std::vector<std::vector<std::uint8_t>> codes(v);
  std::vector<std::vector<std::uint32_t>> paths(v);
  for (std::size_t w = 0; w < v; ++w) {
    const auto len = get<std::uint32_t>(r);
    if (len > r.remaining() / 5) throw FormatError("code length exceeds section length");
    const auto bits = r.take(len);
    codes[w].assign(bits.begin(), bits.end());
    for (std::uint32_t j = 0; j < len; ++j) paths[w].push_back(get<std::uint32_t>(r));
  }
  if (!r.at_end()) throw FormatError("trailing bytes");
  return HuffmanCoding::from_codes(codes, paths);
}

template <std::floating_point T>
std::string encode_params(const ModelParams<T>& p) {
  std::string out;
  put<std::uint32_t>(out, sizeof(T));
  put<std::uint64_t>(out, p.vocab_size());
  put<std::uint64_t>(out, p.dim());
  out.append(reinterpret_cast<const char*>(p.input_data().data()), p.input_data().size_bytes());
  out.append(reinterpret_cast<const char*>(p.node_data().data()), p.node_data().size_bytes());
  return out;
}

template <std::floating_point T>
ModelParams<T> decode_params(std::string_view payload) {
  Reader r(payload);
  if (get<std::uint32_t>(r) != sizeof(T)) throw FormatError("parameter precision does not match");
  const auto v = get<std::uint64_t>(r);
  const auto d = get<std::uint64_t>(r);
  if (v < 2 || d < 1 || d > r.remaining() / sizeof(T) || (2 * v - 1) > r.remaining() / (d * sizeof(T))) {
    throw FormatError("matrix sizes do not match section length");
  }
  ModelParams<T> p(v, d);
  auto in = r.take(p.input_data().size_bytes());
  std::memcpy(p.input_data().data(), in.data(), in.size());
  auto nodes = r.take(p.node_data().size_bytes());
  std::memcpy(p.node_data().data(), nodes.data(), nodes.size());
  if (!r.at_end()) throw FormatError("trailing bytes");
  return p;
}

}  // namespace detail

template <std::floating_point T>
void save_checkpoint(const Checkpoint<T>& ck, std::ostream& out) {
  if (ck.params.vocab_size() != ck.vocab.size() || ck.coding.vocab_size() != ck.vocab.size() ||
      ck.params.dim() != ck.config.dim) {
    throw InvalidArgument("checkpoint parts disagree on vocabulary size or dimension");
  }
  std::ostringstream vocab;
  save_vocabulary(ck.vocab, vocab);
  const nlohmann::json state = {{"words_processed", ck.state.words_processed},
                                {"epoch", ck.state.epoch},
                                {"sentence", ck.state.sentence},
                                {"position", ck.state.position},
                                {"rng_state", ck.state.rng_state}};
  const std::pair<std::string_view, std::string> sections[] = {
      {"CONF", detail::config_to_json(ck.config).dump()},
      {"VOCB", vocab.str()},
      {"HUFF", detail::encode_huffman(ck.coding)},
      {"PARM", detail::encode_params(ck.params)},
      {"STAT", state.dump()},
  };
  std::string buf(kCheckpointMagic);
  detail::put<std::uint32_t>(buf, kCheckpointVersion);
  detail::put<std::uint32_t>(buf, static_cast<std::uint32_t>(std::size(sections)));
  for (const auto& [tag, payload] : sections) {
    buf.append(tag);
    detail::put<std::uint64_t>(buf, payload.size());
    detail::put<std::uint64_t>(buf, detail::fnv1a(payload));
    buf.append(payload);
  }
  out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
  if (!out) throw Error("failed to write checkpoint");
}

template <std::floating_point T>
void save_checkpoint(const Checkpoint<T>& ck, const std::filesystem::path& path) {
  auto out = detail::open_output(path);
  save_checkpoint(ck, out);
}

template <std::floating_point T = float>
Checkpoint<T> parse_checkpoint(std::string_view buf) {
  detail::Reader r(buf);
  if (buf.substr(0, kCheckpointMagic.size()) != kCheckpointMagic) throw FormatError("not a w2v checkpoint");
  r.take(kCheckpointMagic.size());
  const auto version = detail::get<std::uint32_t>(r);
  if (version != kCheckpointVersion) {
    throw FormatError("unsupported checkpoint version " + std::to_string(version) + " (expected " +
                      std::to_string(kCheckpointVersion) + ")");
  }
  const auto count = detail::get<std::uint32_t>(r);
  std::map<std::string, std::string_view, std::less<>> sections;
  for (std::uint32_t i = 0; i < count; ++i) {
    const std::string tag(r.take(4));
    const auto len = detail::get<std::uint64_t>(r);
    const auto sum = detail::get<std::uint64_t>(r);
    if (len > r.remaining()) throw FormatError("checkpoint section '" + tag + "' is truncated");
    const auto payload = r.take(len);
    if (detail::fnv1a(payload) != sum) throw FormatError("checkpoint section '" + tag + "' is corrupted");
    sections[tag] = payload;
  }
  auto section = [&](std::string_view tag) {
    auto it = sections.find(tag);
    if (it == sections.end()) throw FormatError("checkpoint section '" + std::string(tag) + "' is missing");
    return it->second;
  };
  auto guarded = [&](std::string_view tag, auto&& fn) {
    try {
      return fn(section(tag));
    } catch (const nlohmann::json::exception& e) {
      throw FormatError("checkpoint section '" + std::string(tag) + "' is invalid: " + e.what());
    } catch (const Error& e) {
      throw FormatError("checkpoint section '" + std::string(tag) + "' is invalid: " + e.what());
    }
  };

  Checkpoint<T> ck;
  ck.config = guarded("CONF", [](std::string_view s) { return detail::config_from_json(nlohmann::json::parse(s)); });
  ck.vocab = guarded("VOCB", [](std::string_view s) {
    std::istringstream in{std::string(s)};
    return load_vocabulary(in);
  });
  ck.coding = guarded("HUFF", [](std::string_view s) { return detail::decode_huffman(s); });
  ck.params = guarded("PARM", [](std::string_view s) { return detail::decode_params<T>(s); });
  ck.state = guarded("STAT", [](std::string_view s) {
    const auto j = nlohmann::json::parse(s);
    TrainState st;
    j.at("words_processed").get_to(st.words_processed);
    j.at("epoch").get_to(st.epoch);
    j.at("sentence").get_to(st.sentence);
    j.at("position").get_to(st.position);
    j.at("rng_state").get_to(st.rng_state);
    return st;
  });
  if (ck.params.vocab_size() != ck.vocab.size() || ck.coding.vocab_size() != ck.vocab.size() ||
      ck.params.dim() != ck.config.dim) {
    throw FormatError("checkpoint sections disagree on vocabulary size or dimension");
  }
  return ck;
}

template <std::floating_point T = float>
Checkpoint<T> load_checkpoint(std::istream& in) {
  return parse_checkpoint<T>(detail::read_all(in));
}

template <std::floating_point T = float>
Checkpoint<T> load_checkpoint(const std::filesystem::path& path) {
  return parse_checkpoint<T>(detail::read_file(path));
}

}  // namespace w2v
