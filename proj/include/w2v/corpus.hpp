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

// Tokenization, vocabulary construction and corpus encoding.
//
// Tokens are maximal runs of non-whitespace bytes. Every newline closes a
// sentence; training windows never cross a sentence boundary. Tokens that
// are not valid UTF-8 are dropped and counted.

#pragma once

#include <algorithm>
#include <array>
#include <cstddef>
#include <cstdint>
#include <istream>
#include <limits>
#include <optional>
#include <ostream>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "w2v/error.hpp"

namespace w2v {

using WordIndex = std::uint32_t;

struct TokenizeOptions {
  bool lowercase = false;
};

struct TokenizeStats {
  std::uint64_t tokens = 0;
  std::uint64_t sentences = 0;
  std::uint64_t skipped_malformed = 0;
};

namespace detail {

inline bool is_space(unsigned char c) {
  return c == ' ' || c == '\t' || c == '\r' || c == '\v' || c == '\f';
}

// Strict UTF-8 check: rejects overlongs, surrogates and code points > U+10FFFF.
inline bool is_valid_utf8(std::string_view s) {
  std::size_t i = 0;
  const std::size_t n = s.size();
  while (i < n) {
    const auto c = static_cast<unsigned char>(s[i]);
    if (c < 0x80) {
      ++i;
      continue;
    }
    std::size_t len = 0;
    std::uint32_t cp = 0;
    if ((c & 0xE0) == 0xC0) {
      len = 2;
      cp = c & 0x1F;
    } else if ((c & 0xF0) == 0xE0) {
      len = 3;
      cp = c & 0x0F;
    } else if ((c & 0xF8) == 0xF0) {
      len = 4;
      cp = c & 0x07;
    } else {
      return false;
    }
    if (i + len > n) return false;
    for (std::size_t k = 1; k < len; ++k) {
      const auto cc = static_cast<unsigned char>(s[i + k]);
      if ((cc & 0xC0) != 0x80) return false;
      cp = (cp << 6) | (cc & 0x3F);
    }
    static constexpr std::array<std::uint32_t, 5> kMin = {0, 0, 0x80, 0x800, 0x10000};
    if (cp < kMin[len] || cp > 0x10FFFF || (cp >= 0xD800 && cp <= 0xDFFF)) return false;
    i += len;
  }
  return true;
}

struct StringHash {
  using is_transparent = void;
  std::size_t operator()(std::string_view s) const noexcept {
    return std::hash<std::string_view>{}(s);
  }
};

}  // namespace detail

/// Streams tokens from `in`. `on_token(std::string_view)` is called for each
/// token, `on_boundary()` at the end of every line (including empty lines).
/// A final line without a trailing newline is still closed.
template <class OnToken, class OnBoundary>
TokenizeStats tokenize(std::istream& in, const TokenizeOptions& options, OnToken&& on_token,
                       OnBoundary&& on_boundary) {
  TokenizeStats stats;
  std::string token;
  bool line_open = false;

  auto flush_token = [&] {
    if (token.empty()) return;
    if (detail::is_valid_utf8(token)) {
      ++stats.tokens;
      on_token(std::string_view(token));
    } else {
      ++stats.skipped_malformed;
    }
    token.clear();
  };

  std::array<char, 1 << 16> buf{};
  while (in) {
    in.read(buf.data(), static_cast<std::streamsize>(buf.size()));
    const auto got = static_cast<std::size_t>(in.gcount());
    if (got == 0) break;
    for (std::size_t i = 0; i < got; ++i) {
      const auto c = static_cast<unsigned char>(buf[i]);
      if (c == '\n') {
        flush_token();
        on_boundary();
        ++stats.sentences;
        line_open = false;
      } else if (detail::is_space(c)) {
        flush_token();
        line_open = true;
      } else {
        line_open = true;
        token.push_back(options.lowercase && c >= 'A' && c <= 'Z' ? static_cast<char>(c - 'A' + 'a')
                                                                 : static_cast<char>(c));
      }
    }
  }
  flush_token();
  if (line_open) {
    on_boundary();
    ++stats.sentences;
  }
  return stats;
}

using TokenizedText = std::vector<std::vector<std::string>>;

/// Tokenizes an in-memory string into sentences of tokens.
inline TokenizedText tokenize_text(std::string_view text, const TokenizeOptions& options = {},
                                   TokenizeStats* stats = nullptr) {
  std::istringstream in{std::string(text)};
  TokenizedText out;
  std::vector<std::string> current;
  auto s = tokenize(
      in, options, [&](std::string_view t) { current.emplace_back(t); },
      [&] {
        out.push_back(std::move(current));
        current.clear();
      });
  if (stats != nullptr) *stats = s;
  return out;
}

/// Word <-> index mapping sorted by descending count.
///
/// Ties are broken by first occurrence in the scanned corpus, which makes the
/// downstream Huffman tree deterministic.
class Vocabulary {
 public:
  struct Entry {
    std::string word;
    std::uint64_t count = 0;

    bool operator==(const Entry&) const = default;
  };

  Vocabulary() = default;

  /// Adopts `entries` in the given order. Words must be unique and non-empty.
  /// Counts may be zero (vector files carry no counts).
  static Vocabulary from_entries(std::vector<Entry> entries) {
    Vocabulary v;
    v.index_.reserve(entries.size());
    for (std::size_t i = 0; i < entries.size(); ++i) {
      if (entries[i].word.empty()) throw InvalidArgument("empty word in vocabulary");
      if (!v.index_.emplace(entries[i].word, static_cast<WordIndex>(i)).second) {
        throw InvalidArgument("duplicate word in vocabulary: " + entries[i].word);
      }
      v.total_tokens_ += entries[i].count;
    }
    if (entries.size() > std::numeric_limits<WordIndex>::max()) {
      throw InvalidArgument("vocabulary too large");
    }
    v.entries_ = std::move(entries);
    return v;
  }

  std::size_t size() const noexcept { return entries_.size(); }
  bool empty() const noexcept { return entries_.empty(); }
  std::uint64_t total_tokens() const noexcept { return total_tokens_; }

  const Entry& operator[](std::size_t i) const { return entries_[i]; }
  const std::string& word(std::size_t i) const { return entries_.at(i).word; }
  std::uint64_t count(std::size_t i) const { return entries_.at(i).count; }
  std::span<const Entry> entries() const noexcept { return entries_; }

  std::optional<WordIndex> find(std::string_view word) const {
    auto it = index_.find(word);
    if (it == index_.end()) return std::nullopt;
    return it->second;
  }

  bool contains(std::string_view word) const { return find(word).has_value(); }

  WordIndex at(std::string_view word) const {
    auto idx = find(word);
    if (!idx) throw OutOfVocabulary(std::string(word));
    return *idx;
  }

  /// Keeps only the first `n` entries (the `n` most frequent words).
  Vocabulary truncated(std::size_t n) const {
    if (n >= entries_.size()) return *this;
    return from_entries({entries_.begin(), entries_.begin() + static_cast<std::ptrdiff_t>(n)});
  }

  bool operator==(const Vocabulary& other) const { return entries_ == other.entries_; }

 private:
  std::vector<Entry> entries_;
  std::unordered_map<std::string, WordIndex, detail::StringHash, std::equal_to<>> index_;
  std::uint64_t total_tokens_ = 0;
};

struct VocabularyOptions {
  std::uint64_t min_count = 5;
  /// Keep at most this many words (0 = unlimited), by descending frequency.
  std::size_t max_vocab = 0;
};

/// Accumulates raw counts in first-occurrence order.
class VocabularyCounter {
 public:
  void add(std::string_view token) {
    auto it = counts_.find(token);
    if (it == counts_.end()) {
      counts_.emplace(std::string(token), order_.size());
      order_.push_back({std::string(token), 1});
    } else {
      ++order_[it->second].count;
    }
  }

  std::size_t distinct() const noexcept { return order_.size(); }

  Vocabulary build(const VocabularyOptions& options) const {
    if (options.min_count < 1) throw InvalidArgument("min_count must be >= 1");
    std::vector<Vocabulary::Entry> kept;
    for (const auto& e : order_) {
      if (e.count >= options.min_count) kept.push_back(e);
    }
    // Stable sort keeps first-occurrence order among equal counts.
    std::stable_sort(kept.begin(), kept.end(),
                     [](const auto& a, const auto& b) { return a.count > b.count; });
    if (options.max_vocab > 0 && kept.size() > options.max_vocab) kept.resize(options.max_vocab);
    if (kept.empty()) throw InvalidArgument("no words survive min_count");
    return Vocabulary::from_entries(std::move(kept));
  }

 private:
  std::unordered_map<std::string, std::size_t, detail::StringHash, std::equal_to<>> counts_;
  std::vector<Vocabulary::Entry> order_;
};

inline Vocabulary build_vocabulary(const TokenizedText& sentences, const VocabularyOptions& options) {
  VocabularyCounter counter;
  for (const auto& s : sentences) {
    for (const auto& t : s) counter.add(t);
  }
  return counter.build(options);
}

inline Vocabulary build_vocabulary(std::istream& in, const VocabularyOptions& options,
                                   const TokenizeOptions& tok = {}, TokenizeStats* stats = nullptr) {
  VocabularyCounter counter;
  auto s = tokenize(in, tok, [&](std::string_view t) { counter.add(t); }, [] {});
  if (stats != nullptr) *stats = s;
  return counter.build(options);
}

/// Corpus as word indices, one sequence per input line (flat storage).
class EncodedCorpus {
 public:
  EncodedCorpus() { offsets_.push_back(0); }

  void push_token(WordIndex w) { tokens_.push_back(w); }
  void end_sentence() { offsets_.push_back(tokens_.size()); }

  void add_sentence(std::span<const WordIndex> sentence) {
    tokens_.insert(tokens_.end(), sentence.begin(), sentence.end());
    end_sentence();
  }

  std::size_t sentence_count() const noexcept { return offsets_.size() - 1; }
  std::uint64_t token_count() const noexcept { return tokens_.size(); }
  bool empty() const noexcept { return tokens_.empty(); }

  std::span<const WordIndex> sentence(std::size_t i) const {
    return std::span<const WordIndex>(tokens_).subspan(offsets_[i], offsets_[i + 1] - offsets_[i]);
  }

  std::vector<std::vector<WordIndex>> to_nested() const {
    std::vector<std::vector<WordIndex>> out;
    for (std::size_t i = 0; i < sentence_count(); ++i) {
      auto s = sentence(i);
      out.emplace_back(s.begin(), s.end());
    }
    return out;
  }

  /// Largest word index + 1, or 0 when empty.
  std::size_t max_index_bound() const {
    if (tokens_.empty()) return 0;
    return static_cast<std::size_t>(*std::max_element(tokens_.begin(), tokens_.end())) + 1;
  }

 private:
  std::vector<WordIndex> tokens_;
  std::vector<std::size_t> offsets_;
};

/// Replaces each token by its index; out-of-vocabulary tokens are dropped,
/// sentences (possibly empty) are kept.
inline EncodedCorpus encode(const TokenizedText& sentences, const Vocabulary& vocab) {
  EncodedCorpus out;
  for (const auto& s : sentences) {
    for (const auto& t : s) {
      if (auto idx = vocab.find(t)) out.push_token(*idx);
    }
    out.end_sentence();
  }
  return out;
}

inline EncodedCorpus encode(std::istream& in, const Vocabulary& vocab, const TokenizeOptions& tok = {},
                            TokenizeStats* stats = nullptr) {
  EncodedCorpus out;
  auto s = tokenize(
      in, tok,
      [&](std::string_view t) {
        if (auto idx = vocab.find(t)) out.push_token(*idx);
      },
      [&] { out.end_sentence(); });
  if (stats != nullptr) *stats = s;
  return out;
}

/// Maps indices back to words.
inline TokenizedText decode(const EncodedCorpus& corpus, const Vocabulary& vocab) {
  TokenizedText out;
  for (std::size_t i = 0; i < corpus.sentence_count(); ++i) {
    auto& s = out.emplace_back();
    for (auto w : corpus.sentence(i)) s.push_back(vocab.word(w));
  }
  return out;
}

/// Writes "word count" lines in vocabulary order.
inline void save_vocabulary(const Vocabulary& vocab, std::ostream& out) {
  for (const auto& e : vocab.entries()) out << e.word << ' ' << e.count << '\n';
  if (!out) throw Error("failed to write vocabulary");
}

inline Vocabulary load_vocabulary(std::istream& in) {
  std::vector<Vocabulary::Entry> entries;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::istringstream ls(line);
    Vocabulary::Entry e;
    std::string extra;
    if (!(ls >> e.word >> e.count) || (ls >> extra)) {
      throw FormatError("vocabulary line " + std::to_string(line_no) + ": expected 'word count'");
    }
    entries.push_back(std::move(e));
  }
  return Vocabulary::from_entries(std::move(entries));
}

}  // namespace w2v
