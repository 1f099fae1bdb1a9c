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

// Vector-space queries over trained word vectors: analogy answering by
// vector offset, the categorized analogy test set, nearest neighbours,
// averaged relation vectors, odd-one-out and sentence completion.
//
// All similarity search runs on unit-normalized rows. Ties are always broken
// toward the lower vocabulary index.

#pragma once

#include <algorithm>
#include <cmath>
#include <concepts>
#include <cstddef>
#include <cstdint>
#include <iomanip>
#include <istream>
#include <limits>
#include <optional>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "w2v/corpus.hpp"
#include "w2v/error.hpp"
#include "w2v/huffman.hpp"
#include "w2v/model.hpp"

namespace w2v {

struct WordVectors {
  Vocabulary vocab;
  std::size_t dim = 0;
  std::vector<float> data;  // vocab.size() x dim, row major
  bool normalized = false;

  std::size_t size() const noexcept { return vocab.size(); }
  std::span<const float> row(std::size_t w) const {
    return std::span<const float>(data).subspan(w * dim, dim);
  }
  std::span<float> row(std::size_t w) { return std::span<float>(data).subspan(w * dim, dim); }
};

template <std::floating_point T>
WordVectors make_word_vectors(const Vocabulary& vocab, const ModelParams<T>& params) {
  if (vocab.size() != params.vocab_size()) throw InvalidArgument("vocabulary and parameters disagree on size");
  WordVectors wv{vocab, params.dim(), {}, false};
  wv.data.reserve(params.input_data().size());
  for (auto x : params.input_data()) wv.data.push_back(static_cast<float>(x));
  return wv;
}

/// Copy with every row scaled to unit Euclidean norm. Zero rows are rejected.
inline WordVectors normalized(WordVectors wv) {
  if (wv.normalized) return wv;
  for (std::size_t w = 0; w < wv.size(); ++w) {
    auto r = wv.row(w);
    double n = 0;
    for (auto x : r) n += static_cast<double>(x) * x;
    if (n == 0) throw InvalidArgument("cannot normalize zero vector for word: " + wv.vocab.word(w));
    const double inv = 1.0 / std::sqrt(n);
    for (auto& x : r) x = static_cast<float>(x * inv);
  }
  wv.normalized = true;
  return wv;
}

namespace detail {

inline float dot(std::span<const float> a, std::span<const float> b) {
  float s0 = 0, s1 = 0, s2 = 0, s3 = 0;
  std::size_t i = 0;
  const std::size_t n = a.size();
  for (; i + 4 <= n; i += 4) {
    s0 += a[i] * b[i];
    s1 += a[i + 1] * b[i + 1];
    s2 += a[i + 2] * b[i + 2];
    s3 += a[i + 3] * b[i + 3];
  }
  for (; i < n; ++i) s0 += a[i] * b[i];
  return (s0 + s1) + (s2 + s3);
}

inline double norm(std::span<const float> v) {
  double n = 0;
  for (auto x : v) n += static_cast<double>(x) * x;
  return std::sqrt(n);
}

/// Holds a normalized view, copying only when the input is not normalized.
class UnitView {
 public:
  explicit UnitView(const WordVectors& wv) {
    if (wv.normalized) {
      ptr_ = &wv;
    } else {
      own_ = normalized(wv);
      ptr_ = &own_;
    }
  }
  const WordVectors& operator*() const { return *ptr_; }
  const WordVectors* operator->() const { return ptr_; }

 private:
  WordVectors own_;
  const WordVectors* ptr_ = nullptr;
};

inline std::size_t search_limit(const WordVectors& wv, std::optional<std::size_t> restrict_vocab) {
  return restrict_vocab ? std::min(*restrict_vocab, wv.size()) : wv.size();
}

inline std::optional<WordIndex> find_limited(const WordVectors& wv, std::string_view word, std::size_t limit) {
  auto idx = wv.vocab.find(word);
  if (!idx || *idx >= limit) return std::nullopt;
  return idx;
}

}  // namespace detail

struct Neighbor {
  std::string word;
  double cosine = 0;
  WordIndex index = 0;
};

/// Top-k rows of `unit` (which must be normalized) by cosine with `query`,
/// excluding `exclude` and anything at or beyond `limit`.
inline std::vector<Neighbor> search_by_vector(const WordVectors& unit, std::span<const float> query,
                                              std::size_t k, std::span<const WordIndex> exclude,
                                              std::size_t limit) {
  if (k < 1) throw InvalidArgument("k must be >= 1");
  if (query.size() != unit.dim) throw InvalidArgument("query vector has wrong dimension");
  const double qn = detail::norm(query);
  if (qn == 0) return {};
  struct Hit {
    float score;
    WordIndex index;
  };
  std::vector<Hit> top;
  top.reserve(k + 1);
  auto better = [](const Hit& a, const Hit& b) { return a.score > b.score || (a.score == b.score && a.index < b.index); };
  limit = std::min(limit, unit.size());
  for (std::size_t w = 0; w < limit; ++w) {
    if (std::find(exclude.begin(), exclude.end(), w) != exclude.end()) continue;
    const Hit h{detail::dot(query, unit.row(w)), static_cast<WordIndex>(w)};
    if (top.size() == k && !better(h, top.back())) continue;
    top.insert(std::upper_bound(top.begin(), top.end(), h, better), h);
    if (top.size() > k) top.pop_back();
  }
  std::vector<Neighbor> out;
  out.reserve(top.size());
  for (const auto& h : top) out.push_back({unit.vocab.word(h.index), h.score / qn, h.index});
  return out;
}

/// Top-k neighbours of a word, excluding the word itself and `exclude`.
inline std::vector<Neighbor> nearest_neighbors(const WordVectors& wv, std::string_view query, std::size_t k,
                                               std::span<const std::string> exclude = {},
                                               std::optional<std::size_t> restrict_vocab = std::nullopt) {
  if (k < 1) throw InvalidArgument("k must be >= 1");
  const detail::UnitView unit(wv);
  const auto q = unit->vocab.find(query);
  if (!q) throw OutOfVocabulary(std::string(query));
  std::vector<WordIndex> ex{*q};
  for (const auto& e : exclude) {
    if (auto i = unit->vocab.find(e)) ex.push_back(*i);
  }
  return search_by_vector(*unit, unit->row(*q), k, ex, detail::search_limit(*unit, restrict_vocab));
}

/// Top-k neighbours of an arbitrary vector.
inline std::vector<Neighbor> nearest_neighbors(const WordVectors& wv, std::span<const float> query, std::size_t k,
                                               std::span<const std::string> exclude = {},
                                               std::optional<std::size_t> restrict_vocab = std::nullopt) {
  const detail::UnitView unit(wv);
  std::vector<WordIndex> ex;
  for (const auto& e : exclude) {
    if (auto i = unit->vocab.find(e)) ex.push_back(*i);
  }
  return search_by_vector(*unit, query, k, ex, detail::search_limit(*unit, restrict_vocab));
}

/// Candidates for a:b :: c:? ranked by cosine with v_b - v_a + v_c, with the
/// three question words removed from the search. Empty when a word is out of
/// vocabulary (or beyond `restrict_vocab`) or the offset vector is zero.
inline std::vector<Neighbor> analogy_candidates(const WordVectors& wv, std::string_view a, std::string_view b,
                                                std::string_view c, std::size_t k,
                                                std::optional<std::size_t> restrict_vocab = std::nullopt) {
  const detail::UnitView unit(wv);
  const std::size_t limit = detail::search_limit(*unit, restrict_vocab);
  const auto ia = detail::find_limited(*unit, a, limit);
  const auto ib = detail::find_limited(*unit, b, limit);
  const auto ic = detail::find_limited(*unit, c, limit);
  if (!ia || !ib || !ic) return {};
  std::vector<float> x(unit->dim);
  const auto va = unit->row(*ia), vb = unit->row(*ib), vc = unit->row(*ic);
  for (std::size_t i = 0; i < x.size(); ++i) x[i] = vb[i] - va[i] + vc[i];
  const WordIndex ex[3] = {*ia, *ib, *ic};
  return search_by_vector(*unit, x, k, ex, limit);
}

inline std::optional<std::string> answer_analogy(const WordVectors& wv, std::string_view a, std::string_view b,
                                                 std::string_view c,
                                                 std::optional<std::size_t> restrict_vocab = std::nullopt) {
  auto hits = analogy_candidates(wv, a, b, c, 1, restrict_vocab);
  if (hits.empty()) return std::nullopt;
  return hits.front().word;
}

/// Mean of (v_y - v_x) over the pairs, on unit-normalized rows.
inline std::vector<float> relation_vector(const WordVectors& wv,
                                          std::span<const std::pair<std::string, std::string>> pairs) {
  if (pairs.empty()) throw InvalidArgument("relation_vector: need at least one pair");
  const detail::UnitView unit(wv);
  std::vector<double> acc(unit->dim, 0.0);
  for (const auto& [x, y] : pairs) {
    const auto vx = unit->row(unit->vocab.at(x));
    const auto vy = unit->row(unit->vocab.at(y));
    for (std::size_t i = 0; i < acc.size(); ++i) acc[i] += static_cast<double>(vy[i]) - vx[i];
  }
  std::vector<float> out(acc.size());
  for (std::size_t i = 0; i < acc.size(); ++i) out[i] = static_cast<float>(acc[i] / static_cast<double>(pairs.size()));
  return out;
}

/// Answers "c is to ? as the relation describes" with X = relation + v_c,
/// excluding c from the search.
inline std::vector<Neighbor> apply_relation(const WordVectors& wv, std::span<const float> relation,
                                            std::string_view c, std::size_t k,
                                            std::optional<std::size_t> restrict_vocab = std::nullopt) {
  const detail::UnitView unit(wv);
  if (relation.size() != unit->dim) throw InvalidArgument("relation vector has wrong dimension");
  const auto ic = unit->vocab.at(c);
  std::vector<float> x(unit->dim);
  const auto vc = unit->row(ic);
  for (std::size_t i = 0; i < x.size(); ++i) x[i] = relation[i] + vc[i];
  const WordIndex ex[1] = {ic};
  return search_by_vector(*unit, x, k, ex, detail::search_limit(*unit, restrict_vocab));
}

/// The listed word least similar (cosine) to the mean of all listed vectors.
inline std::string odd_one_out(const WordVectors& wv, std::span<const std::string> words) {
  if (words.size() < 3) throw InvalidArgument("odd_one_out: need at least 3 words");
  const detail::UnitView unit(wv);
  std::vector<WordIndex> idx;
  for (const auto& w : words) idx.push_back(unit->vocab.at(w));
  std::vector<float> mean(unit->dim, 0.0f);
  for (auto i : idx) {
    const auto r = unit->row(i);
    for (std::size_t d = 0; d < mean.size(); ++d) mean[d] += r[d];
  }
  for (auto& m : mean) m /= static_cast<float>(idx.size());
  const double mn = detail::norm(mean);
  WordIndex best = 0;
  double best_cos = std::numeric_limits<double>::infinity();
  for (auto i : idx) {
    const double cos = mn == 0 ? 0.0 : detail::dot(unit->row(i), mean) / mn;
    if (cos < best_cos || (cos == best_cos && i < best)) {
      best_cos = cos;
      best = i;
    }
  }
  return unit->vocab.word(best);
}

// ---------------------------------------------------------------------------
// Analogy test set

enum class QuestionKind { semantic, syntactic };

inline std::string_view to_string(QuestionKind k) { return k == QuestionKind::semantic ? "semantic" : "syntactic"; }

struct Question {
  std::string a, b, c, d;
};

struct QuestionCategory {
  std::string name;
  QuestionKind kind = QuestionKind::semantic;
  std::vector<Question> questions;
};

struct QuestionSet {
  std::vector<QuestionCategory> categories;

  std::size_t question_count() const {
    std::size_t n = 0;
    for (const auto& c : categories) n += c.questions.size();
    return n;
  }
};

/// Kind of a published category name; names starting with "gram" are
/// syntactic. Unknown names yield nullopt.
inline std::optional<QuestionKind> category_kind(std::string_view name) {
  static constexpr std::string_view kSemantic[] = {"capital-common-countries", "capital-world", "currency",
                                                   "city-in-state", "family"};
  static constexpr std::string_view kSyntactic[] = {
      "gram1-adjective-to-adverb", "gram2-opposite", "gram3-comparative",       "gram4-superlative",
      "gram5-present-participle",  "gram6-nationality-adjective", "gram7-past-tense", "gram8-plural",
      "gram9-plural-verbs"};
  for (auto s : kSemantic) {
    if (s == name) return QuestionKind::semantic;
  }
  for (auto s : kSyntactic) {
    if (s == name) return QuestionKind::syntactic;
  }
  if (name.starts_with("gram")) return QuestionKind::syntactic;
  return std::nullopt;
}

struct QuestionParseOptions {
  bool lowercase = false;
};

/// Parses ": category" headers followed by 4-token question lines.
inline QuestionSet parse_questions(std::istream& in, const QuestionParseOptions& options = {}) {
  QuestionSet qs;
  std::string line;
  std::size_t line_no = 0;
  auto fail = [&](const std::string& msg) {
    throw FormatError("questions line " + std::to_string(line_no) + ": " + msg);
  };
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    std::istringstream ls(line);
    std::vector<std::string> tok;
    for (std::string t; ls >> t;) tok.push_back(std::move(t));
    if (tok.empty()) continue;
    if (tok[0] == ":" || tok[0].starts_with(":")) {
      std::string name = tok[0] == ":" ? (tok.size() == 2 ? tok[1] : std::string()) : tok[0].substr(1);
      if (name.empty() || (tok[0] == ":" && tok.size() != 2) || (tok[0] != ":" && tok.size() != 1)) {
        fail("malformed category header");
      }
      auto kind = category_kind(name);
      if (!kind) fail("unknown category '" + name + "'");
      qs.categories.push_back({name, *kind, {}});
      continue;
    }
    if (tok.size() != 4) fail("expected 4 words, got " + std::to_string(tok.size()));
    if (qs.categories.empty()) fail("question before any category header");
    if (options.lowercase) {
      for (auto& t : tok) {
        for (auto& ch : t) {
          if (ch >= 'A' && ch <= 'Z') ch = static_cast<char>(ch - 'A' + 'a');
        }
      }
    }
    qs.categories.back().questions.push_back({tok[0], tok[1], tok[2], tok[3]});
  }
  return qs;
}

inline QuestionSet parse_questions(std::string_view text, const QuestionParseOptions& options = {}) {
  std::istringstream in{std::string(text)};
  return parse_questions(in, options);
}

struct CategoryResult {
  std::string name;
  QuestionKind kind = QuestionKind::semantic;
  std::size_t attempted = 0;
  std::size_t skipped_oov = 0;
  std::size_t correct = 0;

  std::size_t size() const noexcept { return attempted + skipped_oov; }
  double accuracy() const noexcept {
    return attempted == 0 ? 0.0 : static_cast<double>(correct) / static_cast<double>(attempted);
  }
  double coverage() const noexcept {
    return size() == 0 ? 0.0 : static_cast<double>(attempted) / static_cast<double>(size());
  }
  void add(const CategoryResult& o) {
    attempted += o.attempted;
    skipped_oov += o.skipped_oov;
    correct += o.correct;
  }
};

struct EvalReport {
  std::vector<CategoryResult> categories;
  CategoryResult semantic{"semantic", QuestionKind::semantic};
  CategoryResult syntactic{"syntactic", QuestionKind::syntactic};
  CategoryResult total{"total", QuestionKind::semantic};
};

/// Exact-match accuracy per category. Questions with any word outside the
/// (restricted) vocabulary are skipped and counted.
inline EvalReport evaluate(const WordVectors& wv, const QuestionSet& qs,
                           std::optional<std::size_t> restrict_vocab = std::nullopt) {
  const detail::UnitView unit(wv);
  const std::size_t limit = detail::search_limit(*unit, restrict_vocab);
  EvalReport report;
  for (const auto& cat : qs.categories) {
    CategoryResult r{cat.name, cat.kind};
    for (const auto& q : cat.questions) {
      if (!detail::find_limited(*unit, q.a, limit) || !detail::find_limited(*unit, q.b, limit) ||
          !detail::find_limited(*unit, q.c, limit) || !detail::find_limited(*unit, q.d, limit)) {
        ++r.skipped_oov;
        continue;
      }
      ++r.attempted;
      auto answer = answer_analogy(*unit, q.a, q.b, q.c, limit);
      if (answer && *answer == q.d) ++r.correct;
    }
    (cat.kind == QuestionKind::semantic ? report.semantic : report.syntactic).add(r);
    report.total.add(r);
    report.categories.push_back(std::move(r));
  }
  return report;
}

inline std::string format_percent(double fraction) {
  std::ostringstream out;
  out << std::fixed << std::setprecision(1) << fraction * 100.0 << '%';
  return out.str();
}

/// Human-readable table with Semantic/Syntactic/Total summary lines.
inline std::string format_report_table(const EvalReport& report) {
  std::ostringstream out;
  out << std::left << std::setw(30) << "category" << std::setw(10) << "kind" << std::right << std::setw(10)
      << "attempted" << std::setw(9) << "skipped" << std::setw(9) << "correct" << std::setw(10) << "accuracy"
      << '\n';
  for (const auto& c : report.categories) {
    out << std::left << std::setw(30) << c.name << std::setw(10) << to_string(c.kind) << std::right
        << std::setw(10) << c.attempted << std::setw(9) << c.skipped_oov << std::setw(9) << c.correct
        << std::setw(10) << format_percent(c.accuracy()) << '\n';
  }
  auto line = [&](const char* label, const CategoryResult& r) {
    out << label << ": " << format_percent(r.accuracy()) << " (" << r.correct << '/' << r.attempted
        << ", skipped " << r.skipped_oov << ", coverage " << format_percent(r.coverage()) << ")\n";
  };
  line("Semantic", report.semantic);
  line("Syntactic", report.syntactic);
  line("Total", report.total);
  return out.str();
}

/// One JSON object per line: each category, then the three aggregates.
inline std::string format_report_json(const EvalReport& report) {
  std::ostringstream out;
  auto record = [&](const CategoryResult& r, std::string_view kind) {
    nlohmann::json j = {{"name", r.name},           {"kind", kind},         {"attempted", r.attempted},
                        {"skipped", r.skipped_oov}, {"correct", r.correct}, {"accuracy", r.accuracy()}};
    out << j.dump() << '\n';
  };
  for (const auto& c : report.categories) record(c, to_string(c.kind));
  record(report.semantic, "aggregate");
  record(report.syntactic, "aggregate");
  record(report.total, "aggregate");
  return out.str();
}

// ---------------------------------------------------------------------------
// Sentence completion

/// A token made only of underscores (at least three) marks the blank.
inline bool is_blank_token(std::string_view t) {
  return t.size() >= 3 && std::all_of(t.begin(), t.end(), [](char c) { return c == '_'; });
}

struct CompletionResult {
  std::size_t best = 0;                        // index into candidates
  std::vector<std::optional<double>> scores;   // nullopt for OOV candidates
};

/// Scores each candidate w by sum over in-vocabulary words u within `window`
/// positions of the blank of log p(u | input row of w).
template <std::floating_point T>
CompletionResult sentence_completion_score(const ModelParams<T>& params, const HuffmanCoding& coding,
                                           const Vocabulary& vocab, std::span<const std::string> tokens,
                                           std::span<const std::string> candidates, std::size_t window) {
  if (candidates.size() < 2) throw InvalidArgument("sentence completion: need at least 2 candidates");
  if (window < 1) throw InvalidArgument("sentence completion: window must be >= 1");
  std::optional<std::size_t> blank;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    if (!is_blank_token(tokens[i])) continue;
    if (blank) throw InvalidArgument("sentence completion: more than one blank");
    blank = i;
  }
  if (!blank) throw InvalidArgument("sentence completion: no blank token in sentence");

  std::vector<WordIndex> surrounding;
  const std::size_t lo = *blank >= window ? *blank - window : 0;
  const std::size_t hi = std::min(tokens.size() - 1, *blank + window);
  for (std::size_t i = lo; i <= hi; ++i) {
    if (i == *blank) continue;
    if (auto idx = vocab.find(tokens[i])) surrounding.push_back(*idx);
  }

  CompletionResult result;
  std::optional<std::size_t> best;
  for (std::size_t k = 0; k < candidates.size(); ++k) {
    const auto w = vocab.find(candidates[k]);
    if (!w) {
      result.scores.emplace_back();
      continue;
    }
    double score = 0;
    for (auto u : surrounding) score += word_log_probability(params, coding, params.input_row(*w), u);
    result.scores.emplace_back(score);
    if (!best || score > *result.scores[*best]) best = k;
  }
  if (!best) throw InvalidArgument("sentence completion: all candidates are out of vocabulary");
  result.best = *best;
  return result;
}

}  // namespace w2v
