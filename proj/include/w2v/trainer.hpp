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

// Epoch driver: dynamic context windows, linear learning-rate decay, and
// lock-free parallel workers over contiguous corpus shards.

#pragma once

#include <algorithm>
#include <atomic>
#include <chrono>
#include <concepts>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "w2v/complexity.hpp"
#include "w2v/corpus.hpp"
#include "w2v/error.hpp"
#include "w2v/huffman.hpp"
#include "w2v/model.hpp"

namespace w2v {

struct TrainingConfig {
  Architecture architecture = Architecture::cbow;
  std::size_t dim = 300;
  std::size_t window = 5;
  std::size_t epochs = 1;
  double initial_lr = 0.025;
  std::uint64_t min_count = 5;
  std::size_t max_vocab = 0;
  bool lowercase = false;
  std::size_t workers = 1;
  std::uint64_t seed = 1;
  double lr_floor_ratio = 1e-4;
  /// Always use the full window C instead of sampling R in [1, C].
  bool static_window = false;
  StepOptions step;

  void validate() const {
    if (architecture != Architecture::cbow && architecture != Architecture::skipgram) {
      throw InvalidArgument("training supports only cbow and skipgram");
    }
    if (dim < 1) throw InvalidArgument("dim must be positive");
    if (window < 1) throw InvalidArgument("window must be positive");
    if (epochs < 1) throw InvalidArgument("epochs must be positive");
    if (!(initial_lr > 0)) throw InvalidArgument("initial learning rate must be positive");
    if (min_count < 1) throw InvalidArgument("min_count must be positive");
    if (workers < 1) throw InvalidArgument("workers must be positive");
    if (!(lr_floor_ratio > 0 && lr_floor_ratio < 1)) throw InvalidArgument("lr_floor_ratio must be in (0, 1)");
  }
};

/// R uniform on {1, ..., C}.
template <class Rng>
std::size_t sample_window(std::size_t max_window, Rng& rng) {
  if (max_window < 1) throw InvalidArgument("max window must be >= 1");
  return std::uniform_int_distribution<std::size_t>(1, max_window)(rng);
}

/// alpha0 * (1 - processed / (total + 1)), never below alpha0 * floor_ratio.
inline double learning_rate(std::uint64_t words_processed, std::uint64_t total_words, double initial_lr,
                            double floor_ratio) {
  if (total_words == 0) throw InvalidArgument("learning_rate: total_words must be positive");
  const double decayed =
      initial_lr * (1.0 - static_cast<double>(words_processed) / (static_cast<double>(total_words) + 1.0));
  return std::max(decayed, initial_lr * floor_ratio);
}

struct Shard {
  std::size_t begin = 0;  // first sentence
  std::size_t end = 0;    // one past the last sentence
  std::uint64_t tokens = 0;
};

/// Contiguous sentence ranges with near-equal token counts. Each cut sits at
/// the sentence boundary closest to its ideal position, so every shard is
/// within one sentence of total/workers. Empty shards are dropped.
inline std::vector<Shard> shard_corpus(const EncodedCorpus& corpus, std::size_t workers) {
  if (workers < 1) throw InvalidArgument("shard_corpus: workers must be >= 1");
  const std::size_t n = corpus.sentence_count();
  std::vector<std::uint64_t> prefix(n + 1, 0);
  for (std::size_t i = 0; i < n; ++i) prefix[i + 1] = prefix[i] + corpus.sentence(i).size();
  const std::uint64_t total = prefix[n];

  std::vector<std::size_t> cuts{0};
  for (std::size_t k = 1; k < workers; ++k) {
    const double ideal = static_cast<double>(total) * static_cast<double>(k) / static_cast<double>(workers);
    auto it = std::lower_bound(prefix.begin(), prefix.end(), ideal,
                               [](std::uint64_t p, double v) { return static_cast<double>(p) < v; });
    std::size_t cut = static_cast<std::size_t>(it - prefix.begin());
    if (cut > 0 && ideal - static_cast<double>(prefix[cut - 1]) <= static_cast<double>(prefix[cut]) - ideal) {
      --cut;
    }
    cuts.push_back(std::max(cut, cuts.back()));
  }
  cuts.push_back(n);

  std::vector<Shard> shards;
  for (std::size_t k = 0; k + 1 < cuts.size(); ++k) {
    const Shard s{cuts[k], cuts[k + 1], prefix[cuts[k + 1]] - prefix[cuts[k]]};
    if (s.tokens > 0) shards.push_back(s);
  }
  if (shards.empty()) shards.push_back({0, n, 0});
  return shards;
}

struct TrainProgress {
  std::uint64_t words_processed = 0;
  double current_lr = 0;
  double words_per_second = 0;
  std::size_t epoch = 0;
  double fraction_done = 0;
};

struct TrainReport {
  std::uint64_t positions = 0;      // target positions visited
  std::uint64_t steps = 0;          // SGD steps taken
  std::uint64_t skipped_empty = 0;  // positions with no in-sentence neighbour
  std::size_t workers_used = 0;
  double seconds = 0;
  double words_per_second = 0;
  double final_lr = 0;

  void merge(const TrainReport& o) {
    positions += o.positions;
    steps += o.steps;
    skipped_empty += o.skipped_empty;
  }
};

/// Cursor of a single-worker run, enough to resume it exactly.
struct TrainState {
  std::uint64_t words_processed = 0;
  std::size_t epoch = 0;
  std::size_t sentence = 0;
  std::size_t position = 0;
  std::string rng_state;

  bool operator==(const TrainState&) const = default;
};

template <std::floating_point T = float>
class Trainer {
 public:
  /// Called as (sentence, center position, context position) for every
  /// training pair; from worker threads when workers > 1.
  using PairObserver = std::function<void(std::size_t, std::size_t, std::size_t)>;
  using ProgressCallback = std::function<void(const TrainProgress&)>;

  Trainer(const EncodedCorpus& corpus, const HuffmanCoding& coding, TrainingConfig config,
          ModelParams<T>& params)
      : corpus_(&corpus), coding_(&coding), config_(std::move(config)), params_(&params) {
    config_.validate();
    if (corpus.empty()) throw InvalidArgument("train: corpus has no in-vocabulary tokens");
    if (params.dim() != config_.dim) throw InvalidArgument("train: parameter dimension does not match config");
    if (params.vocab_size() != coding.vocab_size()) {
      throw InvalidArgument("train: parameters and Huffman coding disagree on vocabulary size");
    }
    if (corpus.max_index_bound() > coding.vocab_size()) {
      throw InvalidArgument("train: corpus contains indices outside the vocabulary");
    }
    total_words_ = static_cast<std::uint64_t>(config_.epochs) * corpus.token_count();
    std::mt19937_64 rng(config_.seed);
    state_.rng_state = serialize(rng);
  }

  const TrainingConfig& config() const noexcept { return config_; }
  const TrainState& state() const noexcept { return state_; }
  std::uint64_t total_words() const noexcept { return total_words_; }
  bool finished() const noexcept { return state_.epoch >= config_.epochs; }

  /// Restores a cursor saved from a single-worker run over the same corpus.
  void restore(const TrainState& state) {
    if (state.epoch > config_.epochs || state.sentence > corpus_->sentence_count()) {
      throw InvalidArgument("train: saved state does not fit this corpus/config");
    }
    std::istringstream in(state.rng_state);
    std::mt19937_64 probe;
    if (!(in >> probe)) throw InvalidArgument("train: bad RNG state");
    state_ = state;
  }

  void set_pair_observer(PairObserver obs) { observer_ = std::move(obs); }
  void set_progress_callback(ProgressCallback cb, double interval_seconds = 1.0) {
    progress_ = std::move(cb);
    progress_interval_ = interval_seconds;
  }

  /// Runs all remaining work, in parallel when config.workers > 1.
  TrainReport run() {
    const auto start = std::chrono::steady_clock::now();
    TrainReport report;
    if (config_.workers == 1 || finished()) {
      report = run_single(UINT64_MAX);
      report.workers_used = 1;
    } else {
      if (state_ != fresh_state()) throw InvalidArgument("train: resuming requires a single worker");
      report = run_parallel();
    }
    finish_report(report, start);
    return report;
  }

  /// Single worker: processes at most `max_positions` target positions.
  TrainReport run_for(std::uint64_t max_positions) {
    const auto start = std::chrono::steady_clock::now();
    auto report = run_single(max_positions);
    report.workers_used = 1;
    finish_report(report, start);
    return report;
  }

 private:
  static constexpr std::uint64_t kSyncWords = 10000;

  struct Cursor {
    std::size_t epoch = 0;
    std::size_t sentence = 0;
    std::size_t position = 0;
  };

  static std::string serialize(const std::mt19937_64& rng) {
    std::ostringstream out;
    out << rng;
    return out.str();
  }

  TrainState fresh_state() const {
    TrainState s;
    s.rng_state = serialize(std::mt19937_64(config_.seed));
    return s;
  }

  void finish_report(TrainReport& report, std::chrono::steady_clock::time_point start) const {
    report.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    report.words_per_second = report.seconds > 0 ? static_cast<double>(report.positions) / report.seconds : 0;
    report.final_lr = current_lr(state_.words_processed);
  }

  double current_lr(std::uint64_t words) const {
    return learning_rate(std::min(words, total_words_), total_words_, config_.initial_lr,
                         config_.lr_floor_ratio);
  }

  template <class Access>
  TrainReport run_worker(const Shard& shard, Cursor& cur, std::mt19937_64& rng, std::uint64_t budget,
                         std::atomic<std::uint64_t>& global, bool reports) {
    TrainReport rep;
    StepWorkspace<T> ws(config_.dim);
    std::vector<WordIndex> context;
    context.reserve(2 * config_.window);
    std::uint64_t pending = 0;
    std::uint64_t since_check = 0;
    const auto t0 = std::chrono::steady_clock::now();
    auto last_report = t0;
    const bool skipgram = config_.architecture == Architecture::skipgram;

    while (cur.epoch < config_.epochs && rep.positions < budget) {
      if (cur.sentence >= shard.end) {
        cur.sentence = shard.begin;
        cur.position = 0;
        ++cur.epoch;
        continue;
      }
      const auto sent = corpus_->sentence(cur.sentence);
      if (cur.position >= sent.size()) {
        ++cur.sentence;
        cur.position = 0;
        continue;
      }
      const std::uint64_t seen = global.load(std::memory_order_relaxed) + pending;
      const T lr = static_cast<T>(current_lr(seen));

      const std::size_t t = cur.position;
      const std::size_t r = config_.static_window ? config_.window : sample_window(config_.window, rng);
      const std::size_t lo = t >= r ? t - r : 0;
      const std::size_t hi = std::min(sent.size() - 1, t + r);
      if (hi == lo) {
        ++rep.skipped_empty;
      } else if (skipgram) {
        for (std::size_t c = lo; c <= hi; ++c) {
          if (c == t) continue;
          if (observer_) observer_(cur.sentence, t, c);
          skipgram_step<Access>(*params_, *coding_, sent[t], sent[c], lr, config_.step, ws);
          ++rep.steps;
        }
      } else {
        context.clear();
        for (std::size_t c = lo; c <= hi; ++c) {
          if (c == t) continue;
          if (observer_) observer_(cur.sentence, t, c);
          context.push_back(sent[c]);
        }
        cbow_step<Access>(*params_, *coding_, std::span<const WordIndex>(context), sent[t], lr, config_.step, ws);
        ++rep.steps;
      }
      ++rep.positions;
      ++cur.position;
      if (++pending >= kSyncWords) {
        global.fetch_add(pending, std::memory_order_relaxed);
        pending = 0;
      }
      if (reports && progress_ && ++since_check >= kSyncWords) {
        since_check = 0;
        const auto now = std::chrono::steady_clock::now();
        if (std::chrono::duration<double>(now - last_report).count() >= progress_interval_) {
          last_report = now;
          const std::uint64_t words = global.load(std::memory_order_relaxed) + pending;
          const double secs = std::chrono::duration<double>(now - t0).count();
          progress_({words, current_lr(words), secs > 0 ? static_cast<double>(rep.positions) / secs : 0,
                     cur.epoch, static_cast<double>(words) / static_cast<double>(total_words_)});
        }
      }
    }
    global.fetch_add(pending, std::memory_order_relaxed);
    return rep;
  }

  TrainReport run_single(std::uint64_t budget) {
    std::mt19937_64 rng;
    {
      std::istringstream in(state_.rng_state);
      in >> rng;
    }
    const Shard whole{0, corpus_->sentence_count(), corpus_->token_count()};
    Cursor cur{state_.epoch, state_.sentence, state_.position};
    std::atomic<std::uint64_t> global{state_.words_processed};
    auto rep = run_worker<DirectAccess>(whole, cur, rng, budget, global, true);
    state_.words_processed = global.load();
    state_.epoch = cur.epoch;
    state_.sentence = cur.sentence;
    state_.position = cur.position;
    state_.rng_state = serialize(rng);
    return rep;
  }

  TrainReport run_parallel() {
    const auto shards = shard_corpus(*corpus_, config_.workers);
    std::atomic<std::uint64_t> global{0};
    std::vector<TrainReport> reports(shards.size());
    {
      std::vector<std::jthread> threads;
      threads.reserve(shards.size());
      for (std::size_t k = 0; k < shards.size(); ++k) {
        threads.emplace_back([&, k] {
          std::mt19937_64 rng(config_.seed + k);
          Cursor cur{0, shards[k].begin, 0};
          reports[k] = run_worker<SharedAccess>(shards[k], cur, rng, UINT64_MAX, global, k == 0);
        });
      }
    }
    TrainReport total;
    for (const auto& r : reports) total.merge(r);
    total.workers_used = shards.size();
    state_.words_processed = global.load();
    state_.epoch = config_.epochs;
    state_.sentence = 0;
    state_.position = 0;
    return total;
  }

  const EncodedCorpus* corpus_;
  const HuffmanCoding* coding_;
  TrainingConfig config_;
  ModelParams<T>* params_;
  std::uint64_t total_words_ = 0;
  TrainState state_;
  PairObserver observer_;
  ProgressCallback progress_;
  double progress_interval_ = 1.0;
};

template <std::floating_point T = float>
struct TrainResult {
  HuffmanCoding coding;
  ModelParams<T> params;
  TrainReport report;
};

/// Builds the Huffman tree, initializes parameters and trains to completion.
template <std::floating_point T = float>
TrainResult<T> train(const EncodedCorpus& corpus, const Vocabulary& vocab, const TrainingConfig& config) {
  config.validate();
  TrainResult<T> out;
  out.coding = build_huffman(vocab);
  out.params = init_params<T>(vocab.size(), config.dim, config.seed);
  Trainer<T> trainer(corpus, out.coding, config, out.params);
  out.report = trainer.run();
  return out;
}

}  // namespace w2v
