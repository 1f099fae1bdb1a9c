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

// Trainable parameters and the hierarchical-softmax kernels for CBOW and
// Skip-gram.
//
// p(w | h) = prod_j sigma(s_j * <node[n_j], h>), s_j = +1 for code bit 0 and
// -1 for bit 1, over the Huffman path n_1..n_L of w. One SGD step on
// -log p(w | h) uses label t_j = 1 - bit_j and g_j = lr * (t_j - sigma(f_j)):
//
//   e       += g_j * node[n_j]     (with the node value before its update)
//   node[n_j] += g_j * h
//
// and finally adds e to every input row that formed h.

#pragma once

#include <algorithm>
#include <array>
#include <atomic>
#include <cmath>
#include <concepts>
#include <cstddef>
#include <cstdint>
#include <random>
#include <span>
#include <type_traits>
#include <vector>

#include "w2v/corpus.hpp"
#include "w2v/error.hpp"
#include "w2v/huffman.hpp"

namespace w2v {

template <std::floating_point T>
class ModelParams {
 public:
  using value_type = T;

  ModelParams() = default;
  ModelParams(std::size_t vocab_size, std::size_t dim)
      : vocab_size_(vocab_size),
        dim_(dim),
        input_(vocab_size * dim, T{0}),
        nodes_((vocab_size > 0 ? vocab_size - 1 : 0) * dim, T{0}) {}

  std::size_t vocab_size() const noexcept { return vocab_size_; }
  std::size_t inner_count() const noexcept { return vocab_size_ > 0 ? vocab_size_ - 1 : 0; }
  std::size_t dim() const noexcept { return dim_; }

  std::span<T> input_row(std::size_t w) { return std::span<T>(input_).subspan(w * dim_, dim_); }
  std::span<const T> input_row(std::size_t w) const {
    return std::span<const T>(input_).subspan(w * dim_, dim_);
  }
  std::span<T> node_row(std::size_t n) { return std::span<T>(nodes_).subspan(n * dim_, dim_); }
  std::span<const T> node_row(std::size_t n) const {
    return std::span<const T>(nodes_).subspan(n * dim_, dim_);
  }

  std::span<T> input_data() noexcept { return input_; }
  std::span<const T> input_data() const noexcept { return input_; }
  std::span<T> node_data() noexcept { return nodes_; }
  std::span<const T> node_data() const noexcept { return nodes_; }

  bool all_finite() const {
    auto finite = [](T x) { return std::isfinite(x); };
    return std::all_of(input_.begin(), input_.end(), finite) &&
           std::all_of(nodes_.begin(), nodes_.end(), finite);
  }

  bool operator==(const ModelParams&) const = default;

 private:
  std::size_t vocab_size_ = 0;
  std::size_t dim_ = 0;
  std::vector<T> input_;
  std::vector<T> nodes_;
};

/// Input rows uniform on [-0.5/D, 0.5/D], node rows zero.
template <std::floating_point T = float>
ModelParams<T> init_params(std::size_t vocab_size, std::size_t dim, std::uint64_t seed) {
  if (vocab_size < 2) throw InvalidArgument("init_params: vocabulary size must be >= 2");
  if (dim < 1) throw InvalidArgument("init_params: dimension must be >= 1");
  ModelParams<T> p(vocab_size, dim);
  std::mt19937_64 rng(seed);
  const double half = 0.5 / static_cast<double>(dim);
  std::uniform_real_distribution<double> dist(-half, half);
  for (auto& x : p.input_data()) x = static_cast<T>(dist(rng));
  return p;
}

// ---------------------------------------------------------------------------
// Sigmoid

enum class SigmoidMode {
  /// Clamped 1000-entry table over [-6, 6]; nodes with |f| > 6 are skipped.
  table,
  /// Exact logistic function, no skipping. Used by gradient checks.
  exact,
};

inline constexpr double kSigmoidBound = 6.0;

inline double exact_sigmoid(double x) {
  if (x >= 0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

/// log(sigmoid(x)) without overflow or catastrophic cancellation.
inline double log_sigmoid(double x) {
  if (x >= 0) return -std::log1p(std::exp(-x));
  return x - std::log1p(std::exp(x));
}

class SigmoidTable {
 public:
  static constexpr std::size_t kSize = 1000;

  static const SigmoidTable& instance() {
    static const SigmoidTable table;
    return table;
  }

  /// Argument must lie in [-6, 6]. The end entries are sigma(-6) and sigma(6).
  double operator()(double x) const {
    const auto i = static_cast<std::size_t>((x + kSigmoidBound) * kScale + 0.5);
    return values_[std::min(i, kSize - 1)];
  }

 private:
  static constexpr double kScale = (kSize - 1) / (2 * kSigmoidBound);

  SigmoidTable() {
    for (std::size_t i = 0; i < kSize; ++i) {
      values_[i] = exact_sigmoid(-kSigmoidBound + static_cast<double>(i) / kScale);
    }
  }

  std::array<double, kSize> values_{};
};

// ---------------------------------------------------------------------------
// Memory access policies for shared parameter rows.
//
// Several workers may update the same rows without locking. SharedAccess
// routes every element access through a relaxed std::atomic_ref, so races
// lose or interleave updates but never tear a value or invoke undefined
// behaviour. DirectAccess is for single-worker training.

struct DirectAccess {
  template <class T>
  static T load(const T& x) noexcept {
    return x;
  }
  template <class T>
  static void store(T& x, T v) noexcept {
    x = v;
  }
};

struct SharedAccess {
  template <class T>
  static T load(const T& x) noexcept {
    return std::atomic_ref<T>(const_cast<T&>(x)).load(std::memory_order_relaxed);
  }
  template <class T>
  static void store(T& x, T v) noexcept {
    std::atomic_ref<T>(x).store(v, std::memory_order_relaxed);
  }
};

struct StepOptions {
  SigmoidMode sigmoid = SigmoidMode::table;
  /// Scale the back-propagated error by 1/|context| for CBOW, giving the
  /// exact gradient of the averaged projection. Off by default: every
  /// context row receives the full error.
  bool cbow_mean_gradient = false;
};

/// Per-worker scratch vectors so steps do not allocate.
template <std::floating_point T>
struct StepWorkspace {
  explicit StepWorkspace(std::size_t dim) : hidden(dim), error(dim) {}
  std::vector<T> hidden;
  std::vector<T> error;
};

namespace detail {

template <class Access, class T>
T dot(std::span<const T> row, std::span<const T> h) {
  T acc{0};
  for (std::size_t i = 0; i < h.size(); ++i) acc += Access::load(row[i]) * h[i];
  return acc;
}

}  // namespace detail

/// Walks the path of `target`: updates node rows and accumulates the error
/// for the hidden vector into `error` (which is overwritten). Returns the
/// number of nodes that were updated.
template <class Access = DirectAccess, std::floating_point T>
std::size_t hierarchical_update(ModelParams<T>& params, const HuffmanCoding& coding, std::size_t target,
                                std::span<const T> hidden, std::span<T> error, T lr, SigmoidMode mode) {
  std::fill(error.begin(), error.end(), T{0});
  const auto code = coding.code(target);
  const auto path = coding.path(target);
  const std::size_t dim = hidden.size();
  std::size_t updated = 0;
  for (std::size_t j = 0; j < code.size(); ++j) {
    auto node = params.node_row(path[j]);
    const T f = detail::dot<Access>(std::span<const T>(node), hidden);
    double sig = 0;
    if (mode == SigmoidMode::table) {
      if (f < -kSigmoidBound || f > kSigmoidBound) continue;
      sig = SigmoidTable::instance()(f);
    } else {
      sig = exact_sigmoid(f);
    }
    const T g = static_cast<T>((1.0 - code[j] - sig) * lr);
    for (std::size_t i = 0; i < dim; ++i) {
      const T n = Access::load(node[i]);
      error[i] += g * n;
      Access::store(node[i], n + g * hidden[i]);
    }
    ++updated;
  }
  return updated;
}

/// One SGD step predicting `target` from the mean of the input rows in
/// `inputs`. The error is added to each input row (scaled by 1/|inputs| when
/// `cbow_mean_gradient` is set). Returns false, touching nothing, when
/// `inputs` is empty.
template <class Access = DirectAccess, std::floating_point T>
bool step_pair(ModelParams<T>& params, const HuffmanCoding& coding, std::span<const WordIndex> inputs,
               std::size_t target, T lr, const StepOptions& options, StepWorkspace<T>& ws) {
  if (inputs.empty()) return false;
  const std::size_t dim = params.dim();
  auto& h = ws.hidden;
  std::fill(h.begin(), h.end(), T{0});
  for (auto w : inputs) {
    auto row = params.input_row(w);
    for (std::size_t i = 0; i < dim; ++i) h[i] += Access::load(row[i]);
  }
  if (inputs.size() > 1) {
    const T inv = T{1} / static_cast<T>(inputs.size());
    for (auto& x : h) x *= inv;
  }
  hierarchical_update<Access>(params, coding, target, std::span<const T>(h), std::span<T>(ws.error), lr,
                              options.sigmoid);
  const T scale =
      (options.cbow_mean_gradient && inputs.size() > 1) ? T{1} / static_cast<T>(inputs.size()) : T{1};
  for (auto w : inputs) {
    auto row = params.input_row(w);
    for (std::size_t i = 0; i < dim; ++i) Access::store(row[i], Access::load(row[i]) + scale * ws.error[i]);
  }
  return true;
}

/// Skip-gram: h = input row of `center`, predicts `context`.
template <class Access = DirectAccess, std::floating_point T>
void skipgram_step(ModelParams<T>& params, const HuffmanCoding& coding, WordIndex center, WordIndex context,
                   T lr, const StepOptions& options, StepWorkspace<T>& ws) {
  const WordIndex in[1] = {center};
  step_pair<Access>(params, coding, std::span<const WordIndex>(in), context, lr, options, ws);
}

template <std::floating_point T>
void skipgram_step(ModelParams<T>& params, const HuffmanCoding& coding, WordIndex center, WordIndex context,
                   T lr, const StepOptions& options = {}) {
  StepWorkspace<T> ws(params.dim());
  skipgram_step(params, coding, center, context, lr, options, ws);
}

/// CBOW: h = mean of the context rows, predicts `target`. Returns false for
/// an empty context (no update).
template <class Access = DirectAccess, std::floating_point T>
bool cbow_step(ModelParams<T>& params, const HuffmanCoding& coding, std::span<const WordIndex> context,
               WordIndex target, T lr, const StepOptions& options, StepWorkspace<T>& ws) {
  return step_pair<Access>(params, coding, context, target, lr, options, ws);
}

template <std::floating_point T>
bool cbow_step(ModelParams<T>& params, const HuffmanCoding& coding, std::span<const WordIndex> context,
               WordIndex target, T lr, const StepOptions& options = {}) {
  StepWorkspace<T> ws(params.dim());
  return cbow_step(params, coding, context, target, lr, options, ws);
}

// ---------------------------------------------------------------------------
// Forward probabilities (always exact sigmoid)

template <std::floating_point T>
double word_log_probability(const ModelParams<T>& params, const HuffmanCoding& coding,
                            std::type_identity_t<std::span<const T>> hidden, std::size_t word) {
  if (hidden.size() != params.dim()) throw InvalidArgument("hidden vector has wrong dimension");
  if (word >= coding.vocab_size()) throw InvalidArgument("word index out of range");
  const auto code = coding.code(word);
  const auto path = coding.path(word);
  double logp = 0;
  for (std::size_t j = 0; j < code.size(); ++j) {
    auto node = params.node_row(path[j]);
    double f = 0;
    for (std::size_t i = 0; i < hidden.size(); ++i) f += static_cast<double>(node[i]) * hidden[i];
    logp += log_sigmoid(code[j] == 0 ? f : -f);
  }
  return logp;
}

template <std::floating_point T>
double word_probability(const ModelParams<T>& params, const HuffmanCoding& coding,
                        std::type_identity_t<std::span<const T>> hidden,
                        std::size_t word) {
  return std::exp(word_log_probability(params, coding, hidden, word));
}

/// -log p(word | hidden).
template <std::floating_point T>
double word_loss(const ModelParams<T>& params, const HuffmanCoding& coding,
                 std::type_identity_t<std::span<const T>> hidden,
                 std::size_t word) {
  return -word_log_probability(params, coding, hidden, word);
}

}  // namespace w2v
