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

// Training cost model: parameters touched per training example (Q) and per
// run (O = E * T * Q).
//
//   NNLM       Q = N*D + N*D*H + H*V        (H*log2 V with a tree softmax)
//   RNNLM      Q = H*H + H*V                (H*log2 V with a tree softmax)
//   CBOW       Q = N*D + D*log2 V
//   Skip-gram  Q = C*(D + D*log2 V)

#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

#include "w2v/error.hpp"

namespace w2v {

enum class Architecture { nnlm, rnnlm, cbow, skipgram };

inline std::string_view to_string(Architecture a) {
  switch (a) {
    case Architecture::nnlm: return "nnlm";
    case Architecture::rnnlm: return "rnnlm";
    case Architecture::cbow: return "cbow";
    case Architecture::skipgram: return "skipgram";
  }
  return "?";
}

inline std::optional<Architecture> parse_architecture(std::string_view s) {
  if (s == "nnlm") return Architecture::nnlm;
  if (s == "rnnlm") return Architecture::rnnlm;
  if (s == "cbow") return Architecture::cbow;
  if (s == "skipgram" || s == "skip-gram") return Architecture::skipgram;
  return std::nullopt;
}

struct ComplexityInputs {
  std::optional<double> context_words;  // N
  std::optional<double> dim;            // D
  std::optional<double> hidden;         // H
  std::optional<double> vocab;          // V
  std::optional<double> window;         // C
  std::optional<double> epochs;         // E
  std::optional<double> tokens;         // T
  /// NNLM/RNNLM only: use a tree softmax (log2 V output term) instead of H*V.
  bool hierarchical = false;
  /// Replaces log2(V) in the tree-softmax term, e.g. with a measured
  /// expected Huffman code length.
  std::optional<double> code_length;
};

struct ComplexityEstimate {
  double per_example = 0;            // Q
  std::optional<double> total;       // O, when T is known
};

inline ComplexityEstimate complexity_estimate(Architecture arch, const ComplexityInputs& in) {
  auto need = [](const std::optional<double>& v, const char* name) {
    if (!v) throw InvalidArgument(std::string("complexity: missing parameter ") + name);
    if (!(*v > 0)) throw InvalidArgument(std::string("complexity: parameter ") + name + " must be positive");
    return *v;
  };
  auto tree_term = [&] { return in.code_length ? *in.code_length : std::log2(need(in.vocab, "V")); };

  ComplexityEstimate out;
  switch (arch) {
    case Architecture::nnlm: {
      const double n = need(in.context_words, "N");
      const double d = need(in.dim, "D");
      const double h = need(in.hidden, "H");
      const double output = in.hierarchical ? h * tree_term() : h * need(in.vocab, "V");
      out.per_example = n * d + n * d * h + output;
      break;
    }
    case Architecture::rnnlm: {
      const double h = need(in.hidden, "H");
      const double output = in.hierarchical ? h * tree_term() : h * need(in.vocab, "V");
      out.per_example = h * h + output;
      break;
    }
    case Architecture::cbow: {
      const double n = need(in.context_words, "N");
      const double d = need(in.dim, "D");
      out.per_example = n * d + d * tree_term();
      break;
    }
    case Architecture::skipgram: {
      const double c = need(in.window, "C");
      const double d = need(in.dim, "D");
      out.per_example = c * (d + d * tree_term());
      break;
    }
  }
  if (in.tokens) {
    const double e = in.epochs ? need(in.epochs, "E") : 1.0;
    out.total = e * need(in.tokens, "T") * out.per_example;
  }
  return out;
}

}  // namespace w2v
