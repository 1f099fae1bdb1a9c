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

// Command-line front end. Exit codes: 0 success, 1 runtime or data error,
// 2 usage error.

#pragma once

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <memory>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "w2v/w2v.hpp"

namespace w2v::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitError = 1;
inline constexpr int kExitUsage = 2;

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct TrainArgs {
  std::string corpus;
  std::string output;
  std::string checkpoint;
  std::string resume;
  std::string save_vocab;
  bool binary = false;
  bool cbow = false;
  bool skipgram = false;
  std::size_t dim = 300;
  std::optional<std::size_t> window;
  std::size_t epochs = 1;
  double alpha = 0.025;
  std::uint64_t min_count = 5;
  std::size_t max_vocab = 0;
  std::size_t threads = 1;
  std::optional<std::uint64_t> seed;
  bool lowercase = false;
  bool static_window = false;
  bool quiet = false;
};

struct EvalArgs {
  std::string vectors;
  std::string questions;
  std::optional<std::size_t> restrict_vocab;
  bool lowercase = false;
  bool json = false;
};

struct QueryArgs {
  std::string vectors;
  std::vector<std::string> words;
  std::size_t k = 10;
  bool k_given = false;
  std::optional<std::size_t> restrict_vocab;
  std::string sentence;
  std::vector<std::string> candidates;
  std::optional<std::size_t> window;
};

struct ComplexityArgs {
  std::string arch;
  std::optional<double> n, dim, hidden, vocab, c, epochs, tokens, code_length;
  bool hierarchical = false;
  bool json = false;
};

namespace detail {

inline bool is_checkpoint_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::string head(kCheckpointMagic.size(), '\0');
  in.read(head.data(), static_cast<std::streamsize>(head.size()));
  return in && head == kCheckpointMagic;
}

/// Vectors from a vector file or from the input matrix of a checkpoint.
inline WordVectors load_any_vectors(const std::string& path) {
  if (!std::filesystem::exists(path)) throw Error("cannot open " + path);
  if (is_checkpoint_file(path)) {
    auto ck = load_checkpoint<float>(std::filesystem::path(path));
    return make_word_vectors(ck.vocab, ck.params);
  }
  return load_vectors(std::filesystem::path(path));
}

/// Reads the corpus once into memory when it comes from stdin, so both
/// passes can see it.
class CorpusSource {
 public:
  explicit CorpusSource(std::string path) : path_(std::move(path)) {
    if (path_ == "-") {
      std::ostringstream ss;
      ss << std::cin.rdbuf();
      buffer_ = ss.str();
    } else if (!std::filesystem::is_regular_file(path_)) {
      throw Error("cannot open corpus " + path_);
    }
  }

  std::unique_ptr<std::istream> open() const {
    if (path_ == "-") return std::make_unique<std::istringstream>(buffer_);
    auto in = std::make_unique<std::ifstream>(path_, std::ios::binary);
    if (!*in) throw Error("cannot open corpus " + path_);
    return in;
  }

 private:
  std::string path_;
  std::string buffer_;
};

inline std::string fixed(double v, int digits) {
  std::ostringstream out;
  out << std::fixed << std::setprecision(digits) << v;
  return out.str();
}

}  // namespace detail

inline int cmd_train(const TrainArgs& args, std::ostream& out, std::ostream& err) {
  if (args.output.empty() && args.checkpoint.empty()) {
    throw UsageError("train: nothing to write, give --output and/or --checkpoint");
  }
  const detail::CorpusSource source(args.corpus);

  Checkpoint<float> ck;
  TokenizeStats tok_stats;
  bool resumed = false;
  std::uint64_t seed = 0;
  if (!args.resume.empty()) {
    ck = load_checkpoint<float>(std::filesystem::path(args.resume));
    if (args.threads != 1) throw UsageError("train: --resume requires --threads 1");
    resumed = true;
    seed = ck.config.seed;
  } else {
    seed = args.seed ? *args.seed : std::random_device{}();
    TrainingConfig& c = ck.config;
    c.architecture = args.skipgram ? Architecture::skipgram : Architecture::cbow;
    c.dim = args.dim;
    c.window = args.window ? *args.window : (args.skipgram ? 5 : 4);
    c.epochs = args.epochs;
    c.initial_lr = args.alpha;
    c.min_count = args.min_count;
    c.max_vocab = args.max_vocab;
    c.lowercase = args.lowercase;
    c.workers = args.threads;
    c.seed = seed;
    c.static_window = args.static_window;
    c.validate();
    auto in = source.open();
    ck.vocab = build_vocabulary(*in, {c.min_count, c.max_vocab}, {c.lowercase});
    if (ck.vocab.size() < 2) throw InvalidArgument("vocabulary needs at least 2 words after min_count");
    ck.coding = build_huffman(ck.vocab);
    ck.params = init_params<float>(ck.vocab.size(), c.dim, c.seed);
  }

  EncodedCorpus corpus;
  {
    auto in = source.open();
    corpus = encode(*in, ck.vocab, {ck.config.lowercase}, &tok_stats);
  }
  Trainer<float> trainer(corpus, ck.coding, ck.config, ck.params);
  if (resumed) trainer.restore(ck.state);
  if (!args.quiet) {
    trainer.set_progress_callback([&err](const TrainProgress& p) {
      err << "epoch " << p.epoch + 1 << "  " << detail::fixed(100.0 * p.fraction_done, 1) << "%  lr "
          << detail::fixed(p.current_lr, 6) << "  words/sec " << detail::fixed(p.words_per_second, 0) << '\n';
    });
  }
  const auto report = trainer.run();
  ck.state = trainer.state();

  if (!args.output.empty()) {
    save_vectors(make_word_vectors(ck.vocab, ck.params), args.output,
                 args.binary ? VectorFormat::binary : VectorFormat::text);
  }
  if (!args.checkpoint.empty()) save_checkpoint(ck, std::filesystem::path(args.checkpoint));
  if (!args.save_vocab.empty()) {
    std::ofstream vf(args.save_vocab);
    if (!vf) throw Error("cannot write " + args.save_vocab);
    save_vocabulary(ck.vocab, vf);
  }

  out << "architecture: " << to_string(ck.config.architecture) << '\n'
      << "vocab size: " << ck.vocab.size() << '\n'
      << "corpus tokens: " << corpus.token_count() << '\n'
      << "skipped malformed tokens: " << tok_stats.skipped_malformed << '\n'
      << "epochs: " << ck.config.epochs << '\n'
      << "workers: " << report.workers_used << '\n'
      << "seed: " << seed << '\n'
      << "steps: " << report.steps << '\n'
      << "skipped positions: " << report.skipped_empty << '\n'
      << "seconds: " << detail::fixed(report.seconds, 2) << '\n'
      << "words/sec: " << detail::fixed(report.words_per_second, 0) << '\n'
      << "expected code length: " << detail::fixed(expected_code_length(ck.coding, ck.vocab), 4) << " bits\n"
      << "unigram entropy: " << detail::fixed(unigram_entropy(ck.vocab), 4) << " bits\n";
  return kExitOk;
}

inline int cmd_eval(const EvalArgs& args, std::ostream& out, std::ostream&) {
  const auto wv = normalized(detail::load_any_vectors(args.vectors));
  std::ifstream qf(args.questions);
  if (!qf) throw Error("cannot open questions file " + args.questions);
  const auto qs = parse_questions(qf, {args.lowercase});
  const auto report = evaluate(wv, qs, args.restrict_vocab);
  out << (args.json ? format_report_json(report) : format_report_table(report));
  return kExitOk;
}

inline void print_neighbors(std::ostream& out, const std::vector<Neighbor>& hits) {
  for (const auto& h : hits) out << h.word << ' ' << detail::fixed(h.cosine, 6) << '\n';
}

inline int cmd_query_nearest(const QueryArgs& args, std::ostream& out) {
  if (args.words.size() != 1) throw UsageError("nearest: expected exactly one word");
  const auto wv = normalized(detail::load_any_vectors(args.vectors));
  print_neighbors(out, nearest_neighbors(wv, args.words[0], args.k, {}, args.restrict_vocab));
  return kExitOk;
}

inline int cmd_query_analogy(const QueryArgs& args, std::ostream& out) {
  if (args.words.size() != 3) throw UsageError("analogy: expected three words A B C");
  const auto wv = normalized(detail::load_any_vectors(args.vectors));
  const std::size_t limit = args.restrict_vocab ? std::min(*args.restrict_vocab, wv.size()) : wv.size();
  for (const auto& w : args.words) {
    const auto idx = wv.vocab.find(w);
    if (!idx || *idx >= limit) throw OutOfVocabulary(w);
  }
  const auto hits =
      analogy_candidates(wv, args.words[0], args.words[1], args.words[2], args.k_given ? args.k : 1,
                         args.restrict_vocab);
  if (hits.empty()) throw Error("analogy: offset vector is zero");
  if (args.k_given) {
    print_neighbors(out, hits);
  } else {
    out << hits.front().word << '\n';
  }
  return kExitOk;
}

inline int cmd_query_odd(const QueryArgs& args, std::ostream& out) {
  if (args.words.size() < 3) throw UsageError("odd-one-out: need at least 3 words");
  const auto wv = normalized(detail::load_any_vectors(args.vectors));
  out << odd_one_out(wv, args.words) << '\n';
  return kExitOk;
}

inline int cmd_query_complete(const QueryArgs& args, std::ostream& out) {
  if (args.candidates.size() < 2) throw UsageError("complete: need at least 2 candidates");
  if (!detail::is_checkpoint_file(args.vectors)) {
    throw Error("complete: " + args.vectors + " is not a checkpoint (node weights are required)");
  }
  const auto ck = load_checkpoint<float>(std::filesystem::path(args.vectors));
  const auto sentence = tokenize_text(args.sentence, {ck.config.lowercase});
  std::vector<std::string> tokens;
  for (const auto& s : sentence) tokens.insert(tokens.end(), s.begin(), s.end());
  const auto res = sentence_completion_score(ck.params, ck.coding, ck.vocab, tokens, args.candidates,
                                             args.window ? *args.window : ck.config.window);
  for (std::size_t i = 0; i < args.candidates.size(); ++i) {
    out << args.candidates[i] << ' ';
    if (res.scores[i]) {
      out << detail::fixed(*res.scores[i], 6);
    } else {
      out << "oov";
    }
    out << '\n';
  }
  out << "best: " << args.candidates[res.best] << '\n';
  return kExitOk;
}

inline int cmd_complexity(const ComplexityArgs& args, std::ostream& out) {
  const auto arch = parse_architecture(args.arch);
  if (!arch) throw UsageError("complexity: unknown --arch '" + args.arch + "'");
  ComplexityInputs in;
  in.context_words = args.n;
  in.dim = args.dim;
  in.hidden = args.hidden;
  in.vocab = args.vocab;
  in.window = args.c;
  in.epochs = args.epochs;
  in.tokens = args.tokens;
  in.hierarchical = args.hierarchical;
  in.code_length = args.code_length;
  const auto est = complexity_estimate(*arch, in);
  if (args.json) {
    nlohmann::json j = {{"arch", to_string(*arch)}, {"Q", est.per_example}};
    if (est.total) j["O"] = *est.total;
    out << j.dump() << '\n';
  } else {
    out << "Q: " << detail::fixed(est.per_example, 4) << '\n';
    if (est.total) out << "O: " << detail::fixed(*est.total, 4) << '\n';
  }
  return kExitOk;
}

/// Parses `argv` and dispatches. Never throws.
inline int run(int argc, const char* const* argv, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
  CLI::App app{"Word vectors with CBOW / Skip-gram and hierarchical softmax"};
  app.require_subcommand(1);

  TrainArgs train;
  auto* t = app.add_subcommand("train", "Train word vectors on a text corpus");
  t->add_option("corpus", train.corpus, "Training text ('-' for standard input)")->required();
  t->add_option("-o,--output", train.output, "Write word vectors here");
  t->add_flag("--binary", train.binary, "Write vectors in binary format");
  t->add_option("--checkpoint", train.checkpoint, "Write a full training checkpoint here");
  t->add_option("--resume", train.resume, "Continue training from a checkpoint");
  t->add_option("--save-vocab", train.save_vocab, "Write the vocabulary ('word count' lines)");
  auto* cbow = t->add_flag("--cbow", train.cbow, "Continuous bag-of-words (default)");
  auto* sg = t->add_flag("--skipgram", train.skipgram, "Skip-gram");
  cbow->excludes(sg);
  t->add_option("--size,--dim", train.dim, "Vector dimensionality")->check(CLI::PositiveNumber);
  t->add_option("--window", train.window, "Maximum context distance C (default 4 for CBOW, 5 for Skip-gram)")
      ->check(CLI::PositiveNumber);
  t->add_option("--epochs,--iter", train.epochs, "Training epochs")->check(CLI::PositiveNumber);
  t->add_option("--alpha", train.alpha, "Initial learning rate")->check(CLI::PositiveNumber);
  t->add_option("--min-count", train.min_count, "Drop words rarer than this")->check(CLI::PositiveNumber);
  t->add_option("--max-vocab", train.max_vocab, "Keep at most this many words (0 = all)");
  t->add_option("--threads", train.threads, "Worker threads")->check(CLI::PositiveNumber);
  t->add_option("--seed", train.seed, "Random seed (default: fresh entropy, printed in the report)");
  t->add_flag("--lowercase", train.lowercase, "Lowercase ASCII letters");
  t->add_flag("--static-window", train.static_window, "Always use the full window instead of sampling");
  t->add_flag("-q,--quiet", train.quiet, "No progress output");

  EvalArgs ev;
  auto* e = app.add_subcommand("eval", "Score vectors on an analogy question file");
  e->add_option("vectors", ev.vectors, "Vector file or checkpoint")->required();
  e->add_option("questions", ev.questions, "Question file (': category' headers, 4 words per line)")->required();
  e->add_option("--restrict-vocab", ev.restrict_vocab, "Use only the N most frequent words")
      ->check(CLI::PositiveNumber);
  e->add_flag("--lowercase", ev.lowercase, "Lowercase the questions");
  e->add_flag("--json", ev.json, "One JSON record per line");

  QueryArgs q;
  auto* query = app.add_subcommand("query", "Vector-space queries");
  query->require_subcommand(1);
  auto add_common = [&](CLI::App* sub) {
    sub->add_option("vectors", q.vectors, "Vector file or checkpoint")->required();
    sub->add_option("--restrict-vocab", q.restrict_vocab, "Use only the N most frequent words")
        ->check(CLI::PositiveNumber);
  };
  auto* qn = query->add_subcommand("nearest", "Nearest neighbours of a word");
  add_common(qn);
  qn->add_option("word", q.words)->required();
  qn->add_option("-k,--k", q.k, "Number of neighbours")->check(CLI::PositiveNumber);
  auto* qa = query->add_subcommand("analogy", "A is to B as C is to ?");
  add_common(qa);
  qa->add_option("words", q.words, "A B C")->required();
  auto* qa_k = qa->add_option("-k,--k", q.k, "Print the top k candidates")->check(CLI::PositiveNumber);
  auto* qo = query->add_subcommand("odd-one-out", "Word that does not belong");
  add_common(qo);
  qo->add_option("words", q.words, "At least three words")->required();
  auto* qc = query->add_subcommand("complete", "Score candidates for a blank (needs a checkpoint)");
  qc->add_option("checkpoint", q.vectors, "Checkpoint file")->required();
  qc->add_option("--sentence", q.sentence, "Sentence with the blank written as ___")->required();
  qc->add_option("--candidates", q.candidates, "Candidate words")->required();
  qc->add_option("--window", q.window, "Context distance (default: training window)")->check(CLI::PositiveNumber);

  ComplexityArgs cx;
  auto* c = app.add_subcommand("complexity", "Training cost per example (Q) and per run (O = E*T*Q)");
  c->add_option("--arch", cx.arch, "nnlm | rnnlm | cbow | skipgram")->required();
  c->add_option("--n", cx.n, "Context words N");
  c->add_option("--dim", cx.dim, "Vector dimensionality D");
  c->add_option("--hidden", cx.hidden, "Hidden layer size H");
  c->add_option("--vocab", cx.vocab, "Vocabulary size V");
  c->add_option("--c", cx.c, "Maximum context distance C");
  c->add_option("--epochs", cx.epochs, "Epochs E");
  c->add_option("--tokens", cx.tokens, "Training words T");
  c->add_flag("--hierarchical", cx.hierarchical, "NNLM/RNNLM: tree softmax output term");
  c->add_option("--code-length", cx.code_length, "Replace log2(V) by this mean code length");
  c->add_flag("--json", cx.json, "JSON output");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::CallForVersion&) {
    return kExitOk;
  } catch (const CLI::ParseError& ex) {
    err << "usage error: " << ex.what() << '\n';
    for (const auto* sub : app.get_subcommands()) err << sub->help();
    return kExitUsage;
  }

  try {
    if (*t) return cmd_train(train, out, err);
    if (*e) return cmd_eval(ev, out, err);
    if (*c) return cmd_complexity(cx, out);
    q.k_given = qa_k->count() > 0;
    if (*qn) return cmd_query_nearest(q, out);
    if (*qa) return cmd_query_analogy(q, out);
    if (*qo) return cmd_query_odd(q, out);
    if (*qc) return cmd_query_complete(q, out);
  } catch (const UsageError& ex) {
    err << "usage error: " << ex.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& ex) {
    err << "error: " << ex.what() << '\n';
    return kExitError;
  }
  return kExitUsage;
}

}  // namespace w2v::cli
