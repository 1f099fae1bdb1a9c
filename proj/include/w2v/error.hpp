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

#pragma once

#include <stdexcept>
#include <string>

namespace w2v {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Bad arguments or preconditions (sizes, empty inputs, OOV words).
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// Malformed external data: vector files, question files, checkpoints.
class FormatError : public Error {
 public:
  using Error::Error;
};

/// A word that is required but missing from the vocabulary.
class OutOfVocabulary : public InvalidArgument {
 public:
  explicit OutOfVocabulary(const std::string& word)
      : InvalidArgument("word not in vocabulary: " + word), word_(word) {}

  const std::string& word() const noexcept { return word_; }

 private:
  std::string word_;
};

}  // namespace w2v
