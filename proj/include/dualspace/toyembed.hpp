// Copyright 2026 The dualspace Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

// Deterministic, model-free token embedder for desk-scale runs and tests.
//
// Tokenization: split on ASCII whitespace, lowercase ASCII letters.
// Lexicon hits return the anchor vector. Misses draw a unit vector from
// std::mt19937_64 keyed by
//
//   key = fnv1a64(token) XOR (seed * 0x9E3779B97F4A7C15)
//
// taking (x >> 11) * 2^-53 as a uniform in [0, 1), mapping it to [-1, 1)
// per coordinate and normalizing. mt19937_64's output sequence is fixed by
// the C++ standard and the remaining arithmetic is exact or correctly
// rounded IEEE-754, so outputs are bit-identical across conforming
// platforms. Values are rounded to float32 after normalization so an
// embedding and its file representation agree exactly.

#include <Eigen/Dense>

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "dualspace/concepts.hpp"
#include "dualspace/prompt.hpp"

namespace dualspace {

// Recorded in the "generator" field of every file the toy embedder writes.
inline constexpr const char* kToyEmbedGenerator = "toyembed-v1 mt19937_64 fnv1a64";

std::uint64_t fnv1a64(std::string_view text);

std::vector<std::string> tokenize(std::string_view text);

class ToyLexicon {
 public:
  ToyLexicon() = default;

  /// Labels are the token strings (lowercased on insert). Anchors are
  /// normalized to unit length; zero vectors are rejected.
  static ToyLexicon from_file(const EmbeddingFile& file);

  void add(const std::string& token, const Eigen::VectorXd& anchor);

  Eigen::Index dim() const { return dim_; }
  std::size_t size() const { return anchors_.size(); }
  const Eigen::VectorXd* find(const std::string& token) const;

 private:
  Eigen::Index dim_ = 0;
  std::map<std::string, Eigen::VectorXd> anchors_;
};

/// PRNG unit vector for one token.
Eigen::VectorXd toy_vector(std::string_view token, Eigen::Index dim, std::uint64_t seed);

TokenizedPrompt embed_tokens(std::string_view text, Eigen::Index dim, std::uint64_t seed,
                             const ToyLexicon* lexicon = nullptr);

}  // namespace dualspace
