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

#include "dualspace/toyembed.hpp"

#include <cmath>
#include <random>

#include "dualspace/errors.hpp"

namespace dualspace {
namespace {

bool is_space(char c) {
  return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v';
}

std::string lowercase(std::string_view s) {
  std::string out(s);
  for (char& c : out) {
    if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
  }
  return out;
}

Eigen::VectorXd round_to_float(const Eigen::VectorXd& v) {
  return v.cast<float>().cast<double>();
}

// Fixed left-to-right summation; Eigen's norm() may reorder under SIMD.
double sequential_norm(const Eigen::VectorXd& v) {
  double sum = 0.0;
  for (Eigen::Index j = 0; j < v.size(); ++j) sum += v(j) * v(j);
  return std::sqrt(sum);
}

}  // namespace

std::uint64_t fnv1a64(std::string_view text) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  return h;
}

std::vector<std::string> tokenize(std::string_view text) {
  std::vector<std::string> tokens;
  std::size_t i = 0;
  while (i < text.size()) {
    while (i < text.size() && is_space(text[i])) ++i;
    const std::size_t start = i;
    while (i < text.size() && !is_space(text[i])) ++i;
    if (i > start) tokens.push_back(lowercase(text.substr(start, i - start)));
  }
  return tokens;
}

ToyLexicon ToyLexicon::from_file(const EmbeddingFile& file) {
  file.validate();
  if (!file.labels) throw InvalidData("lexicon file must carry token strings as labels");
  ToyLexicon lex;
  const auto dim = static_cast<Eigen::Index>(file.dim);
  for (std::size_t i = 0; i < file.count; ++i) {
    lex.add((*file.labels)[i], Eigen::Map<const Eigen::VectorXf>(file.row(i), dim).cast<double>());
  }
  return lex;
}

void ToyLexicon::add(const std::string& token, const Eigen::VectorXd& anchor) {
  const std::string key = lowercase(token);
  if (key.empty()) throw InvalidData("lexicon tokens must be non-empty");
  if (dim_ == 0) dim_ = anchor.size();
  if (anchor.size() != dim_) {
    throw DimensionError("lexicon anchor \"" + key + "\" has dimension " +
                         std::to_string(anchor.size()) + ", expected " + std::to_string(dim_));
  }
  const double n = sequential_norm(anchor);
  if (!std::isfinite(n) || n == 0.0) {
    throw InvalidData("lexicon anchor \"" + key + "\" must be finite and non-zero");
  }
  if (!anchors_.emplace(key, round_to_float(anchor / n)).second) {
    throw InvalidData("duplicate lexicon token \"" + key + "\"");
  }
}

const Eigen::VectorXd* ToyLexicon::find(const std::string& token) const {
  const auto it = anchors_.find(token);
  return it == anchors_.end() ? nullptr : &it->second;
}

Eigen::VectorXd toy_vector(std::string_view token, Eigen::Index dim, std::uint64_t seed) {
  std::mt19937_64 engine(fnv1a64(token) ^ (seed * 0x9E3779B97F4A7C15ull));
  Eigen::VectorXd v(dim);
  double n = 0.0;
  do {
    for (Eigen::Index j = 0; j < dim; ++j) {
      const double u = static_cast<double>(engine() >> 11) * 0x1.0p-53;
      v(j) = 2.0 * u - 1.0;
    }
    n = sequential_norm(v);
  } while (n == 0.0);
  return round_to_float(v / n);
}

TokenizedPrompt embed_tokens(std::string_view text, Eigen::Index dim, std::uint64_t seed,
                             const ToyLexicon* lexicon) {
  if (dim < 2) throw InvalidData("toy embedding dimension must be at least 2");
  if (lexicon != nullptr && lexicon->size() > 0 && lexicon->dim() != dim) {
    throw DimensionError("lexicon has dimension " + std::to_string(lexicon->dim()) +
                         ", requested " + std::to_string(dim));
  }
  TokenizedPrompt prompt;
  prompt.tokens = tokenize(text);
  if (prompt.tokens.empty()) throw InvalidData("text has no tokens");
  prompt.embeddings.resize(dim, static_cast<Eigen::Index>(prompt.tokens.size()));
  for (std::size_t i = 0; i < prompt.tokens.size(); ++i) {
    const auto col = static_cast<Eigen::Index>(i);
    const Eigen::VectorXd* anchor = lexicon ? lexicon->find(prompt.tokens[i]) : nullptr;
    prompt.embeddings.col(col) = anchor ? *anchor : toy_vector(prompt.tokens[i], dim, seed);
  }
  return prompt;
}

}  // namespace dualspace
