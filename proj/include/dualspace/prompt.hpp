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

#include <Eigen/Dense>

#include <string>
#include <vector>

#include "dualspace/concepts.hpp"

namespace dualspace {

/// Ordered token embeddings, one column per token. `tokens` is either empty
/// (no text available) or holds one string per column.
struct TokenizedPrompt {
  Eigen::MatrixXd embeddings;  // D x N
  std::vector<std::string> tokens;

  Eigen::Index dim() const { return embeddings.rows(); }
  Eigen::Index size() const { return embeddings.cols(); }
  bool has_text() const { return !tokens.empty(); }

  /// Labels become token text. Values are widened from float32 exactly.
  static TokenizedPrompt from_file(const EmbeddingFile& file);

  /// Narrows to float32. Exact for embeddings that came from a file.
  EmbeddingFile to_file() const;
};

}  // namespace dualspace
