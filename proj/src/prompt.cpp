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

#include "dualspace/prompt.hpp"

#include "dualspace/errors.hpp"

namespace dualspace {

TokenizedPrompt TokenizedPrompt::from_file(const EmbeddingFile& file) {
  file.validate();
  TokenizedPrompt prompt;
  const auto dim = static_cast<Eigen::Index>(file.dim);
  const auto count = static_cast<Eigen::Index>(file.count);
  // File rows are tokens; the row-major block maps onto a column-major D x N.
  prompt.embeddings =
      Eigen::Map<const Eigen::MatrixXf>(file.vectors.data(), dim, count).cast<double>();
  if (file.labels) prompt.tokens = *file.labels;
  return prompt;
}

EmbeddingFile TokenizedPrompt::to_file() const {
  if (has_text() && static_cast<Eigen::Index>(tokens.size()) != size()) {
    throw InvalidData("prompt has " + std::to_string(tokens.size()) + " token strings for " +
                      std::to_string(size()) + " embeddings");
  }
  EmbeddingFile file;
  file.dim = static_cast<std::size_t>(dim());
  file.count = static_cast<std::size_t>(size());
  file.vectors.resize(file.dim * file.count);
  Eigen::Map<Eigen::MatrixXf>(file.vectors.data(), dim(), size()) = embeddings.cast<float>();
  if (has_text()) file.labels = tokens;
  return file;
}

}  // namespace dualspace
