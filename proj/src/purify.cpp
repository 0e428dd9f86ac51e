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

#include "dualspace/purify.hpp"

#include <algorithm>

#include "dualspace/errors.hpp"

namespace dualspace {

const char* to_string(PurifyMode mode) {
  return mode == PurifyMode::kSum ? "paper_sum" : "averaged";
}

const char* to_string(ZeroFallback fallback) {
  return fallback == ZeroFallback::kKeep ? "keep" : "clean_centroid";
}

PurifyMode parse_purify_mode(const std::string& name) {
  if (name == "paper_sum") return PurifyMode::kSum;
  if (name == "averaged") return PurifyMode::kAveraged;
  throw InvalidInput("unknown purify mode \"" + name + "\" (paper_sum | averaged)");
}

ZeroFallback parse_zero_fallback(const std::string& name) {
  if (name == "keep") return ZeroFallback::kKeep;
  if (name == "clean_centroid") return ZeroFallback::kCleanCentroid;
  throw InvalidInput("unknown zero fallback \"" + name + "\" (keep | clean_centroid)");
}

Purifier::Purifier(const ProjectorBundle& bundle, PurifyConfig config)
    : clean_centroid_(bundle.clean_centroid), config_(config) {
  const Eigen::Index d = bundle.dim();
  transform_ = Eigen::MatrixXd::Identity(d, d) - bundle.toxic_projector.matrix() +
               bundle.clean_projector.matrix();
  if (config_.mode == PurifyMode::kAveraged) transform_ *= 0.5;
}

Eigen::VectorXd Purifier::operator()(const Eigen::Ref<const Eigen::VectorXd>& p) const {
  if (p.size() != transform_.rows()) {
    throw DimensionError("token has dimension " + std::to_string(p.size()) +
                         ", bundle expects " + std::to_string(transform_.rows()));
  }
  Eigen::VectorXd out = transform_ * p;
  const double in_norm = p.norm();
  const double out_norm = out.norm();
  const bool is_zero = out_norm <= kZeroOutputRelTol * std::max(1.0, in_norm);
  if (is_zero) {
    if (config_.zero_fallback == ZeroFallback::kCleanCentroid) {
      const double c = clean_centroid_.norm();
      if (c > 0.0) return clean_centroid_ * (in_norm / c);
    }
    return out;
  }
  if (config_.preserve_norm) out *= in_norm / out_norm;
  return out;
}

PurifiedPrompt Purifier::purify_prompt(const TokenizedPrompt& prompt,
                                       const std::vector<TokenRisk>& risks) const {
  if (static_cast<Eigen::Index>(risks.size()) != prompt.size()) {
    throw InvalidData("got " + std::to_string(risks.size()) + " risk labels for " +
                      std::to_string(prompt.size()) + " tokens");
  }
  if (prompt.dim() != transform_.rows()) {
    throw DimensionError("prompt has dimension " + std::to_string(prompt.dim()) +
                         ", bundle expects " + std::to_string(transform_.rows()));
  }
  PurifiedPrompt out;
  out.embeddings = prompt.embeddings;
  out.tokens = prompt.tokens;
  out.substituted.assign(risks.size(), false);
  for (std::size_t i = 0; i < risks.size(); ++i) {
    if (risks[i].index != static_cast<Eigen::Index>(i)) {
      throw InvalidData("risk labels are not aligned with token positions");
    }
    if (risks[i].label != TokenLabel::kRisky) continue;
    const auto col = static_cast<Eigen::Index>(i);
    out.embeddings.col(col) = (*this)(prompt.embeddings.col(col));
    out.substituted[i] = true;
  }
  return out;
}

Eigen::VectorXd purify_embedding(const ProjectorBundle& bundle,
                                 const Eigen::Ref<const Eigen::VectorXd>& p,
                                 const PurifyConfig& config) {
  return Purifier(bundle, config)(p);
}

PurifiedPrompt purify_prompt(const ProjectorBundle& bundle, const TokenizedPrompt& prompt,
                             const std::vector<TokenRisk>& risks, const PurifyConfig& config) {
  return Purifier(bundle, config).purify_prompt(prompt, risks);
}

}  // namespace dualspace
