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

// Dual-space purification of token embeddings.
//
//   p* = (I - V) p + P_R p
//
// V projects onto the toxic span, so the first term strips toxic components;
// P_R projects onto the clean span and pulls the token toward clean
// semantics. kSum applies the sum directly, which doubles
// components that lie in the clean span and are orthogonal to the toxic one.
// kAveraged halves the sum instead.

#include <Eigen/Dense>

#include <string>
#include <vector>

#include "dualspace/prompt.hpp"
#include "dualspace/risk.hpp"

namespace dualspace {

enum class PurifyMode { kSum, kAveraged };
enum class ZeroFallback { kKeep, kCleanCentroid };

const char* to_string(PurifyMode mode);
const char* to_string(ZeroFallback fallback);
PurifyMode parse_purify_mode(const std::string& name);
ZeroFallback parse_zero_fallback(const std::string& name);

struct PurifyConfig {
  PurifyMode mode = PurifyMode::kSum;
  bool preserve_norm = false;
  ZeroFallback zero_fallback = ZeroFallback::kKeep;
};

// A purified vector counts as zero below this fraction of max(1, |p|).
inline constexpr double kZeroOutputRelTol = 1e-9;

struct PurifiedPrompt {
  Eigen::MatrixXd embeddings;  // D x N, same order as the input
  std::vector<bool> substituted;
  std::vector<std::string> tokens;

  Eigen::Index dim() const { return embeddings.rows(); }
  Eigen::Index size() const { return embeddings.cols(); }
  TokenizedPrompt as_prompt() const { return {embeddings, tokens}; }
};

/// Holds the combined linear map for one (bundle, config) pair so the D x D
/// matrix is formed once and reused for every token.
class Purifier {
 public:
  explicit Purifier(const ProjectorBundle& bundle, PurifyConfig config = {});

  const Eigen::MatrixXd& transform() const { return transform_; }
  const PurifyConfig& config() const { return config_; }

  Eigen::VectorXd operator()(const Eigen::Ref<const Eigen::VectorXd>& p) const;

  /// Risky tokens get the purified vector; safe tokens are copied unchanged.
  PurifiedPrompt purify_prompt(const TokenizedPrompt& prompt,
                               const std::vector<TokenRisk>& risks) const;

 private:
  Eigen::MatrixXd transform_;
  Eigen::VectorXd clean_centroid_;
  PurifyConfig config_;
};

Eigen::VectorXd purify_embedding(const ProjectorBundle& bundle,
                                 const Eigen::Ref<const Eigen::VectorXd>& p,
                                 const PurifyConfig& config = {});

PurifiedPrompt purify_prompt(const ProjectorBundle& bundle, const TokenizedPrompt& prompt,
                             const std::vector<TokenRisk>& risks,
                             const PurifyConfig& config = {});

}  // namespace dualspace
