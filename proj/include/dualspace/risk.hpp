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

// Token-level risk discrimination against a toxic and a clean concept span.
//
// The complementary distance of a token p to a span S is |(I - P_S) p|_2,
// the norm of what is left of p after projecting onto S. A token is risky
// when it is at least as close to the toxic span as to the clean one.

#include <Eigen/Dense>

#include <optional>
#include <string>
#include <vector>

#include "dualspace/concepts.hpp"
#include "dualspace/errors.hpp"
#include "dualspace/prompt.hpp"
#include "dualspace/subspace.hpp"

namespace dualspace {

/// The precomputed inference artifact: both span projectors plus what the
/// purifier needs from the clean list.
struct ProjectorBundle {
  Projector<double> toxic_projector;
  Projector<double> clean_projector;
  double rel_tol = kDefaultRelTol;
  // Hex SHA-256 of both concept lists; empty when unknown.
  std::string fingerprint;
  // Mean of the clean concept vectors.
  Eigen::VectorXd clean_centroid;

  Eigen::Index dim() const { return toxic_projector.dim(); }
  Eigen::Index toxic_rank() const { return toxic_projector.rank(); }
  Eigen::Index clean_rank() const { return clean_projector.rank(); }

  /// Throws InvalidData / DimensionError when the parts disagree.
  void validate() const;
};

/// SHA-256 over a canonical encoding of both lists (roles, labels, binary64
/// values). Any change to a label or a value changes the digest.
std::string fingerprint(const ConceptList& toxic, const ConceptList& clean);

ProjectorBundle build_bundle(const ConceptList& toxic, const ConceptList& clean,
                             double rel_tol = kDefaultRelTol);

struct TokenDistances {
  double toxic = 0.0;
  double clean = 0.0;
};

template <typename Derived>
TokenDistances token_distances(const ProjectorBundle& bundle,
                               const Eigen::MatrixBase<Derived>& p) {
  if (p.cols() != 1 || p.rows() != bundle.dim()) {
    throw DimensionError("token has dimension " + std::to_string(p.rows()) +
                         ", bundle expects " + std::to_string(bundle.dim()));
  }
  if (!p.allFinite()) throw InvalidInput("token embedding has non-finite values");
  const Eigen::VectorXd v = p.template cast<double>();
  const double norm = v.norm();
  const double toxic = (v - bundle.toxic_projector * v).norm();
  const double clean = (v - bundle.clean_projector * v).norm();
  return {std::min(toxic, norm), std::min(clean, norm)};
}

enum class TokenLabel { kRisky, kSafe };
enum class TiePolicy { kRiskyOnTie, kSafeOnTie };

const char* to_string(TokenLabel label);
const char* to_string(TiePolicy policy);
TiePolicy parse_tie_policy(const std::string& name);

// Relative width of the tie band: |d_toxic - d_clean| <= eps * max(d_toxic, d_clean).
inline constexpr double kDefaultTieEpsilon = 1e-9;

TokenLabel classify_token(double d_toxic, double d_clean,
                          TiePolicy policy = TiePolicy::kRiskyOnTie,
                          double tie_epsilon = kDefaultTieEpsilon);

struct TokenRisk {
  Eigen::Index index = 0;
  std::optional<std::string> token_text;
  double d_toxic = 0.0;
  double d_clean = 0.0;
  TokenLabel label = TokenLabel::kSafe;
};

/// One TokenRisk per prompt column, in order.
std::vector<TokenRisk> classify_tokens(const ProjectorBundle& bundle,
                                       const TokenizedPrompt& prompt,
                                       TiePolicy policy = TiePolicy::kRiskyOnTie,
                                       double tie_epsilon = kDefaultTieEpsilon);

enum class Verdict { kSafe, kRisky, kUnsafe };
const char* to_string(Verdict verdict);

inline constexpr double kDefaultBlockThreshold = 0.5;

struct PromptVerdict {
  Verdict verdict = Verdict::kSafe;
  double risky_fraction = 0.0;
  double block_threshold = kDefaultBlockThreshold;
};

/// safe when no token is risky, unsafe when the risky fraction reaches
/// block_threshold, risky otherwise.
PromptVerdict classify_prompt(const std::vector<TokenLabel>& labels,
                              double block_threshold = kDefaultBlockThreshold);
PromptVerdict classify_prompt(const std::vector<TokenRisk>& risks,
                              double block_threshold = kDefaultBlockThreshold);

}  // namespace dualspace
