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

#include "dualspace/risk.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <memory>

namespace dualspace {
namespace {

class Sha256 {
 public:
  Sha256() : ctx_(EVP_MD_CTX_new(), &EVP_MD_CTX_free) {
    if (!ctx_ || EVP_DigestInit_ex(ctx_.get(), EVP_sha256(), nullptr) != 1) {
      throw Error("cannot initialise SHA-256");
    }
  }

  void update(const void* data, std::size_t size) {
    EVP_DigestUpdate(ctx_.get(), data, size);
  }

  void update_u64(std::uint64_t v) {
    unsigned char bytes[8];
    for (int i = 0; i < 8; ++i) bytes[i] = static_cast<unsigned char>(v >> (8 * i));
    update(bytes, 8);
  }

  void update_string(const std::string& s) {
    update_u64(s.size());
    update(s.data(), s.size());
  }

  std::string hex_digest() {
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int size = 0;
    EVP_DigestFinal_ex(ctx_.get(), digest, &size);
    static constexpr char kHex[] = "0123456789abcdef";
    std::string out;
    for (unsigned int i = 0; i < size; ++i) {
      out.push_back(kHex[digest[i] >> 4]);
      out.push_back(kHex[digest[i] & 0xf]);
    }
    return out;
  }

 private:
  std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx_;
};

void hash_list(Sha256& h, const ConceptList& list) {
  h.update_string(to_string(list.role()));
  h.update_u64(static_cast<std::uint64_t>(list.dim()));
  h.update_u64(list.size());
  for (const ConceptEntry& e : list.entries()) {
    h.update_string(e.label);
    for (Eigen::Index j = 0; j < e.embedding.size(); ++j) {
      h.update_u64(std::bit_cast<std::uint64_t>(e.embedding(j)));
    }
  }
}

}  // namespace

void ProjectorBundle::validate() const {
  toxic_projector.validate();
  clean_projector.validate();
  if (toxic_projector.dim() != clean_projector.dim()) {
    throw DimensionError("toxic and clean projectors differ in dimension");
  }
  if (clean_centroid.size() != dim()) {
    throw DimensionError("clean centroid dimension does not match the projectors");
  }
  if (!clean_centroid.allFinite()) throw InvalidData("clean centroid has non-finite values");
  if (!(rel_tol > 0.0) || !std::isfinite(rel_tol)) {
    throw InvalidData("bundle rel_tol must be positive");
  }
}

std::string fingerprint(const ConceptList& toxic, const ConceptList& clean) {
  Sha256 h;
  h.update_string("dualspace-concepts-v1");
  hash_list(h, toxic);
  hash_list(h, clean);
  return h.hex_digest();
}

ProjectorBundle build_bundle(const ConceptList& toxic, const ConceptList& clean, double rel_tol) {
  if (toxic.role() != ConceptRole::kToxic || clean.role() != ConceptRole::kClean) {
    throw InvalidData("build_bundle expects a toxic list and a clean list, in that order");
  }
  if (toxic.dim() != clean.dim()) {
    throw DimensionError("toxic concepts have dimension " + std::to_string(toxic.dim()) +
                         ", clean concepts have dimension " + std::to_string(clean.dim()));
  }
  const Eigen::MatrixXd clean_matrix = assemble_matrix(clean);
  return ProjectorBundle{
      range_projector(assemble_matrix(toxic), rel_tol),
      range_projector(clean_matrix, rel_tol),
      rel_tol,
      fingerprint(toxic, clean),
      clean_matrix.rowwise().mean(),
  };
}

const char* to_string(TokenLabel label) {
  return label == TokenLabel::kRisky ? "risky" : "safe";
}

const char* to_string(TiePolicy policy) {
  return policy == TiePolicy::kRiskyOnTie ? "risky-on-tie" : "safe-on-tie";
}

TiePolicy parse_tie_policy(const std::string& name) {
  if (name == "risky-on-tie") return TiePolicy::kRiskyOnTie;
  if (name == "safe-on-tie") return TiePolicy::kSafeOnTie;
  throw InvalidInput("unknown tie policy \"" + name + "\" (risky-on-tie | safe-on-tie)");
}

const char* to_string(Verdict verdict) {
  switch (verdict) {
    case Verdict::kSafe:
      return "safe";
    case Verdict::kRisky:
      return "risky";
    case Verdict::kUnsafe:
      return "unsafe";
  }
  return "unknown";
}

TokenLabel classify_token(double d_toxic, double d_clean, TiePolicy policy, double tie_epsilon) {
  if (!std::isfinite(d_toxic) || !std::isfinite(d_clean) || d_toxic < 0.0 || d_clean < 0.0) {
    throw InvalidInput("distances must be finite and non-negative");
  }
  const bool tie = std::abs(d_toxic - d_clean) <= tie_epsilon * std::max(d_toxic, d_clean);
  if (tie) return policy == TiePolicy::kRiskyOnTie ? TokenLabel::kRisky : TokenLabel::kSafe;
  return d_toxic < d_clean ? TokenLabel::kRisky : TokenLabel::kSafe;
}

std::vector<TokenRisk> classify_tokens(const ProjectorBundle& bundle,
                                       const TokenizedPrompt& prompt, TiePolicy policy,
                                       double tie_epsilon) {
  if (prompt.size() < 1) throw InvalidData("prompt has no tokens");
  if (prompt.dim() != bundle.dim()) {
    throw DimensionError("prompt has dimension " + std::to_string(prompt.dim()) +
                         ", bundle expects " + std::to_string(bundle.dim()));
  }
  std::vector<TokenRisk> out;
  out.reserve(static_cast<std::size_t>(prompt.size()));
  for (Eigen::Index i = 0; i < prompt.size(); ++i) {
    const TokenDistances d = token_distances(bundle, prompt.embeddings.col(i));
    TokenRisk risk;
    risk.index = i;
    if (prompt.has_text()) risk.token_text = prompt.tokens[static_cast<std::size_t>(i)];
    risk.d_toxic = d.toxic;
    risk.d_clean = d.clean;
    risk.label = classify_token(d.toxic, d.clean, policy, tie_epsilon);
    out.push_back(std::move(risk));
  }
  return out;
}

PromptVerdict classify_prompt(const std::vector<TokenLabel>& labels, double block_threshold) {
  if (labels.empty()) throw InvalidData("cannot classify an empty prompt");
  if (!(block_threshold > 0.0 && block_threshold <= 1.0)) {
    throw InvalidData("block_threshold must lie in (0, 1]");
  }
  const auto risky = std::count(labels.begin(), labels.end(), TokenLabel::kRisky);
  PromptVerdict v;
  v.block_threshold = block_threshold;
  v.risky_fraction = static_cast<double>(risky) / static_cast<double>(labels.size());
  if (risky == 0) {
    v.verdict = Verdict::kSafe;
  } else if (v.risky_fraction >= block_threshold) {
    v.verdict = Verdict::kUnsafe;
  } else {
    v.verdict = Verdict::kRisky;
  }
  return v;
}

PromptVerdict classify_prompt(const std::vector<TokenRisk>& risks, double block_threshold) {
  std::vector<TokenLabel> labels;
  labels.reserve(risks.size());
  for (const TokenRisk& r : risks) labels.push_back(r.label);
  return classify_prompt(labels, block_threshold);
}

}  // namespace dualspace
