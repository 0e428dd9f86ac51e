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

// RiskReportDocument, schema "1". Serialized as canonical JSON: keys sorted,
// doubles in shortest round-trip form, UTF-8, two-space indent, trailing
// newline. Identical runs produce byte-identical reports.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "dualspace/purify.hpp"
#include "dualspace/risk.hpp"

namespace dualspace {

inline constexpr const char* kReportSchemaVersion = "1";

struct RunConfig {
  double rel_tol = kDefaultRelTol;
  TiePolicy tie_policy = TiePolicy::kRiskyOnTie;
  double tie_epsilon = kDefaultTieEpsilon;
  double block_threshold = kDefaultBlockThreshold;
  PurifyConfig purify;
  std::uint64_t seed = 0;
};

/// What cmd_purify did with the prompt.
enum class PurifyAction { kPassThrough, kPurified, kFiltered };
const char* to_string(PurifyAction action);

struct PurifyOutcome {
  PurifyAction action = PurifyAction::kPassThrough;
  std::vector<bool> substituted;
};

struct RiskReportDocument {
  RunConfig config;
  std::string bundle_fingerprint;  // empty serializes as null
  std::vector<TokenRisk> tokens;
  PromptVerdict verdict;
  std::optional<PurifyOutcome> purify;
};

std::string to_canonical_json(const RiskReportDocument& report);

}  // namespace dualspace
