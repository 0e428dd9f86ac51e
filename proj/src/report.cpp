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

#include "dualspace/report.hpp"

#include "json.hpp"

namespace dualspace {

const char* to_string(PurifyAction action) {
  switch (action) {
    case PurifyAction::kPassThrough:
      return "pass_through";
    case PurifyAction::kPurified:
      return "purified";
    case PurifyAction::kFiltered:
      return "filtered";
  }
  return "unknown";
}

std::string to_canonical_json(const RiskReportDocument& report) {
  // nlohmann::json keeps object keys in a std::map, hence sorted.
  using nlohmann::json;
  const RunConfig& c = report.config;
  json doc;
  doc["schema_version"] = kReportSchemaVersion;
  doc["config"] = {
      {"rel_tol", c.rel_tol},
      {"tie_policy", to_string(c.tie_policy)},
      {"tie_epsilon", c.tie_epsilon},
      {"block_threshold", c.block_threshold},
      {"purify",
       {{"mode", to_string(c.purify.mode)},
        {"preserve_norm", c.purify.preserve_norm},
        {"zero_fallback", to_string(c.purify.zero_fallback)}}},
      {"seed", c.seed},
  };
  doc["bundle_fingerprint"] =
      report.bundle_fingerprint.empty() ? json(nullptr) : json(report.bundle_fingerprint);

  json tokens = json::array();
  for (const TokenRisk& t : report.tokens) {
    tokens.push_back({
        {"index", t.index},
        {"token", t.token_text ? json(*t.token_text) : json(nullptr)},
        {"d_toxic", t.d_toxic},
        {"d_clean", t.d_clean},
        {"label", to_string(t.label)},
    });
  }
  doc["tokens"] = std::move(tokens);
  doc["verdict"] = {
      {"verdict", to_string(report.verdict.verdict)},
      {"risky_fraction", report.verdict.risky_fraction},
      {"block_threshold", report.verdict.block_threshold},
  };
  if (report.purify) {
    doc["purify"] = {
        {"action", to_string(report.purify->action)},
        {"substituted", report.purify->substituted},
    };
  }
  return doc.dump(2, ' ', false, json::error_handler_t::strict) + "\n";
}

}  // namespace dualspace
