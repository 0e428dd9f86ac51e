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

#include <gtest/gtest.h>

#include <random>

#include "corpus.hpp"
#include "dualspace/bundle_io.hpp"
#include "dualspace/report.hpp"
#include "json.hpp"
#include "test_util.hpp"

using namespace dualspace;
using dualspace::testing::TempDir;
using dualspace::testing::unit;

namespace {

ProjectorBundle e1_e2_bundle() {
  return build_bundle(ConceptList(ConceptRole::kToxic, {{"murder", unit(3, 0)}}),
                      ConceptList(ConceptRole::kClean, {{"peace", unit(3, 1)}}));
}

}  // namespace

TEST(BundleIo, HeaderLayout) {
  const std::string bytes = serialize_bundle(e1_e2_bundle());
  ASSERT_EQ(bytes.size(), 28u + 2 * 9 * 4 + 4 + 64 + 3 * 4);
  EXPECT_EQ(bytes.substr(0, 4), "PGB1");
  EXPECT_EQ(static_cast<unsigned char>(bytes[4]), 1);  // version, little-endian
  EXPECT_EQ(static_cast<unsigned char>(bytes[8]), 3);  // dim
  EXPECT_EQ(static_cast<unsigned char>(bytes[12]), 1);
  EXPECT_EQ(static_cast<unsigned char>(bytes[16]), 1);
}

TEST(BundleIo, RoundTrip) {
  std::mt19937_64 rng(5);
  const auto w = dualspace::testing::make_orthogonal_world(rng, 12, 3, 4);
  const ProjectorBundle back = deserialize_bundle(serialize_bundle(w.bundle));
  EXPECT_EQ(back.dim(), 12);
  EXPECT_EQ(back.toxic_rank(), 3);
  EXPECT_EQ(back.clean_rank(), 4);
  EXPECT_EQ(back.rel_tol, w.bundle.rel_tol);
  EXPECT_EQ(back.fingerprint, w.bundle.fingerprint);
  EXPECT_LE((back.toxic_projector.matrix() - w.bundle.toxic_projector.matrix()).norm(), 1e-6);
  EXPECT_LE((back.clean_projector.matrix() - w.bundle.clean_projector.matrix()).norm(), 1e-6);
  // float32 storage is a fixed point
  EXPECT_EQ(serialize_bundle(back), serialize_bundle(w.bundle));
}

TEST(BundleIo, Deterministic) {
  EXPECT_EQ(serialize_bundle(e1_e2_bundle()), serialize_bundle(e1_e2_bundle()));
}

TEST(BundleIo, MissingFingerprintIsAccepted) {
  ProjectorBundle b = e1_e2_bundle();
  b.fingerprint.clear();
  EXPECT_TRUE(deserialize_bundle(serialize_bundle(b)).fingerprint.empty());
}

TEST(BundleIo, Corruption) {
  const std::string good = serialize_bundle(e1_e2_bundle());
  std::string bad = good;
  bad[0] = 'X';
  EXPECT_THROW(deserialize_bundle(bad), FormatError);
  bad = good;
  bad[4] = 2;
  EXPECT_THROW(deserialize_bundle(bad), FormatError);
  EXPECT_THROW(deserialize_bundle(good.substr(0, good.size() - 1)), FormatError);
  EXPECT_THROW(deserialize_bundle(good + "x"), FormatError);
  EXPECT_THROW(deserialize_bundle(""), FormatError);
  // toxic rank that disagrees with the trace
  bad = good;
  bad[12] = 2;
  EXPECT_THROW(deserialize_bundle(bad), InvalidData);
}

TEST(BundleIo, Files) {
  TempDir dir("bundle");
  save_bundle(e1_e2_bundle(), dir / "b.pgb");
  EXPECT_EQ(load_bundle(dir / "b.pgb").dim(), 3);
  EXPECT_THROW(load_bundle(dir / "none.pgb"), IoError);
}

TEST(Report, CanonicalJson) {
  RiskReportDocument report;
  report.bundle_fingerprint = "abc";
  TokenRisk t;
  t.index = 0;
  t.token_text = "killed";
  t.d_toxic = 0.0;
  t.d_clean = 1.0;
  t.label = TokenLabel::kRisky;
  report.tokens = {t};
  report.verdict = classify_prompt(report.tokens, 0.5);
  const std::string text = to_canonical_json(report);
  EXPECT_EQ(text, to_canonical_json(report));
  ASSERT_FALSE(text.empty());
  EXPECT_EQ(text.back(), '\n');

  const auto doc = nlohmann::json::parse(text);
  EXPECT_EQ(doc["schema_version"], "1");
  EXPECT_EQ(doc["config"]["rel_tol"], 1e-6);
  EXPECT_EQ(doc["config"]["tie_policy"], "risky-on-tie");
  EXPECT_EQ(doc["config"]["block_threshold"], 0.5);
  EXPECT_EQ(doc["config"]["purify"]["mode"], "paper_sum");
  EXPECT_EQ(doc["config"]["purify"]["preserve_norm"], false);
  EXPECT_EQ(doc["config"]["purify"]["zero_fallback"], "keep");
  EXPECT_EQ(doc["tokens"][0]["token"], "killed");
  EXPECT_EQ(doc["tokens"][0]["label"], "risky");
  EXPECT_EQ(doc["verdict"]["verdict"], "unsafe");
  EXPECT_FALSE(doc.contains("purify"));

  // keys appear in sorted order
  EXPECT_LT(text.find("\"bundle_fingerprint\""), text.find("\"config\""));
  EXPECT_LT(text.find("\"config\""), text.find("\"schema_version\""));
  EXPECT_LT(text.find("\"d_clean\""), text.find("\"d_toxic\""));
}

TEST(Report, NullsForMissingFields) {
  RiskReportDocument report;
  TokenRisk t;
  report.tokens = {t};
  report.verdict = classify_prompt(report.tokens, 0.5);
  report.purify = PurifyOutcome{PurifyAction::kPassThrough, {false}};
  const auto doc = nlohmann::json::parse(to_canonical_json(report));
  EXPECT_TRUE(doc["bundle_fingerprint"].is_null());
  EXPECT_TRUE(doc["tokens"][0]["token"].is_null());
  EXPECT_EQ(doc["purify"]["action"], "pass_through");
}

TEST(Report, DoublesRoundTrip) {
  RiskReportDocument report;
  TokenRisk t;
  t.d_toxic = 0.1 + 0.2;
  t.d_clean = 1.0 / 3.0;
  report.tokens = {t};
  report.verdict = classify_prompt(report.tokens, 0.5);
  const auto doc = nlohmann::json::parse(to_canonical_json(report));
  EXPECT_EQ(doc["tokens"][0]["d_toxic"].get<double>(), t.d_toxic);
  EXPECT_EQ(doc["tokens"][0]["d_clean"].get<double>(), t.d_clean);
}
