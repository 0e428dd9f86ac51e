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

// dualspace: build projector bundles, classify prompts, purify embeddings.
//
// Exit codes
//   0  success; for classify/purify the prompt is safe
//   1  I/O, format or data error
//   2  dimension mismatch
//   3  prompt is risky (purify: purified embeddings written)
//   4  prompt is unsafe (purify: nothing written but the report)

#include <cstdint>
#include <filesystem>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "dualspace/bundle_io.hpp"
#include "dualspace/concepts.hpp"
#include "dualspace/errors.hpp"
#include "dualspace/purify.hpp"
#include "dualspace/report.hpp"
#include "dualspace/risk.hpp"
#include "dualspace/toyembed.hpp"

namespace fs = std::filesystem;
using namespace dualspace;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitError = 1;
constexpr int kExitDimension = 2;
constexpr int kExitRisky = 3;
constexpr int kExitUnsafe = 4;

int verdict_exit_code(Verdict v) {
  switch (v) {
    case Verdict::kSafe:
      return kExitOk;
    case Verdict::kRisky:
      return kExitRisky;
    case Verdict::kUnsafe:
      return kExitUnsafe;
  }
  return kExitError;
}

bool has_suffix(const fs::path& p, const std::string& suffix) {
  const std::string s = p.string();
  return s.size() >= suffix.size() && s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
}

EmbeddingVariant variant_for(const fs::path& p) {
  return has_suffix(p, ".embjson") || (has_suffix(p, ".json") && !has_suffix(p, ".emb.json"))
             ? EmbeddingVariant::kJson
             : EmbeddingVariant::kBinary;
}

struct BuildArgs {
  std::string toxic, clean, out;
  double rel_tol = kDefaultRelTol;
};

struct ClassifyArgs {
  std::string bundle, prompt, out, report;
  RunConfig config;
  std::string tie_policy = "risky-on-tie";
  std::string mode = "paper_sum";
  std::string zero_fallback = "keep";
};

int run_build(const BuildArgs& a) {
  const ConceptList toxic = ConceptList::from_file(load_embeddings(a.toxic), ConceptRole::kToxic);
  const ConceptList clean = ConceptList::from_file(load_embeddings(a.clean), ConceptRole::kClean);
  const ProjectorBundle bundle = build_bundle(toxic, clean, a.rel_tol);
  save_bundle(bundle, a.out);
  std::cerr << "bundle: dim " << bundle.dim() << ", toxic rank " << bundle.toxic_rank()
            << ", clean rank " << bundle.clean_rank() << "\n";
  return kExitOk;
}

struct Classified {
  ProjectorBundle bundle;
  EmbeddingFile prompt_file;
  TokenizedPrompt prompt;
  RiskReportDocument report;
};

Classified classify(ClassifyArgs& a) {
  a.config.tie_policy = parse_tie_policy(a.tie_policy);
  a.config.purify.mode = parse_purify_mode(a.mode);
  a.config.purify.zero_fallback = parse_zero_fallback(a.zero_fallback);
  if (!(a.config.block_threshold > 0.0 && a.config.block_threshold <= 1.0)) {
    throw InvalidData("--block-threshold must lie in (0, 1]");
  }

  ProjectorBundle bundle = load_bundle(a.bundle);
  if (bundle.fingerprint.empty()) {
    std::cerr << "warning: bundle " << a.bundle << " carries no concept fingerprint\n";
  }
  EmbeddingFile prompt_file = load_embeddings(a.prompt);
  TokenizedPrompt prompt = TokenizedPrompt::from_file(prompt_file);
  if (prompt.dim() != bundle.dim()) {
    throw DimensionError("prompt has dimension " + std::to_string(prompt.dim()) +
                         ", bundle has dimension " + std::to_string(bundle.dim()));
  }
  a.config.rel_tol = bundle.rel_tol;

  RiskReportDocument report;
  report.config = a.config;
  report.bundle_fingerprint = bundle.fingerprint;
  report.tokens = classify_tokens(bundle, prompt, a.config.tie_policy, a.config.tie_epsilon);
  report.verdict = classify_prompt(report.tokens, a.config.block_threshold);
  return {std::move(bundle), std::move(prompt_file), std::move(prompt), std::move(report)};
}

int run_classify(ClassifyArgs& a) {
  const Classified c = classify(a);
  write_file_atomically(a.out, to_canonical_json(c.report));
  std::cerr << "verdict: " << to_string(c.report.verdict.verdict) << " (risky fraction "
            << c.report.verdict.risky_fraction << ")\n";
  return verdict_exit_code(c.report.verdict.verdict);
}

int run_purify(ClassifyArgs& a) {
  Classified c = classify(a);
  PurifyOutcome outcome;
  outcome.substituted.assign(c.report.tokens.size(), false);
  const fs::path out = a.out;

  switch (c.report.verdict.verdict) {
    case Verdict::kUnsafe:
      outcome.action = PurifyAction::kFiltered;
      break;
    case Verdict::kSafe:
      outcome.action = PurifyAction::kPassThrough;
      save_embeddings(c.prompt_file, out, variant_for(out));
      break;
    case Verdict::kRisky: {
      outcome.action = PurifyAction::kPurified;
      const PurifiedPrompt purified =
          Purifier(c.bundle, a.config.purify).purify_prompt(c.prompt, c.report.tokens);
      outcome.substituted = purified.substituted;
      EmbeddingFile file = purified.as_prompt().to_file();
      file.generator = c.prompt_file.generator;
      save_embeddings(file, out, variant_for(out));
      break;
    }
  }
  c.report.purify = outcome;
  write_file_atomically(a.report, to_canonical_json(c.report));
  std::cerr << "verdict: " << to_string(c.report.verdict.verdict) << ", action "
            << to_string(outcome.action) << "\n";
  return verdict_exit_code(c.report.verdict.verdict);
}

struct EmbedArgs {
  std::string text, lexicon, out;
  int dim = 0;
  std::uint64_t seed = 0;
};

int run_embed_toy(const EmbedArgs& a) {
  ToyLexicon lexicon;
  if (!a.lexicon.empty()) lexicon = ToyLexicon::from_file(load_embeddings(a.lexicon));
  const TokenizedPrompt prompt = embed_tokens(a.text, a.dim, a.seed, &lexicon);
  EmbeddingFile file = prompt.to_file();
  file.generator = kToyEmbedGenerator;
  save_embeddings(file, a.out, EmbeddingVariant::kJson);
  return kExitOk;
}

void add_classify_options(CLI::App* cmd, ClassifyArgs& a) {
  cmd->add_option("--bundle", a.bundle, "PGB1 projector bundle")->required();
  cmd->add_option("--prompt", a.prompt, "prompt embeddings (EMB1 or EMB1-JSON)")->required();
  cmd->add_option("--tie-policy", a.tie_policy, "risky-on-tie | safe-on-tie")
      ->capture_default_str();
  cmd->add_option("--tie-epsilon", a.config.tie_epsilon, "relative width of the tie band")
      ->capture_default_str();
  cmd->add_option("--block-threshold", a.config.block_threshold,
                  "risky fraction at which a prompt is unsafe")
      ->capture_default_str();
  cmd->add_option("--seed", a.config.seed, "toy-embedder seed of the prompt, echoed in the report")
      ->capture_default_str();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Token-level concept-span risk checks and dual-space embedding purification"};
  app.require_subcommand(1);

  BuildArgs build;
  CLI::App* build_cmd = app.add_subcommand("build", "precompute a projector bundle");
  build_cmd->add_option("--toxic", build.toxic, "toxic concept embeddings")->required();
  build_cmd->add_option("--clean", build.clean, "clean concept embeddings")->required();
  build_cmd->add_option("--out", build.out, "output bundle (PGB1)")->required();
  build_cmd->add_option("--rel-tol", build.rel_tol, "relative numerical-rank tolerance")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);

  ClassifyArgs classify_args;
  CLI::App* classify_cmd = app.add_subcommand("classify", "label prompt tokens and write a report");
  add_classify_options(classify_cmd, classify_args);
  classify_cmd->add_option("--out", classify_args.out, "report JSON")->required();

  ClassifyArgs purify_args;
  CLI::App* purify_cmd = app.add_subcommand("purify", "classify, then purify risky tokens");
  add_classify_options(purify_cmd, purify_args);
  purify_cmd->add_option("--out", purify_args.out,
                         "purified embeddings (.emb / .emb.json for EMB1, .embjson for JSON)")
      ->required();
  purify_cmd->add_option("--report", purify_args.report, "report JSON")->required();
  purify_cmd->add_option("--mode", purify_args.mode, "paper_sum | averaged")->capture_default_str();
  purify_cmd->add_flag("--preserve-norm", purify_args.config.purify.preserve_norm,
                       "rescale purified tokens to their input norm");
  purify_cmd->add_option("--zero-fallback", purify_args.zero_fallback, "keep | clean_centroid")
      ->capture_default_str();

  EmbedArgs embed;
  CLI::App* embed_cmd = app.add_subcommand("embed-toy", "deterministic toy token embeddings");
  embed_cmd->add_option("--text", embed.text, "prompt text")->required();
  embed_cmd->add_option("--dim", embed.dim, "embedding dimension")->required()->check(CLI::Range(2, 1 << 20));
  embed_cmd->add_option("--seed", embed.seed, "PRNG seed")->required();
  embed_cmd->add_option("--lexicon", embed.lexicon, "EMB1-JSON lexicon, labels are tokens");
  embed_cmd->add_option("--out", embed.out, "output EMB1-JSON file")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*build_cmd) return run_build(build);
    if (*classify_cmd) return run_classify(classify_args);
    if (*purify_cmd) return run_purify(purify_args);
    if (*embed_cmd) return run_embed_toy(embed);
  } catch (const DimensionError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitDimension;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitError;
  }
  return kExitError;
}
