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

// Concept lists and the on-disk embedding formats.
//
// EMB1 (binary pair):
//   <name>.emb.json  {"count":N,"dim":D,"dtype":"f32le","format":"EMB1","labels":[...]}
//   <name>.emb       N*D little-endian IEEE-754 binary32 values, row-major, no header
//
// EMB1-JSON (single file, conventionally <name>.embjson):
//   {"count":N,"dim":D,"dtype":"f32le","format":"EMB1-JSON","labels":[...],"vectors":[[...],...]}
//   Numbers are written with the shortest decimal that round-trips through
//   binary32. "count" and "dtype" are optional on input.
//
// Both variants may carry an optional "generator" string.

#include <Eigen/Dense>

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace dualspace {

enum class ConceptRole { kToxic, kClean };

const char* to_string(ConceptRole role);

inline constexpr const char* kFormatBinary = "EMB1";
inline constexpr const char* kFormatJson = "EMB1-JSON";
inline constexpr const char* kDtypeF32 = "f32le";

struct EmbeddingFile {
  std::string format_tag = kFormatJson;
  std::string dtype = kDtypeF32;
  std::size_t dim = 0;
  std::size_t count = 0;
  std::optional<std::vector<std::string>> labels;
  std::vector<float> vectors;  // count x dim, row-major
  // Provenance of generated files (PRNG and hash versions); optional.
  std::optional<std::string> generator;

  const float* row(std::size_t i) const { return vectors.data() + i * dim; }

  /// Throws FormatError / InvalidData when the fields are inconsistent.
  void validate() const;

  friend bool operator==(const EmbeddingFile&, const EmbeddingFile&) = default;
};

enum class EmbeddingVariant { kBinary, kJson };

/// Reads EMB1 (given either the .emb sidecar or the .emb.json manifest) or
/// EMB1-JSON. Any other path is parsed as JSON and dispatched on "format".
EmbeddingFile load_embeddings(const std::filesystem::path& path);

/// Writes atomically (temp file + rename). For the binary variant `path` may
/// name the sidecar (.emb), the manifest (.emb.json) or a bare stem.
void save_embeddings(const EmbeddingFile& file, const std::filesystem::path& path,
                     EmbeddingVariant variant);

/// Manifest and payload paths of an EMB1 pair.
struct BinaryPaths {
  std::filesystem::path manifest;
  std::filesystem::path payload;
};
BinaryPaths binary_paths(const std::filesystem::path& path);

/// Canonical EMB1-JSON text (sorted keys, trailing newline).
std::string to_json_text(const EmbeddingFile& file);

struct ConceptEntry {
  std::string label;
  Eigen::VectorXd embedding;
};

class ConceptList {
 public:
  /// Validates: non-empty, equal dimensions, finite values, unique non-empty
  /// labels. Throws InvalidData or DimensionError.
  ConceptList(ConceptRole role, std::vector<ConceptEntry> entries);

  /// Labels are mandatory for concept files.
  static ConceptList from_file(const EmbeddingFile& file, ConceptRole role);

  ConceptRole role() const { return role_; }
  Eigen::Index dim() const { return dim_; }
  std::size_t size() const { return entries_.size(); }
  const std::vector<ConceptEntry>& entries() const { return entries_; }

  EmbeddingFile to_file() const;

 private:
  ConceptRole role_;
  Eigen::Index dim_ = 0;
  std::vector<ConceptEntry> entries_;
};

/// D x K matrix whose k-th column is the k-th concept embedding.
Eigen::MatrixXd assemble_matrix(const ConceptList& list);

/// Writes `bytes` to `path` through a sibling temp file and rename, so a
/// failed write never leaves a partial file behind.
void write_file_atomically(const std::filesystem::path& path, const std::string& bytes);

std::string read_file(const std::filesystem::path& path);

}  // namespace dualspace
