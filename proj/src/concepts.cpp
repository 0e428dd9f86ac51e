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

#include "dualspace/concepts.hpp"

#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <unistd.h>

#include "dualspace/errors.hpp"
#include "json.hpp"

namespace dualspace {
namespace {

namespace fs = std::filesystem;

// Numbers parse and print as binary32 so EMB1-JSON values round-trip exactly.
using Json = nlohmann::basic_json<std::map, std::vector, std::string, bool, std::int64_t,
                                  std::uint64_t, float>;

bool ends_with(const std::string& s, const std::string& suffix) {
  return s.size() >= suffix.size() && s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
}

std::uint32_t to_little_endian(std::uint32_t v) {
  if constexpr (std::endian::native == std::endian::little) {
    return v;
  } else {
    return ((v & 0xffu) << 24) | ((v & 0xff00u) << 8) | ((v >> 8) & 0xff00u) | (v >> 24);
  }
}

std::string encode_payload(const std::vector<float>& values) {
  std::string out(values.size() * 4, '\0');
  for (std::size_t i = 0; i < values.size(); ++i) {
    const std::uint32_t bits = to_little_endian(std::bit_cast<std::uint32_t>(values[i]));
    std::memcpy(out.data() + 4 * i, &bits, 4);
  }
  return out;
}

std::vector<float> decode_payload(const std::string& bytes) {
  std::vector<float> out(bytes.size() / 4);
  for (std::size_t i = 0; i < out.size(); ++i) {
    std::uint32_t bits = 0;
    std::memcpy(&bits, bytes.data() + 4 * i, 4);
    out[i] = std::bit_cast<float>(to_little_endian(bits));
  }
  return out;
}

Json parse_json(const std::string& text, const fs::path& path) {
  try {
    return Json::parse(text);
  } catch (const Json::out_of_range& e) {
    // float overflow while parsing a number
    throw InvalidData(path.string() + ": value out of float32 range: " + e.what());
  } catch (const Json::exception& e) {
    throw FormatError(path.string() + ": invalid JSON: " + e.what());
  }
}

std::size_t read_size(const Json& doc, const char* key, const fs::path& path) {
  if (!doc.contains(key) || !doc.at(key).is_number_unsigned()) {
    throw FormatError(path.string() + ": field \"" + key + "\" must be a non-negative integer");
  }
  return doc.at(key).get<std::size_t>();
}

std::optional<std::vector<std::string>> read_labels(const Json& doc, const fs::path& path) {
  if (!doc.contains("labels") || doc.at("labels").is_null()) return std::nullopt;
  const Json& labels = doc.at("labels");
  if (!labels.is_array()) throw FormatError(path.string() + ": \"labels\" must be an array");
  std::vector<std::string> out;
  out.reserve(labels.size());
  for (const Json& l : labels) {
    if (!l.is_string()) throw FormatError(path.string() + ": labels must be strings");
    out.push_back(l.get<std::string>());
  }
  return out;
}

std::optional<std::string> read_generator(const Json& doc, const fs::path& path) {
  if (!doc.contains("generator") || doc.at("generator").is_null()) return std::nullopt;
  if (!doc.at("generator").is_string()) {
    throw FormatError(path.string() + ": \"generator\" must be a string");
  }
  return doc.at("generator").get<std::string>();
}

void check_header(const Json& doc, const fs::path& path, const char* expected_format) {
  if (!doc.is_object()) throw FormatError(path.string() + ": top level must be an object");
  if (!doc.contains("format") || !doc.at("format").is_string() ||
      doc.at("format").get<std::string>() != expected_format) {
    throw FormatError(path.string() + ": expected format \"" + expected_format + "\"");
  }
  if (doc.contains("dtype") &&
      (!doc.at("dtype").is_string() || doc.at("dtype").get<std::string>() != kDtypeF32)) {
    throw FormatError(path.string() + ": unsupported dtype, only \"f32le\" is accepted");
  }
}

void check_finite(const EmbeddingFile& file, const fs::path& path) {
  for (std::size_t i = 0; i < file.vectors.size(); ++i) {
    if (!std::isfinite(file.vectors[i])) {
      throw InvalidData(path.string() + ": non-finite value in vector " +
                        std::to_string(i / std::max<std::size_t>(file.dim, 1)));
    }
  }
}

EmbeddingFile load_binary(const BinaryPaths& paths) {
  const Json doc = parse_json(read_file(paths.manifest), paths.manifest);
  check_header(doc, paths.manifest, kFormatBinary);
  EmbeddingFile file;
  file.format_tag = kFormatBinary;
  file.dim = read_size(doc, "dim", paths.manifest);
  file.count = read_size(doc, "count", paths.manifest);
  file.labels = read_labels(doc, paths.manifest);
  file.generator = read_generator(doc, paths.manifest);
  const std::string payload = read_file(paths.payload);
  const std::size_t expected = file.count * file.dim * 4;
  if (payload.size() != expected) {
    throw FormatError(paths.payload.string() + ": payload is " + std::to_string(payload.size()) +
                      " bytes, manifest implies " + std::to_string(expected));
  }
  file.vectors = decode_payload(payload);
  check_finite(file, paths.payload);
  file.validate();
  return file;
}

EmbeddingFile load_json(const Json& doc, const fs::path& path) {
  check_header(doc, path, kFormatJson);
  EmbeddingFile file;
  file.format_tag = kFormatJson;
  file.dim = read_size(doc, "dim", path);
  file.labels = read_labels(doc, path);
  file.generator = read_generator(doc, path);
  if (!doc.contains("vectors") || !doc.at("vectors").is_array()) {
    throw FormatError(path.string() + ": \"vectors\" must be an array");
  }
  const Json& rows = doc.at("vectors");
  file.count = rows.size();
  if (doc.contains("count") && read_size(doc, "count", path) != file.count) {
    throw FormatError(path.string() + ": \"count\" disagrees with the number of vectors");
  }
  file.vectors.reserve(file.count * file.dim);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const Json& row = rows[i];
    if (!row.is_array() || row.size() != file.dim) {
      throw FormatError(path.string() + ": vector " + std::to_string(i) + " must have " +
                        std::to_string(file.dim) + " numbers");
    }
    for (const Json& x : row) {
      if (!x.is_number()) throw FormatError(path.string() + ": vector entries must be numbers");
      file.vectors.push_back(x.get<float>());
    }
  }
  check_finite(file, path);
  file.validate();
  return file;
}

std::string manifest_text(const EmbeddingFile& file) {
  Json doc;
  doc["format"] = kFormatBinary;
  doc["dtype"] = file.dtype;
  doc["dim"] = file.dim;
  doc["count"] = file.count;
  if (file.labels) doc["labels"] = *file.labels;
  if (file.generator) doc["generator"] = *file.generator;
  return doc.dump(2) + "\n";
}

}  // namespace

const char* to_string(ConceptRole role) {
  return role == ConceptRole::kToxic ? "toxic" : "clean";
}

void EmbeddingFile::validate() const {
  if (format_tag != kFormatBinary && format_tag != kFormatJson) {
    throw FormatError("unknown format tag \"" + format_tag + "\"");
  }
  if (dtype != kDtypeF32) throw FormatError("unsupported dtype \"" + dtype + "\"");
  if (dim < 1) throw FormatError("embedding dimension must be at least 1");
  if (count < 1) throw FormatError("embedding file must contain at least one vector");
  if (vectors.size() != count * dim) {
    throw FormatError("vector payload holds " + std::to_string(vectors.size()) +
                      " values, expected count*dim = " + std::to_string(count * dim));
  }
  if (labels && labels->size() != count) {
    throw FormatError("labels has " + std::to_string(labels->size()) + " entries, expected " +
                      std::to_string(count));
  }
  for (float v : vectors) {
    if (!std::isfinite(v)) throw InvalidData("embedding file contains non-finite values");
  }
}

BinaryPaths binary_paths(const fs::path& path) {
  const std::string s = path.string();
  if (ends_with(s, ".emb.json")) return {path, fs::path(s.substr(0, s.size() - 5))};
  if (ends_with(s, ".emb")) return {fs::path(s + ".json"), path};
  return {fs::path(s + ".emb.json"), fs::path(s + ".emb")};
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  if (in.bad()) throw IoError("error reading " + path.string());
  return buf.str();
}

void write_file_atomically(const fs::path& path, const std::string& bytes) {
  fs::path tmp = path;
  tmp += ".tmp." + std::to_string(::getpid());
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write " + path.string());
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    out.flush();
    if (!out) {
      std::error_code ignored;
      fs::remove(tmp, ignored);
      throw IoError("error writing " + path.string());
    }
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) {
    std::error_code ignored;
    fs::remove(tmp, ignored);
    throw IoError("cannot move temporary file into " + path.string() + ": " + ec.message());
  }
}

EmbeddingFile load_embeddings(const fs::path& path) {
  const std::string s = path.string();
  if (ends_with(s, ".emb") || ends_with(s, ".emb.json")) return load_binary(binary_paths(path));
  const Json doc = parse_json(read_file(path), path);
  if (doc.is_object() && doc.contains("format") && doc.at("format") == kFormatBinary) {
    throw FormatError(path.string() + ": EMB1 manifests must be named <name>.emb.json");
  }
  return load_json(doc, path);
}

std::string to_json_text(const EmbeddingFile& file) {
  // Hand-laid so that each vector sits on its own line; every scalar still
  // goes through the float-typed serializer.
  std::string out = "{\n";
  out += "  \"count\": " + Json(file.count).dump() + ",\n";
  out += "  \"dim\": " + Json(file.dim).dump() + ",\n";
  out += "  \"dtype\": " + Json(file.dtype).dump() + ",\n";
  out += "  \"format\": " + Json(kFormatJson).dump() + ",\n";
  if (file.generator) out += "  \"generator\": " + Json(*file.generator).dump() + ",\n";
  if (file.labels) out += "  \"labels\": " + Json(*file.labels).dump() + ",\n";
  out += "  \"vectors\": [";
  for (std::size_t i = 0; i < file.count; ++i) {
    out += i == 0 ? "\n    [" : ",\n    [";
    for (std::size_t j = 0; j < file.dim; ++j) {
      if (j > 0) out += ", ";
      out += Json(file.vectors[i * file.dim + j]).dump();
    }
    out += "]";
  }
  out += "\n  ]\n}\n";
  return out;
}

void save_embeddings(const EmbeddingFile& file, const fs::path& path, EmbeddingVariant variant) {
  file.validate();
  if (variant == EmbeddingVariant::kJson) {
    EmbeddingFile copy = file;
    copy.format_tag = kFormatJson;
    write_file_atomically(path, to_json_text(copy));
    return;
  }
  const BinaryPaths paths = binary_paths(path);
  write_file_atomically(paths.payload, encode_payload(file.vectors));
  write_file_atomically(paths.manifest, manifest_text(file));
}

ConceptList::ConceptList(ConceptRole role, std::vector<ConceptEntry> entries)
    : role_(role), entries_(std::move(entries)) {
  if (entries_.empty()) {
    throw InvalidData(std::string(to_string(role_)) + " concept list is empty");
  }
  dim_ = entries_.front().embedding.size();
  if (dim_ < 1) throw InvalidData("concept embeddings must have dimension >= 1");
  std::set<std::string> seen;
  for (const ConceptEntry& e : entries_) {
    if (e.label.empty()) throw InvalidData("concept labels must be non-empty");
    if (!seen.insert(e.label).second) throw InvalidData("duplicate concept label \"" + e.label + "\"");
    if (e.embedding.size() != dim_) {
      throw DimensionError("concept \"" + e.label + "\" has dimension " +
                           std::to_string(e.embedding.size()) + ", expected " +
                           std::to_string(dim_));
    }
    if (!e.embedding.allFinite()) {
      throw InvalidData("concept \"" + e.label + "\" has non-finite values");
    }
  }
}

ConceptList ConceptList::from_file(const EmbeddingFile& file, ConceptRole role) {
  file.validate();
  if (!file.labels) {
    throw InvalidData(std::string(to_string(role)) + " concept file must carry labels");
  }
  std::vector<ConceptEntry> entries;
  entries.reserve(file.count);
  for (std::size_t i = 0; i < file.count; ++i) {
    Eigen::VectorXd v = Eigen::Map<const Eigen::VectorXf>(file.row(i), static_cast<Eigen::Index>(file.dim))
                            .cast<double>();
    entries.push_back({(*file.labels)[i], std::move(v)});
  }
  return ConceptList(role, std::move(entries));
}

EmbeddingFile ConceptList::to_file() const {
  EmbeddingFile file;
  file.dim = static_cast<std::size_t>(dim_);
  file.count = entries_.size();
  file.labels.emplace();
  file.vectors.reserve(file.count * file.dim);
  for (const ConceptEntry& e : entries_) {
    file.labels->push_back(e.label);
    for (Eigen::Index j = 0; j < dim_; ++j) file.vectors.push_back(static_cast<float>(e.embedding(j)));
  }
  return file;
}

Eigen::MatrixXd assemble_matrix(const ConceptList& list) {
  Eigen::MatrixXd m(list.dim(), static_cast<Eigen::Index>(list.size()));
  for (std::size_t k = 0; k < list.size(); ++k) {
    m.col(static_cast<Eigen::Index>(k)) = list.entries()[k].embedding;
  }
  return m;
}

}  // namespace dualspace
