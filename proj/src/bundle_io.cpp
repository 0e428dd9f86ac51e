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

#include "dualspace/bundle_io.hpp"

#include <bit>
#include <cstring>

#include "dualspace/concepts.hpp"
#include "dualspace/errors.hpp"

namespace dualspace {
namespace {

constexpr char kMagic[4] = {'P', 'G', 'B', '1'};

class Writer {
 public:
  void bytes(const void* data, std::size_t n) {
    out_.append(static_cast<const char*>(data), n);
  }
  void u32(std::uint32_t v) { little_endian(v, 4); }
  void f32(float v) { u32(std::bit_cast<std::uint32_t>(v)); }
  void f64(double v) { little_endian(std::bit_cast<std::uint64_t>(v), 8); }

  void matrix(const Eigen::MatrixXd& m) {
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
      for (Eigen::Index j = 0; j < m.cols(); ++j) f32(static_cast<float>(m(i, j)));
    }
  }

  std::string take() { return std::move(out_); }

 private:
  void little_endian(std::uint64_t v, int n) {
    for (int i = 0; i < n; ++i) out_.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
  }
  std::string out_;
};

class Reader {
 public:
  explicit Reader(const std::string& in) : in_(in) {}

  void bytes(void* dst, std::size_t n) {
    need(n);
    std::memcpy(dst, in_.data() + pos_, n);
    pos_ += n;
  }
  std::uint32_t u32() { return static_cast<std::uint32_t>(little_endian(4)); }
  float f32() { return std::bit_cast<float>(u32()); }
  double f64() { return std::bit_cast<double>(little_endian(8)); }

  Eigen::MatrixXd matrix(Eigen::Index d) {
    need(static_cast<std::size_t>(d * d) * 4);
    Eigen::MatrixXd m(d, d);
    for (Eigen::Index i = 0; i < d; ++i) {
      for (Eigen::Index j = 0; j < d; ++j) m(i, j) = f32();
    }
    return m;
  }

  bool at_end() const { return pos_ == in_.size(); }

 private:
  void need(std::size_t n) const {
    if (in_.size() - pos_ < n) throw FormatError("bundle file is truncated");
  }
  std::uint64_t little_endian(int n) {
    need(static_cast<std::size_t>(n));
    std::uint64_t v = 0;
    for (int i = 0; i < n; ++i) {
      v |= static_cast<std::uint64_t>(static_cast<unsigned char>(in_[pos_ + i])) << (8 * i);
    }
    pos_ += static_cast<std::size_t>(n);
    return v;
  }

  const std::string& in_;
  std::size_t pos_ = 0;
};

}  // namespace

std::string serialize_bundle(const ProjectorBundle& bundle) {
  Writer w;
  w.bytes(kMagic, 4);
  w.u32(kBundleVersion);
  w.u32(static_cast<std::uint32_t>(bundle.dim()));
  w.u32(static_cast<std::uint32_t>(bundle.toxic_rank()));
  w.u32(static_cast<std::uint32_t>(bundle.clean_rank()));
  w.f64(bundle.rel_tol);
  w.matrix(bundle.toxic_projector.matrix());
  w.matrix(bundle.clean_projector.matrix());
  w.u32(static_cast<std::uint32_t>(bundle.fingerprint.size()));
  w.bytes(bundle.fingerprint.data(), bundle.fingerprint.size());
  for (Eigen::Index j = 0; j < bundle.clean_centroid.size(); ++j) {
    w.f32(static_cast<float>(bundle.clean_centroid(j)));
  }
  return w.take();
}

ProjectorBundle deserialize_bundle(const std::string& bytes) {
  Reader r(bytes);
  char magic[4];
  r.bytes(magic, 4);
  if (std::memcmp(magic, kMagic, 4) != 0) throw FormatError("not a PGB1 bundle (bad magic)");
  const std::uint32_t version = r.u32();
  if (version != kBundleVersion) {
    throw FormatError("unsupported PGB1 version " + std::to_string(version));
  }
  const auto dim = static_cast<Eigen::Index>(r.u32());
  if (dim < 1) throw FormatError("bundle dimension must be at least 1");
  const auto toxic_rank = static_cast<Eigen::Index>(r.u32());
  const auto clean_rank = static_cast<Eigen::Index>(r.u32());
  const double rel_tol = r.f64();
  Eigen::MatrixXd toxic = r.matrix(dim);
  Eigen::MatrixXd clean = r.matrix(dim);
  const std::uint32_t fp_size = r.u32();
  std::string fp(fp_size, '\0');
  r.bytes(fp.data(), fp_size);
  Eigen::VectorXd centroid(dim);
  for (Eigen::Index j = 0; j < dim; ++j) centroid(j) = r.f32();
  if (!r.at_end()) throw FormatError("trailing bytes after PGB1 bundle");

  ProjectorBundle bundle{
      Projector<double>::from_matrix(std::move(toxic), toxic_rank, rel_tol),
      Projector<double>::from_matrix(std::move(clean), clean_rank, rel_tol),
      rel_tol,
      std::move(fp),
      std::move(centroid),
  };
  bundle.validate();
  return bundle;
}

void save_bundle(const ProjectorBundle& bundle, const std::filesystem::path& path) {
  write_file_atomically(path, serialize_bundle(bundle));
}

ProjectorBundle load_bundle(const std::filesystem::path& path) {
  return deserialize_bundle(read_file(path));
}

}  // namespace dualspace
