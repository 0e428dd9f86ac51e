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

// PGB1: the serialized ProjectorBundle. All integers and floats are
// little-endian.
//
//   offset        size    field
//   0             4       magic "PGB1"
//   4             4       u32 format version (1)
//   8             4       u32 dim D
//   12            4       u32 toxic rank
//   16            4       u32 clean rank
//   20            8       f64 rel_tol
//   28            4*D*D   toxic projector, f32, row-major
//   28+4DD        4*D*D   clean projector, f32, row-major
//   28+8DD        4       u32 fingerprint length F (0 = absent)
//   32+8DD        F       fingerprint, ASCII hex
//   32+8DD+F      4*D     clean concept centroid, f32
//
// Nothing follows the centroid; trailing bytes are a FormatError.

#include <filesystem>
#include <string>

#include "dualspace/risk.hpp"

namespace dualspace {

inline constexpr std::uint32_t kBundleVersion = 1;

std::string serialize_bundle(const ProjectorBundle& bundle);

/// Parses and validates. Projectors come back at float32 precision.
ProjectorBundle deserialize_bundle(const std::string& bytes);

void save_bundle(const ProjectorBundle& bundle, const std::filesystem::path& path);
ProjectorBundle load_bundle(const std::filesystem::path& path);

}  // namespace dualspace
