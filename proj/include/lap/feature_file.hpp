/*
 * Copyright 2026 The LAP Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#pragma once

#include <cstdint>
#include <filesystem>
#include <istream>
#include <string>

#include "lap/core.hpp"

namespace lap {

// Binary feature file ("LAPF"):
//   bytes 0..3   magic "LAPF"
//   u32          format version (1)
//   u32          rows
//   u32          cols
//   u32          dtype (0 = float32, 1 = float64)
//   u32          reserved (0)
//   rows*cols little-endian values, row-major.
// Feature tensors use float32; float64 is used only inside checkpoints.
enum class DType : std::uint32_t { kFloat32 = 0, kFloat64 = 1 };

inline constexpr std::uint32_t kFeatureFileVersion = 1;
inline constexpr std::size_t kFeatureHeaderBytes = 24;

struct FeatureHeader {
  std::uint32_t rows = 0;
  std::uint32_t cols = 0;
  DType dtype = DType::kFloat32;

  std::size_t payload_bytes() const;
};

// Reads and validates only the header, and checks that the file size
// matches rows * cols exactly.
FeatureHeader read_feature_header(const std::filesystem::path& path);

Matrix<double> read_feature_file(const std::filesystem::path& path);

void write_feature_file(const std::filesystem::path& path,
                        const Matrix<double>& values,
                        DType dtype = DType::kFloat32);

// In-memory encode/decode of one header + payload block.
std::string encode_feature_block(const Matrix<double>& values, DType dtype);
Matrix<double> decode_feature_block(std::istream& in, const std::string& context);

// Writes to a sibling temporary and renames over the destination.
void atomic_write(const std::filesystem::path& path, const std::string& bytes);

std::string read_file(const std::filesystem::path& path);

}  // namespace lap
