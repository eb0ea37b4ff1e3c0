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

#include "lap/feature_file.hpp"

#include <array>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iterator>
#include <sstream>

namespace lap {
namespace {

constexpr std::array<char, 4> kMagic = {'L', 'A', 'P', 'F'};

template <typename UInt>
void put_le(std::string& out, UInt value) {
  for (std::size_t i = 0; i < sizeof(UInt); ++i) {
    out.push_back(static_cast<char>((value >> (8 * i)) & 0xFF));
  }
}

template <typename UInt>
UInt get_le(const unsigned char* bytes) {
  UInt value = 0;
  for (std::size_t i = 0; i < sizeof(UInt); ++i) {
    value |= static_cast<UInt>(bytes[i]) << (8 * i);
  }
  return value;
}

std::size_t dtype_size(DType dtype) {
  switch (dtype) {
    case DType::kFloat32:
      return 4;
    case DType::kFloat64:
      return 8;
  }
  throw Error("unknown dtype");
}

FeatureHeader parse_header(const std::array<unsigned char, kFeatureHeaderBytes>& raw,
                           const std::string& context) {
  if (std::memcmp(raw.data(), kMagic.data(), kMagic.size()) != 0) {
    throw Error(context + ": bad magic, expected \"LAPF\"");
  }
  const auto version = get_le<std::uint32_t>(raw.data() + 4);
  if (version != kFeatureFileVersion) {
    throw Error(context + ": unsupported format version " + std::to_string(version));
  }
  FeatureHeader header;
  header.rows = get_le<std::uint32_t>(raw.data() + 8);
  header.cols = get_le<std::uint32_t>(raw.data() + 12);
  const auto dtype = get_le<std::uint32_t>(raw.data() + 16);
  if (dtype > 1) throw Error(context + ": unsupported dtype " + std::to_string(dtype));
  header.dtype = static_cast<DType>(dtype);
  if (get_le<std::uint32_t>(raw.data() + 20) != 0) {
    throw Error(context + ": reserved header field must be 0");
  }
  if (header.rows == 0 || header.cols == 0) {
    throw Error(context + ": empty tensor (" + std::to_string(header.rows) + "x" +
                std::to_string(header.cols) + ")");
  }
  return header;
}

}  // namespace

std::size_t FeatureHeader::payload_bytes() const {
  return static_cast<std::size_t>(rows) * cols * dtype_size(dtype);
}

std::string encode_feature_block(const Matrix<double>& values, DType dtype) {
  require(values.rows() > 0 && values.cols() > 0, "cannot encode an empty tensor");
  std::string out;
  out.reserve(kFeatureHeaderBytes + values.size() * dtype_size(dtype));
  out.append(kMagic.data(), kMagic.size());
  put_le<std::uint32_t>(out, kFeatureFileVersion);
  put_le<std::uint32_t>(out, static_cast<std::uint32_t>(values.rows()));
  put_le<std::uint32_t>(out, static_cast<std::uint32_t>(values.cols()));
  put_le<std::uint32_t>(out, static_cast<std::uint32_t>(dtype));
  put_le<std::uint32_t>(out, 0);
  for (Index r = 0; r < values.rows(); ++r) {
    for (Index c = 0; c < values.cols(); ++c) {
      if (dtype == DType::kFloat32) {
        put_le(out, std::bit_cast<std::uint32_t>(static_cast<float>(values(r, c))));
      } else {
        put_le(out, std::bit_cast<std::uint64_t>(values(r, c)));
      }
    }
  }
  return out;
}

Matrix<double> decode_feature_block(std::istream& in, const std::string& context) {
  std::array<unsigned char, kFeatureHeaderBytes> raw{};
  if (!in.read(reinterpret_cast<char*>(raw.data()), raw.size())) {
    throw Error(context + ": truncated header");
  }
  const FeatureHeader header = parse_header(raw, context);
  std::string payload(header.payload_bytes(), '\0');
  if (!in.read(payload.data(), static_cast<std::streamsize>(payload.size()))) {
    throw Error(context + ": truncated payload, header says " + std::to_string(header.rows) +
                "x" + std::to_string(header.cols));
  }
  const auto* bytes = reinterpret_cast<const unsigned char*>(payload.data());
  Matrix<double> values(header.rows, header.cols);
  const std::size_t width = dtype_size(header.dtype);
  for (Index r = 0; r < values.rows(); ++r) {
    for (Index c = 0; c < values.cols(); ++c) {
      const unsigned char* p = bytes + (r * values.cols() + c) * width;
      const double v = header.dtype == DType::kFloat32
                           ? static_cast<double>(std::bit_cast<float>(get_le<std::uint32_t>(p)))
                           : std::bit_cast<double>(get_le<std::uint64_t>(p));
      if (!std::isfinite(v)) {
        throw Error(context + ": non-finite value at (" + std::to_string(r) + ", " +
                    std::to_string(c) + ")");
      }
      values(r, c) = v;
    }
  }
  return values;
}

FeatureHeader read_feature_header(const std::filesystem::path& path) {
  const std::string context = path.string();
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(context + ": cannot open feature file");
  std::array<unsigned char, kFeatureHeaderBytes> raw{};
  if (!in.read(reinterpret_cast<char*>(raw.data()), raw.size())) {
    throw Error(context + ": truncated header");
  }
  const FeatureHeader header = parse_header(raw, context);
  const auto size = std::filesystem::file_size(path);
  if (size != kFeatureHeaderBytes + header.payload_bytes()) {
    throw Error(context + ": payload size " + std::to_string(size - kFeatureHeaderBytes) +
                " bytes does not match header " + std::to_string(header.rows) + "x" +
                std::to_string(header.cols));
  }
  return header;
}

Matrix<double> read_feature_file(const std::filesystem::path& path) {
  read_feature_header(path);
  std::ifstream in(path, std::ios::binary);
  return decode_feature_block(in, path.string());
}

void write_feature_file(const std::filesystem::path& path, const Matrix<double>& values,
                        DType dtype) {
  atomic_write(path, encode_feature_block(values, dtype));
}

void atomic_write(const std::filesystem::path& path, const std::string& bytes) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(path.string() + ": cannot open for writing");
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw Error(path.string() + ": write failed");
  }
  std::filesystem::rename(tmp, path);
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(path.string() + ": cannot open");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

}  // namespace lap
