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

#include "lap/checkpoint.hpp"

#include <cstring>
#include <sstream>

#include "json.hpp"
#include "lap/feature_file.hpp"

namespace lap {
namespace {

using nlohmann::json;

void put_u32(std::string& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
}

std::uint32_t get_u32(std::istream& in, const std::string& context) {
  unsigned char b[4];
  if (!in.read(reinterpret_cast<char*>(b), 4)) throw Error(context + ": truncated checkpoint");
  return b[0] | (b[1] << 8) | (b[2] << 16) | (static_cast<std::uint32_t>(b[3]) << 24);
}

}  // namespace

std::string to_string(FusionMode mode) { return mode == FusionMode::kConcat ? "concat" : "add"; }

FusionMode parse_fusion_mode(const std::string& name) {
  if (name == "concat") return FusionMode::kConcat;
  if (name == "add") return FusionMode::kAdd;
  throw Error("unknown fusion mode '" + name + "' (expected concat or add)");
}

void FusionConfig::validate() const {
  require(visual_dim >= 1 && semantic_dim >= 1, "fusion dimensions must be positive");
  require(mode != FusionMode::kAdd || visual_dim == semantic_dim,
          "add fusion requires d_v == d_t, got d_v=" + std::to_string(visual_dim) +
              " d_t=" + std::to_string(semantic_dim));
}

void SmootherConfig::validate() const {
  require(window >= 1 && window % 2 == 1,
          "smoother window must be a positive odd integer, got " + std::to_string(window));
}

std::filesystem::path sidecar_path(const std::filesystem::path& checkpoint) {
  auto p = checkpoint;
  p.replace_extension(".json");
  return p;
}

void save_checkpoint(const std::filesystem::path& path, const MlpParams<double>& params,
                     const ModelMeta& meta) {
  std::string out = "LAPC";
  put_u32(out, 1);
  put_u32(out, static_cast<std::uint32_t>(params.tensors.size()));
  put_u32(out, 0);
  for (std::size_t i = 0; i < params.tensors.size(); ++i) {
    const std::string name = MlpParams<double>::tensor_name(i);
    put_u32(out, static_cast<std::uint32_t>(name.size()));
    out += name;
    out += encode_feature_block(params.tensors[i], DType::kFloat64);
  }

  json side = {{"fusion", to_string(meta.fusion.mode)},
               {"d_v", meta.fusion.visual_dim},
               {"d_t", meta.fusion.semantic_dim},
               {"d_f", meta.fusion.fused_dim()},
               {"hidden", meta.shape.hidden},
               {"L", meta.length},
               {"smoother", meta.smoother.enabled},
               {"smoother_window", meta.smoother.window},
               {"visual_only", meta.visual_only}};
  atomic_write(path, out);
  atomic_write(sidecar_path(path), side.dump(2) + "\n");
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
  const std::string context = path.string();
  Checkpoint ckpt;
  try {
    const json side = json::parse(read_file(sidecar_path(path)));
    ckpt.meta.fusion.mode = parse_fusion_mode(side.at("fusion").get<std::string>());
    ckpt.meta.fusion.visual_dim = side.at("d_v").get<Index>();
    ckpt.meta.fusion.semantic_dim = side.at("d_t").get<Index>();
    ckpt.meta.shape.hidden = side.at("hidden").get<std::vector<Index>>();
    ckpt.meta.length = side.at("L").get<Index>();
    ckpt.meta.smoother.enabled = side.value("smoother", false);
    ckpt.meta.smoother.window = side.value("smoother_window", Index{5});
    ckpt.meta.visual_only = side.value("visual_only", false);
    ckpt.meta.fusion.validate();
    ckpt.meta.shape.input_dim = ckpt.meta.fusion.fused_dim();
    require(side.at("d_f").get<Index>() == ckpt.meta.shape.input_dim,
            context + ": sidecar d_f inconsistent with fusion mode");
  } catch (const json::exception& e) {
    throw Error(context + ": malformed checkpoint sidecar: " + e.what());
  }

  std::istringstream in(read_file(path));
  char magic[4];
  if (!in.read(magic, 4) || std::memcmp(magic, "LAPC", 4) != 0) {
    throw Error(context + ": bad checkpoint magic");
  }
  require(get_u32(in, context) == 1, context + ": unsupported checkpoint version");
  const std::uint32_t count = get_u32(in, context);
  get_u32(in, context);

  ckpt.params = MlpParams<double>::zeros(ckpt.meta.shape);
  require(count == ckpt.params.tensors.size(),
          context + ": checkpoint holds " + std::to_string(count) + " tensors, sidecar implies " +
              std::to_string(ckpt.params.tensors.size()));
  for (std::uint32_t i = 0; i < count; ++i) {
    const std::uint32_t len = get_u32(in, context);
    std::string name(len, '\0');
    if (!in.read(name.data(), len)) throw Error(context + ": truncated tensor name");
    require(name == MlpParams<double>::tensor_name(i),
            context + ": unexpected tensor '" + name + "' at position " + std::to_string(i));
    Matrix<double> t = decode_feature_block(in, context + ":" + name);
    auto& dst = ckpt.params.tensors[i];
    require(t.rows() == dst.rows() && t.cols() == dst.cols(),
            context + ": tensor '" + name + "' has shape " + std::to_string(t.rows()) + "x" +
                std::to_string(t.cols()) + ", expected " + std::to_string(dst.rows()) + "x" +
                std::to_string(dst.cols()));
    dst = std::move(t);
  }
  return ckpt;
}

}  // namespace lap
