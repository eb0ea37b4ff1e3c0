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

#include <filesystem>
#include <string>

#include "lap/model.hpp"

namespace lap {

// Everything needed to rebuild the inference path from a checkpoint.
struct ModelMeta {
  FusionConfig fusion;
  MlpShape shape;
  Index length = 64;  // snippets per video the model was trained with
  SmootherConfig smoother;
  bool visual_only = false;  // semantic input zeroed (visual-only baseline)
};

// Writes `path` (binary "LAPC" container) and a JSON sidecar next to it
// (`path` with extension replaced by .json).
//
// Container layout, little-endian:
//   "LAPC", u32 version (1), u32 tensor count, u32 reserved (0)
//   per tensor: u32 name length, name bytes, one float64 LAPF block
void save_checkpoint(const std::filesystem::path& path, const MlpParams<double>& params,
                     const ModelMeta& meta);

struct Checkpoint {
  MlpParams<double> params;
  ModelMeta meta;
};

Checkpoint load_checkpoint(const std::filesystem::path& path);

std::filesystem::path sidecar_path(const std::filesystem::path& checkpoint);

}  // namespace lap
