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

#include "lap/losses.hpp"

namespace lap {

std::string to_string(ThresholdMode mode) {
  return mode == ThresholdMode::kDynamic ? "dynamic" : "static";
}

ThresholdMode parse_threshold_mode(const std::string& name) {
  if (name == "dynamic") return ThresholdMode::kDynamic;
  if (name == "static") return ThresholdMode::kStatic;
  throw Error("unknown threshold mode '" + name + "' (expected dynamic or static)");
}

}  // namespace lap
