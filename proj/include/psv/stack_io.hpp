// Copyright 2026 The psv Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "psv/image.hpp"
#include "psv/viewport.hpp"

namespace psv {

enum class Frame { kViewport, kSquare };

/// Sidecar metadata stored next to a set of 16-bit PNG channels.
struct StackMeta {
  std::string kind;  // "input", "target", "sequence"
  Frame frame{Frame::kViewport};
  Viewport viewport;
  SquareTransform square;
  std::string scenario_id;
  double timestamp{0.0};
  std::vector<std::string> channel_names;

  bool operator==(const StackMeta&) const = default;
};

struct ImageStack {
  std::vector<Image> channels;
  StackMeta meta;
};

/// Writes `<prefix>_<NN>.png` per channel and the sidecar `<prefix>.json`.
void save_stack(const std::filesystem::path& prefix, std::span<const Image> channels, const StackMeta& meta);
/// Accepts either the prefix or the sidecar path.
ImageStack load_stack(const std::filesystem::path& prefix_or_sidecar);

std::filesystem::path sidecar_path(const std::filesystem::path& prefix);

}  // namespace psv
