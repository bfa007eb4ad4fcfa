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

#include <span>

#include "psv/geometry.hpp"
#include "psv/image.hpp"
#include "psv/scenario.hpp"

namespace psv {

inline constexpr double kPixelBudget = 1.0e6;
inline constexpr int kSquareSize = 512;

/// World <-> pixel transform of a situation. Pixel x runs along `rotation`, pixel y along
/// rotation + pi/2; `origin` is the world position of the pixel-space corner (0, 0).
struct Viewport {
  Vec2 origin;
  double rotation{0.0};
  double meters_per_pixel{1.0};
  int width_px{0};
  int height_px{0};

  /// Continuous pixel coordinates; the pixel index is the floor.
  Vec2 to_pixel(const Vec2& world) const;
  Vec2 to_world(const Vec2& pixel) const;
  bool pixel_index(const Vec2& world, int& px, int& py) const;

  bool operator==(const Viewport&) const = default;
};

struct ViewportConfig {
  double safety_margin{10.0};   // m, inflation of the reachable hull
  double min_extent{100.0};     // m, fallback window side
  double max_aspect{4.0};
  int margin_directions{16};    // polygon approximation of the inflation circle
};

/// Min-area rectangle around object positions, the ego position and the reachable points
/// inflated by the safety margin, scaled to a one-megapixel raster.
Viewport fit_viewport(const Scenario& scenario, std::span<const Vec2> reachable,
                      const ViewportConfig& config = {});

/// Similarity transform placing a viewport raster onto the diagonal of a square.
struct SquareTransform {
  double rotation{0.0};  // applied to the source raster
  double scale{1.0};
  int src_width{0};
  int src_height{0};
  int size{kSquareSize};

  Vec2 forward(const Vec2& src_px) const;
  Vec2 inverse(const Vec2& dst_px) const;

  bool operator==(const SquareTransform&) const = default;
};

/// Rotation onto the diagonal (pi/4) and scale size*sqrt(2)/(width+height), the largest
/// scale at which the rotated raster fits the square.
SquareTransform square_transform_for(const Viewport& viewport, int size = kSquareSize);

/// Bilinear resampling into the square frame; uncovered pixels are zero.
Image square_resize(const Image& image, const SquareTransform& transform);
/// Bilinear resampling of a square-frame image back onto the viewport raster.
Image inverse_square_resize(const Image& square, const SquareTransform& transform);

}  // namespace psv
