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

#include "psv/viewport.hpp"

#include <algorithm>
#include <cmath>

#include "psv/error.hpp"

namespace psv {

Vec2 Viewport::to_pixel(const Vec2& world) const {
  const Vec2 local = rotate(world - origin, -rotation);
  return local * (1.0 / meters_per_pixel);
}

Vec2 Viewport::to_world(const Vec2& pixel) const { return origin + rotate(pixel * meters_per_pixel, rotation); }

bool Viewport::pixel_index(const Vec2& world, int& px, int& py) const {
  const Vec2 p = to_pixel(world);
  if (!(p.x >= 0.0 && p.y >= 0.0 && p.x < width_px && p.y < height_px)) return false;
  px = static_cast<int>(p.x);
  py = static_cast<int>(p.y);
  return true;
}

Viewport fit_viewport(const Scenario& scenario, std::span<const Vec2> reachable, const ViewportConfig& config) {
  std::vector<Vec2> points;
  points.push_back({scenario.ego.x, scenario.ego.y});
  for (const auto& o : scenario.objects) points.push_back(o.position);
  // Inflating the hull equals inflating every point (Minkowski sum with a convex polygon).
  const std::vector<Vec2> reach(reachable.begin(), reachable.end());
  for (const auto& p : convex_hull(reach)) {
    for (int k = 0; k < config.margin_directions; ++k) {
      const double a = 2.0 * std::numbers::pi * k / config.margin_directions;
      // Circumscribe the circle so the polygon contains the full margin.
      const double r = config.safety_margin / std::cos(std::numbers::pi / config.margin_directions);
      points.push_back(p + unit(a) * r);
    }
  }
  const auto hull = convex_hull(points);
  BoundingRect rect = min_area_rect(hull);

  if (rect.length < config.min_extent) {
    rect.length = config.min_extent;
    rect.width = config.min_extent;
    if (hull.size() < 3) rect.rotation = 0.0;
  }
  rect.width = std::max(rect.width, rect.length / config.max_aspect);

  Viewport vp;
  vp.rotation = rect.rotation;
  vp.meters_per_pixel = std::sqrt(rect.length * rect.width / kPixelBudget);
  vp.width_px = std::max(1, static_cast<int>(std::lround(rect.length / vp.meters_per_pixel)));
  vp.height_px = std::max(1, static_cast<int>(std::lround(rect.width / vp.meters_per_pixel)));
  const Vec2 half{0.5 * vp.width_px * vp.meters_per_pixel, 0.5 * vp.height_px * vp.meters_per_pixel};
  vp.origin = rect.center - rotate(half, rect.rotation);
  return vp;
}

SquareTransform square_transform_for(const Viewport& viewport, int size) {
  if (viewport.width_px <= 0 || viewport.height_px <= 0) {
    throw Error(ErrorCode::kInvalidArgument, "square_transform_for: empty viewport");
  }
  SquareTransform t;
  t.rotation = std::numbers::pi / 4.0;
  t.scale = size * std::numbers::sqrt2 / (viewport.width_px + viewport.height_px);
  t.src_width = viewport.width_px;
  t.src_height = viewport.height_px;
  t.size = size;
  return t;
}

Vec2 SquareTransform::forward(const Vec2& src_px) const {
  const Vec2 src_center{0.5 * src_width, 0.5 * src_height};
  const Vec2 dst_center{0.5 * size, 0.5 * size};
  return dst_center + rotate(src_px - src_center, rotation) * scale;
}

Vec2 SquareTransform::inverse(const Vec2& dst_px) const {
  const Vec2 src_center{0.5 * src_width, 0.5 * src_height};
  const Vec2 dst_center{0.5 * size, 0.5 * size};
  return src_center + rotate(dst_px - dst_center, -rotation) * (1.0 / scale);
}

Image square_resize(const Image& image, const SquareTransform& t) {
  if (image.width() != t.src_width || image.height() != t.src_height) {
    throw Error(ErrorCode::kMismatch, "square_resize: image does not match the viewport dimensions");
  }
  Image out(t.size, t.size);
  for (int y = 0; y < t.size; ++y) {
    for (int x = 0; x < t.size; ++x) {
      const Vec2 src = t.inverse({x + 0.5, y + 0.5});
      out.at(x, y) = std::clamp(image.bilinear(src.x, src.y), 0.0f, 1.0f);
    }
  }
  return out;
}

Image inverse_square_resize(const Image& square, const SquareTransform& t) {
  if (square.width() != t.size || square.height() != t.size) {
    throw Error(ErrorCode::kMismatch, "inverse_square_resize: image is not in the square frame");
  }
  Image out(t.src_width, t.src_height);
  for (int y = 0; y < t.src_height; ++y) {
    for (int x = 0; x < t.src_width; ++x) {
      const Vec2 dst = t.forward({x + 0.5, y + 0.5});
      out.at(x, y) = std::clamp(square.bilinear(dst.x, dst.y), 0.0f, 1.0f);
    }
  }
  return out;
}

}  // namespace psv
