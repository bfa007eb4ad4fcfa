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

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "psv/geometry.hpp"

namespace psv {

/// Single-channel float raster, row-major, (0, 0) is the first stored pixel.
class Image {
 public:
  Image() = default;
  Image(int width, int height, float fill = 0.0f)
      : width_(width), height_(height), data_(static_cast<std::size_t>(width) * height, fill) {}

  int width() const { return width_; }
  int height() const { return height_; }
  bool empty() const { return data_.empty(); }
  bool contains(int x, int y) const { return x >= 0 && y >= 0 && x < width_ && y < height_; }

  float& at(int x, int y) { return data_[static_cast<std::size_t>(y) * width_ + x]; }
  float at(int x, int y) const { return data_[static_cast<std::size_t>(y) * width_ + x]; }

  /// Zero outside the image.
  float get(int x, int y) const { return contains(x, y) ? at(x, y) : 0.0f; }
  void put_max(int x, int y, float v) {
    if (contains(x, y)) {
      float& p = at(x, y);
      if (v > p) p = v;
    }
  }
  void put(int x, int y, float v) {
    if (contains(x, y)) at(x, y) = v;
  }

  /// Bilinear sample at continuous pixel coordinates (pixel centers at integer + 0.5); zero outside.
  float bilinear(double px, double py) const;

  std::span<float> pixels() { return data_; }
  std::span<const float> pixels() const { return data_; }

  bool operator==(const Image&) const = default;

 private:
  int width_{0};
  int height_{0};
  std::vector<float> data_;
};

/// 16-bit grayscale PNG; stored value = round(clamp(pixel, 0, 1) * 65535).
void save_png16(const Image& image, const std::filesystem::path& path);
Image load_png16(const std::filesystem::path& path);

std::uint16_t quantize16(float v);
inline float dequantize16(std::uint16_t q) { return static_cast<float>(q) / 65535.0f; }

/// Integer line from (x0, y0) to (x1, y1) inclusive, both endpoints visited.
template <typename Visit>
void bresenham(int x0, int y0, int x1, int y1, Visit&& visit) {
  const int dx = x1 > x0 ? x1 - x0 : x0 - x1;
  const int dy = -(y1 > y0 ? y1 - y0 : y0 - y1);
  const int sx = x0 < x1 ? 1 : -1;
  const int sy = y0 < y1 ? 1 : -1;
  int err = dx + dy;
  for (;;) {
    visit(x0, y0);
    if (x0 == x1 && y0 == y1) break;
    const int e2 = 2 * err;
    if (e2 >= dy) {
      err += dy;
      x0 += sx;
    }
    if (e2 <= dx) {
      err += dx;
      y0 += sy;
    }
  }
}

/// Sets every pixel whose center lies inside the convex polygon (pixel coordinates).
void fill_convex(Image& image, std::span<const Vec2> polygon, float value);
/// Sets every pixel whose center lies within width/2 of the segment.
void draw_thick_segment(Image& image, const Vec2& a, const Vec2& b, double width, float value);
/// Closed polygon outline of the given thickness.
void draw_outline(Image& image, std::span<const Vec2> polygon, double thickness, float value);

}  // namespace psv
