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

#include "psv/image.hpp"

#include <png.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <memory>
#include <string>

#include "psv/error.hpp"

namespace psv {

float Image::bilinear(double px, double py) const {
  const double fx = px - 0.5;
  const double fy = py - 0.5;
  const int x0 = static_cast<int>(std::floor(fx));
  const int y0 = static_cast<int>(std::floor(fy));
  const double ax = fx - x0;
  const double ay = fy - y0;
  const double v = (1.0 - ax) * (1.0 - ay) * get(x0, y0) + ax * (1.0 - ay) * get(x0 + 1, y0) +
                   (1.0 - ax) * ay * get(x0, y0 + 1) + ax * ay * get(x0 + 1, y0 + 1);
  return static_cast<float>(v);
}

std::uint16_t quantize16(float v) {
  const double c = std::clamp(static_cast<double>(v), 0.0, 1.0);
  return static_cast<std::uint16_t>(std::lround(c * 65535.0));
}

namespace {

struct FileCloser {
  void operator()(std::FILE* f) const {
    if (f) std::fclose(f);
  }
};
using File = std::unique_ptr<std::FILE, FileCloser>;

// libpng prints to stderr by default; keep the message for the exception instead.
void on_png_error(png_structp png, png_const_charp message) {
  if (auto* out = static_cast<std::string*>(png_get_error_ptr(png))) *out = message;
  png_longjmp(png, 1);
}

void on_png_warning(png_structp, png_const_charp) {}

}  // namespace

void save_png16(const Image& image, const std::filesystem::path& path) {
  File fp(std::fopen(path.c_str(), "wb"));
  if (!fp) throw Error(ErrorCode::kIo, "cannot open " + path.string() + " for writing");
  std::string message;
  png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, &message, on_png_error, on_png_warning);
  png_infop info = png ? png_create_info_struct(png) : nullptr;
  if (!png || !info) {
    png_destroy_write_struct(&png, &info);
    throw Error(ErrorCode::kIo, "libpng initialisation failed");
  }
  std::vector<png_byte> row(static_cast<std::size_t>(image.width()) * 2);
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_write_struct(&png, &info);
    throw Error(ErrorCode::kIo, "failed writing " + path.string() + ": " + message);
  }
  png_init_io(png, fp.get());
  png_set_compression_level(png, 3);
  png_set_IHDR(png, info, image.width(), image.height(), 16, PNG_COLOR_TYPE_GRAY, PNG_INTERLACE_NONE,
               PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
  png_write_info(png, info);
  for (int y = 0; y < image.height(); ++y) {
    for (int x = 0; x < image.width(); ++x) {
      const std::uint16_t q = quantize16(image.at(x, y));
      row[2 * x] = static_cast<png_byte>(q >> 8);
      row[2 * x + 1] = static_cast<png_byte>(q & 0xff);
    }
    png_write_row(png, row.data());
  }
  png_write_end(png, nullptr);
  png_destroy_write_struct(&png, &info);
}

Image load_png16(const std::filesystem::path& path) {
  File fp(std::fopen(path.c_str(), "rb"));
  if (!fp) throw Error(ErrorCode::kIo, "cannot open " + path.string());
  std::string message;
  png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, &message, on_png_error, on_png_warning);
  png_infop info = png ? png_create_info_struct(png) : nullptr;
  if (!png || !info) {
    png_destroy_read_struct(&png, &info, nullptr);
    throw Error(ErrorCode::kIo, "libpng initialisation failed");
  }
  Image image;
  std::vector<png_byte> row;
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_read_struct(&png, &info, nullptr);
    throw Error(ErrorCode::kIo, "failed reading " + path.string() + ": " + message);
  }
  png_init_io(png, fp.get());
  png_read_info(png, info);
  const auto width = static_cast<int>(png_get_image_width(png, info));
  const auto height = static_cast<int>(png_get_image_height(png, info));
  const int depth = png_get_bit_depth(png, info);
  const int color = png_get_color_type(png, info);
  if (color != PNG_COLOR_TYPE_GRAY || depth != 16) {
    png_destroy_read_struct(&png, &info, nullptr);
    throw Error(ErrorCode::kIo, path.string() + ": expected a 16-bit grayscale PNG");
  }
  image = Image(width, height);
  row.resize(static_cast<std::size_t>(width) * 2);
  for (int y = 0; y < height; ++y) {
    png_read_row(png, row.data(), nullptr);
    for (int x = 0; x < width; ++x) {
      const auto q = static_cast<std::uint16_t>((row[2 * x] << 8) | row[2 * x + 1]);
      image.at(x, y) = dequantize16(q);
    }
  }
  png_read_end(png, nullptr);
  png_destroy_read_struct(&png, &info, nullptr);
  return image;
}

void fill_convex(Image& image, std::span<const Vec2> polygon, float value) {
  if (polygon.size() < 3) return;
  double min_x = polygon[0].x, max_x = min_x, min_y = polygon[0].y, max_y = min_y;
  for (const auto& p : polygon) {
    min_x = std::min(min_x, p.x);
    max_x = std::max(max_x, p.x);
    min_y = std::min(min_y, p.y);
    max_y = std::max(max_y, p.y);
  }
  // Orientation-independent inside test.
  double area = 0.0;
  for (std::size_t i = 0; i < polygon.size(); ++i) area += cross(polygon[i], polygon[(i + 1) % polygon.size()]);
  const double sign = area >= 0.0 ? 1.0 : -1.0;
  const int x0 = std::max(0, static_cast<int>(std::floor(min_x)));
  const int x1 = std::min(image.width() - 1, static_cast<int>(std::ceil(max_x)));
  const int y0 = std::max(0, static_cast<int>(std::floor(min_y)));
  const int y1 = std::min(image.height() - 1, static_cast<int>(std::ceil(max_y)));
  for (int y = y0; y <= y1; ++y) {
    for (int x = x0; x <= x1; ++x) {
      const Vec2 c{x + 0.5, y + 0.5};
      bool inside = true;
      for (std::size_t i = 0; i < polygon.size() && inside; ++i) {
        const Vec2 a = polygon[i];
        const Vec2 b = polygon[(i + 1) % polygon.size()];
        inside = sign * cross(b - a, c - a) >= 0.0;
      }
      if (inside) image.at(x, y) = value;
    }
  }
}

void draw_thick_segment(Image& image, const Vec2& a, const Vec2& b, double width, float value) {
  const double r = 0.5 * width;
  const int x0 = std::max(0, static_cast<int>(std::floor(std::min(a.x, b.x) - r)));
  const int x1 = std::min(image.width() - 1, static_cast<int>(std::ceil(std::max(a.x, b.x) + r)));
  const int y0 = std::max(0, static_cast<int>(std::floor(std::min(a.y, b.y) - r)));
  const int y1 = std::min(image.height() - 1, static_cast<int>(std::ceil(std::max(a.y, b.y) + r)));
  const Vec2 d = b - a;
  const double len2 = d.squared_norm();
  for (int y = y0; y <= y1; ++y) {
    for (int x = x0; x <= x1; ++x) {
      const Vec2 c{x + 0.5, y + 0.5};
      const double u = len2 > 0.0 ? std::clamp(dot(c - a, d) / len2, 0.0, 1.0) : 0.0;
      if ((c - (a + d * u)).squared_norm() <= r * r) image.at(x, y) = value;
    }
  }
}

void draw_outline(Image& image, std::span<const Vec2> polygon, double thickness, float value) {
  for (std::size_t i = 0; i < polygon.size(); ++i) {
    draw_thick_segment(image, polygon[i], polygon[(i + 1) % polygon.size()], thickness, value);
  }
}

}  // namespace psv
