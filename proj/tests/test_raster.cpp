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

#include <algorithm>
#include <cmath>
#include <random>

#include "doctest.h"
#include "psv/image.hpp"
#include "psv/input_renderer.hpp"
#include "psv/stack_io.hpp"
#include "psv/viewport.hpp"
#include "support.hpp"

using namespace psv;

namespace {

double segment_distance(Vec2 p, Vec2 a, Vec2 b) {
  const Vec2 d = b - a;
  const double len2 = d.x * d.x + d.y * d.y;
  double t = len2 > 0.0 ? ((p.x - a.x) * d.x + (p.y - a.y) * d.y) / len2 : 0.0;
  t = std::clamp(t, 0.0, 1.0);
  const Vec2 q = a + d * t;
  return std::hypot(p.x - q.x, p.y - q.y);
}

Scenario empty_scene(Vec2 ego) {
  Scenario s = test::straight_road();
  s.ego.x = ego.x;
  s.ego.y = ego.y;
  return s;
}

}  // namespace

TEST_CASE("bresenham stays within half a pixel of the ideal line") {
  std::mt19937 rng(7);
  std::uniform_int_distribution<int> coord(-40, 40);
  for (int trial = 0; trial < 500; ++trial) {
    const int x0 = coord(rng), y0 = coord(rng), x1 = coord(rng), y1 = coord(rng);
    std::vector<std::pair<int, int>> pts;
    bresenham(x0, y0, x1, y1, [&](int x, int y) { pts.emplace_back(x, y); });
    const int dx = std::abs(x1 - x0), dy = std::abs(y1 - y0);
    REQUIRE(pts.size() == static_cast<std::size_t>(std::max(dx, dy) + 1));
    CHECK(pts.front() == std::make_pair(x0, y0));
    CHECK(pts.back() == std::make_pair(x1, y1));
    for (std::size_t i = 1; i < pts.size(); ++i) {
      CHECK(std::abs(pts[i].first - pts[i - 1].first) <= 1);
      CHECK(std::abs(pts[i].second - pts[i - 1].second) <= 1);
    }
    for (const auto& [x, y] : pts) {
      if (dx >= dy && dx > 0) {
        const double ideal = y0 + static_cast<double>(y1 - y0) * (x - x0) / (x1 - x0);
        CHECK(std::abs(y - ideal) <= 0.5 + 1e-12);
      } else if (dy > 0) {
        const double ideal = x0 + static_cast<double>(x1 - x0) * (y - y0) / (y1 - y0);
        CHECK(std::abs(x - ideal) <= 0.5 + 1e-12);
      }
    }
  }
}

TEST_CASE("fill_convex sets exactly the pixels whose centres are inside") {
  Image img(10, 10);
  const std::vector<Vec2> rect{{2, 3}, {6, 3}, {6, 5}, {2, 5}};
  fill_convex(img, rect, 0.5f);
  int count = 0;
  for (int y = 0; y < 10; ++y) {
    for (int x = 0; x < 10; ++x) {
      const bool inside = x >= 2 && x <= 5 && y >= 3 && y <= 4;
      CHECK(img.at(x, y) == (inside ? 0.5f : 0.0f));
      count += img.at(x, y) > 0.0f;
    }
  }
  CHECK(count == 8);

  // Clockwise order and a triangle.
  Image tri(20, 20);
  const std::vector<Vec2> cw{{1, 1}, {1, 15}, {15, 1}};
  fill_convex(tri, cw, 1.0f);
  for (int y = 0; y < 20; ++y) {
    for (int x = 0; x < 20; ++x) {
      const double cx = x + 0.5, cy = y + 0.5;
      const double margin = std::min({cx - 1.0, cy - 1.0, (16.0 - cx - cy) / std::sqrt(2.0)});
      if (std::abs(margin) < 1e-9) continue;
      CHECK((tri.at(x, y) == 1.0f) == (margin > 0.0));
    }
  }
}

TEST_CASE("thick segments match a distance oracle") {
  std::mt19937 rng(3);
  std::uniform_real_distribution<double> u(-5.0, 45.0);
  for (int trial = 0; trial < 50; ++trial) {
    Image img(40, 40);
    const Vec2 a{u(rng), u(rng)}, b{u(rng), u(rng)};
    const double w = 1.0 + trial % 7;
    draw_thick_segment(img, a, b, w, 1.0f);
    for (int y = 0; y < 40; ++y) {
      for (int x = 0; x < 40; ++x) {
        const double d = segment_distance({x + 0.5, y + 0.5}, a, b);
        if (std::abs(d - 0.5 * w) < 1e-9) continue;
        CHECK((img.at(x, y) == 1.0f) == (d < 0.5 * w));
      }
    }
  }
}

TEST_CASE("bilinear sampling interpolates between pixel centres") {
  Image img(2, 1);
  img.at(0, 0) = 0.0f;
  img.at(1, 0) = 1.0f;
  CHECK(img.bilinear(0.5, 0.5) == doctest::Approx(0.0));
  CHECK(img.bilinear(1.5, 0.5) == doctest::Approx(1.0));
  CHECK(img.bilinear(1.0, 0.5) == doctest::Approx(0.5));
  CHECK(img.bilinear(-3.0, 0.5) == 0.0f);
}

TEST_CASE("16-bit PNG round trip is exact after quantisation") {
  test::TempDir dir("png");
  std::mt19937 rng(11);
  std::uniform_real_distribution<float> u(-0.2f, 1.2f);
  Image img(37, 23);
  for (auto& p : img.pixels()) p = u(rng);
  const auto path = dir.path() / "a.png";
  save_png16(img, path);
  const Image back = load_png16(path);
  REQUIRE(back.width() == 37);
  REQUIRE(back.height() == 23);
  for (int y = 0; y < 23; ++y) {
    for (int x = 0; x < 37; ++x) {
      CHECK(back.at(x, y) == dequantize16(quantize16(img.at(x, y))));
      CHECK(quantize16(back.at(x, y)) == quantize16(img.at(x, y)));
    }
  }
  CHECK(quantize16(0.1f) == 6554);
  CHECK(quantize16(1.0f) == 65535);
  CHECK(quantize16(-1.0f) == 0);

  save_png16(back, dir.path() / "b.png");
  CHECK(test::read_bytes(path) == test::read_bytes(dir.path() / "b.png"));

  CHECK(test::thrown_code([&] { load_png16(dir.path() / "missing.png"); }) == ErrorCode::kIo);
  std::ofstream(dir.path() / "junk.png") << "not a png";
  CHECK(test::thrown_code([&] { load_png16(dir.path() / "junk.png"); }) == ErrorCode::kIo);
}

TEST_CASE("viewport over a 200 m by 50 m point set is 4:1 at one megapixel") {
  const auto s = empty_scene({100.0, 25.0});
  const std::vector<Vec2> pts{{0, 0}, {200, 0}, {200, 50}, {0, 50}};
  ViewportConfig cfg;
  cfg.safety_margin = 0.0;
  const auto vp = fit_viewport(s, pts, cfg);
  CHECK(vp.width_px == 2000);
  CHECK(vp.height_px == 500);
  CHECK(vp.meters_per_pixel == doctest::Approx(0.1));
  for (const auto& p : pts) {
    const Vec2 px = vp.to_pixel(p);
    CHECK(px.x >= -1e-6);
    CHECK(px.y >= -1e-6);
    CHECK(px.x <= vp.width_px + 1e-6);
    CHECK(px.y <= vp.height_px + 1e-6);
  }
}

TEST_CASE("viewport contains the inflated reachable set within the pixel budget") {
  std::mt19937 rng(5);
  std::uniform_real_distribution<double> u(-80.0, 80.0);
  std::uniform_real_distribution<double> stretch(0.05, 3.0);
  for (int trial = 0; trial < 40; ++trial) {
    const double sx = stretch(rng), sy = stretch(rng);
    std::vector<Vec2> pts;
    for (int i = 0; i < 30; ++i) pts.push_back({u(rng) * sx, u(rng) * sy});
    const auto s = empty_scene(pts.front());
    const auto vp = fit_viewport(s, pts);
    const double pixels = static_cast<double>(vp.width_px) * vp.height_px;
    CHECK(pixels >= 0.95e6);
    CHECK(pixels <= 1.05e6);
    const double aspect = static_cast<double>(std::max(vp.width_px, vp.height_px)) / std::min(vp.width_px, vp.height_px);
    CHECK(aspect <= 4.0 + 0.01);
    for (const auto& p : pts) {
      for (int k = 0; k < 32; ++k) {
        const Vec2 q = p + unit(k * std::numbers::pi / 16.0) * 10.0;
        const Vec2 px = vp.to_pixel(q);
        CHECK(px.x >= -0.5);
        CHECK(px.y >= -0.5);
        CHECK(px.x <= vp.width_px + 0.5);
        CHECK(px.y <= vp.height_px + 0.5);
      }
    }
  }
}

TEST_CASE("small scenes fall back to a 100 m square") {
  const auto s = empty_scene({0.0, 0.0});
  const std::vector<Vec2> pts{{0, 0}, {5, 1}};
  const auto vp = fit_viewport(s, pts);
  CHECK(vp.width_px == 1000);
  CHECK(vp.height_px == 1000);
  CHECK(vp.meters_per_pixel == doctest::Approx(0.1));
  const Vec2 centre = vp.to_world({500.0, 500.0});
  CHECK(std::hypot(centre.x - 2.5, centre.y - 0.5) < 10.0);
}

TEST_CASE("viewport pixel and world transforms are inverse") {
  Viewport vp;
  vp.origin = {12.0, -4.0};
  vp.rotation = 0.7;
  vp.meters_per_pixel = 0.13;
  vp.width_px = 800;
  vp.height_px = 400;
  for (double x = -10; x < 60; x += 7.3) {
    const Vec2 w{x, x * 0.4 - 3.0};
    const Vec2 back = vp.to_world(vp.to_pixel(w));
    CHECK(back.x == doctest::Approx(w.x).epsilon(1e-12));
    CHECK(back.y == doctest::Approx(w.y).epsilon(1e-12));
  }
  int px = -1, py = -1;
  CHECK(vp.pixel_index(vp.to_world({10.25, 3.75}), px, py));
  CHECK(px == 10);
  CHECK(py == 3);
  CHECK_FALSE(vp.pixel_index(vp.to_world({-0.5, 3.0}), px, py));
}

TEST_CASE("square transform puts the raster on the diagonal") {
  Viewport vp;
  vp.width_px = 2000;
  vp.height_px = 500;
  const auto t = square_transform_for(vp);
  CHECK(t.rotation == doctest::Approx(std::numbers::pi / 4));
  CHECK(t.scale == doctest::Approx(512.0 * std::sqrt(2.0) / 2500.0));
  // Every source corner lands inside the square, the two diagonal extremes on its border.
  double lo = 1e9, hi = -1e9;
  for (const Vec2 c : {Vec2{0, 0}, Vec2{2000, 0}, Vec2{2000, 500}, Vec2{0, 500}}) {
    const Vec2 d = t.forward(c);
    lo = std::min({lo, d.x, d.y});
    hi = std::max({hi, d.x, d.y});
    const Vec2 back = t.inverse(d);
    CHECK(back.x == doctest::Approx(c.x));
    CHECK(back.y == doctest::Approx(c.y));
  }
  CHECK(lo == doctest::Approx(0.0).epsilon(1e-9));
  CHECK(hi == doctest::Approx(512.0));
  vp.width_px = 0;
  CHECK(test::thrown_code([&] { square_transform_for(vp); }) == ErrorCode::kInvalidArgument);
}

TEST_CASE("checkerboard survives the forward and inverse square resize") {
  Viewport vp;
  vp.width_px = 1000;
  vp.height_px = 1000;
  const auto t = square_transform_for(vp);
  constexpr int cell = 100;
  Image board(1000, 1000);
  for (int y = 0; y < 1000; ++y) {
    for (int x = 0; x < 1000; ++x) board.at(x, y) = ((x / cell + y / cell) % 2) ? 1.0f : 0.0f;
  }
  const Image sq = square_resize(board, t);
  CHECK(sq.width() == 512);
  const Image back = inverse_square_resize(sq, t);
  REQUIRE(back.width() == 1000);
  // Two bilinear passes blur edges by at most one square pixel on either side.
  const double blur = 2.0 / t.scale;
  int checked = 0;
  for (int y = 0; y < 1000; y += 3) {
    for (int x = 0; x < 1000; x += 3) {
      const double cx = x + 0.5, cy = y + 0.5;
      const double ex = std::min(std::fmod(cx, cell), cell - std::fmod(cx, cell));
      const double ey = std::min(std::fmod(cy, cell), cell - std::fmod(cy, cell));
      const bool edge_of_raster = std::min({cx, cy, 1000 - cx, 1000 - cy}) < blur;
      if (std::min(ex, ey) <= blur || edge_of_raster) continue;
      CHECK(back.at(x, y) == doctest::Approx(board.at(x, y)).epsilon(1e-5));
      ++checked;
    }
  }
  CHECK(checked > 50000);
  CHECK(test::thrown_code([&] { square_resize(Image(10, 10), t); }) == ErrorCode::kMismatch);
  CHECK(test::thrown_code([&] { inverse_square_resize(Image(10, 10), t); }) == ErrorCode::kMismatch);
}

TEST_CASE("direction encoding is relative to the ego heading") {
  CHECK(encode_direction(0.3, 0.3) == doctest::Approx(0.5));
  CHECK(encode_direction(0.3 + std::numbers::pi / 2, 0.3) == doctest::Approx(0.75));
  CHECK(encode_direction(0.3 - std::numbers::pi / 2, 0.3) == doctest::Approx(0.25));
  CHECK(encode_direction(0.3 + std::numbers::pi, 0.3) == doctest::Approx(1.0));
  CHECK(encode_direction(-2.0 * std::numbers::pi, 0.0) == doctest::Approx(0.5));
}

TEST_CASE("lane levels: target lane full, reachable lanes distinct, isolated lanes zero") {
  auto s = test::straight_road();
  Centerline far;
  far.id = 9;
  far.points = {{0.0, 100.0}, {50.0, 100.0}};
  far.speed_limit = {10.0, 10.0};
  far.curvature_velocity = {10.0, 10.0};
  s.road_graph.centerlines.push_back(far);
  const auto levels = lane_levels(s);
  REQUIRE(levels.size() == 3);
  CHECK(levels[0] == std::make_pair(1, 1.0f));
  CHECK(levels[1].first == 2);
  CHECK(levels[1].second == doctest::Approx(0.2 + 0.7 / 2.0));
  CHECK(levels[2] == std::make_pair(9, 0.0f));
}

TEST_CASE("input channels encode speed, direction, lanes and static structure") {
  auto s = test::straight_road(300.0, 12.0);
  s.ego.x = 0.0;
  s.ego.velocity = 6.0;
  s.objects.push_back(test::object_at(1, 60.0, 3.5, 0.0, true));
  Viewport vp;
  vp.origin = {-10.0, -20.0};
  vp.meters_per_pixel = 0.1;
  vp.width_px = 1000;
  vp.height_px = 400;
  const auto layers = render_input_layers(s, vp);

  auto px = [&](Vec2 w) {
    const Vec2 p = vp.to_pixel(w);
    return std::make_pair(static_cast<int>(p.x), static_cast<int>(p.y));
  };
  const auto [lx, ly] = px({40.0, 0.0});
  CHECK(layers[kVelocityChannel].at(lx, ly) == doctest::Approx(12.0 / 30.0));
  CHECK(layers[kDirectionChannel].at(lx, ly) == doctest::Approx(0.5));
  CHECK(layers[kLaneChannel].at(lx, ly) == doctest::Approx(1.0));
  const auto [nx, ny] = px({40.0, 3.5});
  CHECK(layers[kLaneChannel].at(nx, ny) == doctest::Approx(0.55));

  const auto [cx, cy] = px({40.0, -1.75});
  CHECK(layers[kStaticChannel].at(cx, cy) == doctest::Approx(1.0));
  const auto [dx, dy] = px({40.0, 1.75});
  CHECK(layers[kStaticChannel].at(dx, dy) == doctest::Approx(0.33));

  const auto [ox, oy] = px({60.0, 3.5});
  CHECK(layers[kStaticChannel].at(ox, oy) == 1.0f);
  CHECK(layers[kVelocityChannel].at(ox, oy) == 0.0f);
  CHECK(layers[kLaneChannel].at(ox, oy) == doctest::Approx(0.5));

  // Off-road pixels stay empty.
  const auto [fx, fy] = px({40.0, 15.0});
  for (const auto& l : layers) CHECK(l.at(fx, fy) == 0.0f);

  const auto stack = render_inputs(s, vp);
  for (const auto& c : stack.channels) {
    CHECK(c.width() == kSquareSize);
    CHECK(c.height() == kSquareSize);
  }
  CHECK(stack.square == square_transform_for(vp));
}

TEST_CASE("image stacks round trip through PNG and sidecar") {
  test::TempDir dir("stack");
  StackMeta meta;
  meta.kind = "input";
  meta.frame = Frame::kSquare;
  meta.viewport.origin = {1.0 / 3.0, -2.5};
  meta.viewport.rotation = 0.1234567890123;
  meta.viewport.meters_per_pixel = 0.1;
  meta.viewport.width_px = 20;
  meta.viewport.height_px = 10;
  meta.square = square_transform_for(meta.viewport, 16);
  meta.scenario_id = "abc";
  meta.timestamp = 1.4;
  meta.channel_names = {"a", "b"};
  std::vector<Image> ch(2, Image(16, 16));
  ch[0].at(3, 4) = 0.25f;
  ch[1].at(15, 15) = 1.0f;
  save_stack(dir.path() / "sub" / "x", ch, meta);
  CHECK(std::filesystem::exists(dir.path() / "sub" / "x_00.png"));
  CHECK(std::filesystem::exists(dir.path() / "sub" / "x_01.png"));

  for (const auto& p : {dir.path() / "sub" / "x", dir.path() / "sub" / "x.json"}) {
    const auto back = load_stack(p);
    CHECK(back.meta == meta);
    REQUIRE(back.channels.size() == 2);
    CHECK(back.channels[0].at(3, 4) == dequantize16(quantize16(0.25f)));
    CHECK(back.channels[1].at(15, 15) == 1.0f);
  }
  CHECK(test::thrown_code([&] { load_stack(dir.path() / "nothing"); }) == ErrorCode::kIo);
  std::ofstream(dir.path() / "bad.json") << "{\"kind\": 1}";
  CHECK(test::thrown_code([&] { load_stack(dir.path() / "bad"); }) == ErrorCode::kParse);
}
