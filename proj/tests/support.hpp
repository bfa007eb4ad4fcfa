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

#include <array>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "psv/error.hpp"
#include "psv/scenario.hpp"

namespace psv::test {

/// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    std::random_device rd;
    path_ = std::filesystem::temp_directory_path() / ("psv_" + tag + "_" + std::to_string(rd()));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
};

/// Code of the psv::Error thrown by `f`, empty if it returns normally.
template <typename F>
std::optional<ErrorCode> thrown_code(F&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  return std::nullopt;
}

inline std::string read_bytes(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

/// Dense Gaussian elimination with partial pivoting.
template <std::size_t N>
std::array<double, N> solve_dense(std::array<std::array<double, N>, N> a, std::array<double, N> b) {
  for (std::size_t c = 0; c < N; ++c) {
    std::size_t piv = c;
    for (std::size_t r = c + 1; r < N; ++r) {
      if (std::abs(a[r][c]) > std::abs(a[piv][c])) piv = r;
    }
    std::swap(a[c], a[piv]);
    std::swap(b[c], b[piv]);
    for (std::size_t r = c + 1; r < N; ++r) {
      const double f = a[r][c] / a[c][c];
      for (std::size_t k = c; k < N; ++k) a[r][k] -= f * a[c][k];
      b[r] -= f * b[c];
    }
  }
  std::array<double, N> x{};
  for (std::size_t i = N; i-- > 0;) {
    double s = b[i];
    for (std::size_t k = i + 1; k < N; ++k) s -= a[i][k] * x[k];
    x[i] = s / a[i][i];
  }
  return x;
}

/// Straight road along +x: lanes at y = 0 (id 1) and y = 3.5 (id 2), curbs outside, dashed divider.
inline Scenario straight_road(double length = 300.0, double speed_limit = 13.0) {
  Scenario s;
  s.id = "straight";
  for (int lane = 0; lane < 2; ++lane) {
    Centerline c;
    c.id = lane + 1;
    for (double x = -20.0; x <= length + 1e-9; x += 5.0) c.points.push_back({x, lane * 3.5});
    c.speed_limit.assign(c.points.size(), speed_limit);
    c.curvature_velocity.assign(c.points.size(), speed_limit);
    c.neighbors = {lane == 0 ? 2 : 1};
    s.road_graph.centerlines.push_back(c);
  }
  auto line = [&](double y) {
    std::vector<Vec2> pts;
    for (double x = -20.0; x <= length + 1e-9; x += 5.0) pts.push_back({x, y});
    return pts;
  };
  s.road_graph.boundaries.push_back({line(-1.75), BoundaryClass::kCurb});
  s.road_graph.boundaries.push_back({line(1.75), BoundaryClass::kDashed});
  s.road_graph.boundaries.push_back({line(5.25), BoundaryClass::kCurb});
  s.road_graph.target_lane_id = 1;
  s.ego.velocity = 8.0;
  return s;
}

inline TrafficObject object_at(int id, double x, double y, double velocity, bool is_static = false) {
  TrafficObject o;
  o.id = id;
  o.position = {x, y};
  o.velocity = velocity;
  o.is_static = is_static;
  return o;
}

}  // namespace psv::test
