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
#include <fstream>
#include <sstream>

#include "json.hpp"

#include "psv/error.hpp"
#include "psv/scenario.hpp"

namespace psv {

using nlohmann::json;

namespace {

[[noreturn]] void field_error(const std::string& field, const std::string& why) {
  throw Error(ErrorCode::kParse, "field '" + field + "': " + why);
}

const json& require(const json& j, const char* key, const std::string& path) {
  if (!j.is_object()) field_error(path, "expected an object");
  const auto it = j.find(key);
  if (it == j.end()) field_error(path.empty() ? key : path + "." + key, "missing");
  return *it;
}

double number(const json& j, const std::string& path) {
  if (!j.is_number()) field_error(path, "expected a number");
  return j.get<double>();
}

double number_or(const json& j, const char* key, double fallback, const std::string& path) {
  const auto it = j.find(key);
  return it == j.end() ? fallback : number(*it, path + "." + key);
}

int integer(const json& j, const std::string& path) {
  if (!j.is_number_integer()) field_error(path, "expected an integer");
  return j.get<int>();
}

std::vector<Vec2> points(const json& j, const std::string& path) {
  if (!j.is_array()) field_error(path, "expected an array of [x, y] pairs");
  std::vector<Vec2> out;
  out.reserve(j.size());
  for (std::size_t i = 0; i < j.size(); ++i) {
    const auto& p = j[i];
    const std::string pp = path + "[" + std::to_string(i) + "]";
    if (!p.is_array() || p.size() != 2) field_error(pp, "expected [x, y]");
    out.push_back({number(p[0], pp + "[0]"), number(p[1], pp + "[1]")});
  }
  return out;
}

std::vector<int> ids(const json& j, const char* key, const std::string& path) {
  std::vector<int> out;
  const auto it = j.find(key);
  if (it == j.end()) return out;
  if (!it->is_array()) field_error(path + "." + key, "expected an array of lane ids");
  for (std::size_t i = 0; i < it->size(); ++i) {
    out.push_back(integer((*it)[i], path + "." + key + "[" + std::to_string(i) + "]"));
  }
  return out;
}

std::vector<double> per_point(const json& j, std::size_t n, const std::string& path) {
  if (j.is_number()) return std::vector<double>(n, j.get<double>());
  if (!j.is_array()) field_error(path, "expected a number or one number per point");
  std::vector<double> out;
  for (std::size_t i = 0; i < j.size(); ++i) out.push_back(number(j[i], path + "[" + std::to_string(i) + "]"));
  return out;
}

BoundaryClass boundary_class(const json& j, const std::string& path) {
  if (!j.is_string()) field_error(path, "expected one of dashed|solid|curb");
  const auto s = j.get<std::string>();
  if (s == "dashed") return BoundaryClass::kDashed;
  if (s == "solid") return BoundaryClass::kSolid;
  if (s == "curb") return BoundaryClass::kCurb;
  field_error(path, "unknown boundary class '" + s + "'");
}

const char* boundary_name(BoundaryClass c) {
  switch (c) {
    case BoundaryClass::kDashed: return "dashed";
    case BoundaryClass::kSolid: return "solid";
    case BoundaryClass::kCurb: return "curb";
  }
  return "dashed";
}

std::vector<Waypoint> waypoints(const json& j, const std::string& path) {
  if (!j.is_array()) field_error(path, "expected an array of [t, x, y, heading, velocity]");
  std::vector<Waypoint> out;
  for (std::size_t i = 0; i < j.size(); ++i) {
    const auto& w = j[i];
    const std::string wp = path + "[" + std::to_string(i) + "]";
    if (!w.is_array() || w.size() != 5) field_error(wp, "expected [t, x, y, heading, velocity]");
    out.push_back({number(w[0], wp), number(w[1], wp), number(w[2], wp), number(w[3], wp), number(w[4], wp)});
    if (i > 0 && !(out[i].t > out[i - 1].t)) field_error(wp, "waypoint times must increase");
  }
  return out;
}

json waypoints_json(const std::vector<Waypoint>& ws) {
  json out = json::array();
  for (const auto& w : ws) out.push_back({w.t, w.x, w.y, w.heading, w.velocity});
  return out;
}

json points_json(const std::vector<Vec2>& pts) {
  json out = json::array();
  for (const auto& p : pts) out.push_back({p.x, p.y});
  return out;
}

Scenario from_json(const json& root) {
  Scenario s;
  if (!root.is_object()) field_error("<root>", "expected an object");
  if (const auto it = root.find("id"); it != root.end()) {
    if (!it->is_string()) field_error("id", "expected a string");
    s.id = it->get<std::string>();
  }
  s.horizon = number_or(root, "horizon", 6.6, "");

  const auto& rg = require(root, "road_graph", "");
  s.road_graph.target_lane_id = integer(require(rg, "target_lane_id", "road_graph"), "road_graph.target_lane_id");
  s.road_graph.max_lateral_acceleration = number_or(rg, "max_lateral_acceleration", 2.0, "road_graph");
  const auto& cls = require(rg, "centerlines", "road_graph");
  if (!cls.is_array()) field_error("road_graph.centerlines", "expected an array");
  for (std::size_t i = 0; i < cls.size(); ++i) {
    const std::string path = "road_graph.centerlines[" + std::to_string(i) + "]";
    const auto& cj = cls[i];
    Centerline c;
    c.id = integer(require(cj, "id", path), path + ".id");
    c.points = points(require(cj, "points", path), path + ".points");
    c.speed_limit = per_point(require(cj, "speed_limit", path), c.points.size(), path + ".speed_limit");
    if (const auto it = cj.find("curvature_velocity"); it != cj.end()) {
      c.curvature_velocity = per_point(*it, c.points.size(), path + ".curvature_velocity");
    } else if (c.points.size() >= 2 && c.speed_limit.size() == c.points.size()) {
      c.curvature_velocity =
          curvature_velocity(c.points, c.speed_limit, s.road_graph.max_lateral_acceleration);
    }
    c.successors = ids(cj, "successors", path);
    c.neighbors = ids(cj, "neighbors", path);
    s.road_graph.centerlines.push_back(std::move(c));
  }
  if (const auto it = rg.find("boundaries"); it != rg.end()) {
    if (!it->is_array()) field_error("road_graph.boundaries", "expected an array");
    for (std::size_t i = 0; i < it->size(); ++i) {
      const std::string path = "road_graph.boundaries[" + std::to_string(i) + "]";
      const auto& bj = (*it)[i];
      s.road_graph.boundaries.push_back(
          {points(require(bj, "points", path), path + ".points"), boundary_class(require(bj, "class", path), path + ".class")});
    }
  }

  if (const auto it = root.find("objects"); it != root.end()) {
    if (!it->is_array()) field_error("objects", "expected an array");
    for (std::size_t i = 0; i < it->size(); ++i) {
      const std::string path = "objects[" + std::to_string(i) + "]";
      const auto& oj = (*it)[i];
      TrafficObject o;
      o.id = integer(require(oj, "id", path), path + ".id");
      o.position = {number(require(oj, "x", path), path + ".x"), number(require(oj, "y", path), path + ".y")};
      o.heading = number_or(oj, "heading", 0.0, path);
      o.extent = {number_or(oj, "length", 4.8, path), number_or(oj, "width", 1.9, path)};
      o.velocity = number_or(oj, "velocity", 0.0, path);
      o.acceleration = number_or(oj, "acceleration", 0.0, path);
      if (const auto st = oj.find("static"); st != oj.end()) {
        if (!st->is_boolean()) field_error(path + ".static", "expected a boolean");
        o.is_static = st->get<bool>();
      }
      s.objects.push_back(o);
    }
  }

  const auto& ej = require(root, "ego", "");
  s.ego.x = number(require(ej, "x", "ego"), "ego.x");
  s.ego.y = number(require(ej, "y", "ego"), "ego.y");
  s.ego.heading = number_or(ej, "heading", 0.0, "ego");
  s.ego.velocity = number_or(ej, "velocity", 0.0, "ego");
  s.ego.acceleration = number_or(ej, "acceleration", 0.0, "ego");
  s.ego.wheel_angle = number_or(ej, "wheel_angle", 0.0, "ego");
  s.ego.wheel_angle_rate = number_or(ej, "wheel_angle_rate", 0.0, "ego");
  s.ego_extent = {number_or(ej, "length", 4.8, "ego"), number_or(ej, "width", 1.9, "ego")};

  if (const auto it = root.find("stream"); it != root.end()) {
    StreamSpec st;
    st.duration = number(require(*it, "duration", "stream"), "stream.duration");
    if (const auto os = it->find("objects"); os != it->end()) {
      if (!os->is_object()) field_error("stream.objects", "expected an object keyed by object id");
      for (const auto& [key, value] : os->items()) {
        int id = 0;
        try {
          id = std::stoi(key);
        } catch (const std::exception&) {
          field_error("stream.objects." + key, "key must be an object id");
        }
        st.object_schedules[id] = waypoints(value, "stream.objects." + key);
      }
    }
    if (const auto es = it->find("ego"); es != it->end()) st.ego_schedule = waypoints(*es, "stream.ego");
    s.stream = std::move(st);
  }
  return s;
}

json to_json(const Scenario& s) {
  json root;
  root["id"] = s.id;
  root["horizon"] = s.horizon;
  json rg;
  rg["target_lane_id"] = s.road_graph.target_lane_id;
  rg["max_lateral_acceleration"] = s.road_graph.max_lateral_acceleration;
  rg["centerlines"] = json::array();
  for (const auto& c : s.road_graph.centerlines) {
    rg["centerlines"].push_back({{"id", c.id},
                                 {"points", points_json(c.points)},
                                 {"speed_limit", c.speed_limit},
                                 {"curvature_velocity", c.curvature_velocity},
                                 {"successors", c.successors},
                                 {"neighbors", c.neighbors}});
  }
  rg["boundaries"] = json::array();
  for (const auto& b : s.road_graph.boundaries) {
    rg["boundaries"].push_back({{"points", points_json(b.points)}, {"class", boundary_name(b.kind)}});
  }
  root["road_graph"] = std::move(rg);
  root["objects"] = json::array();
  for (const auto& o : s.objects) {
    root["objects"].push_back({{"id", o.id},
                               {"x", o.position.x},
                               {"y", o.position.y},
                               {"heading", o.heading},
                               {"length", o.extent.length},
                               {"width", o.extent.width},
                               {"velocity", o.velocity},
                               {"acceleration", o.acceleration},
                               {"static", o.is_static}});
  }
  root["ego"] = {{"x", s.ego.x},
                 {"y", s.ego.y},
                 {"heading", s.ego.heading},
                 {"velocity", s.ego.velocity},
                 {"acceleration", s.ego.acceleration},
                 {"wheel_angle", s.ego.wheel_angle},
                 {"wheel_angle_rate", s.ego.wheel_angle_rate},
                 {"length", s.ego_extent.length},
                 {"width", s.ego_extent.width}};
  if (s.stream) {
    json st;
    st["duration"] = s.stream->duration;
    st["objects"] = json::object();
    for (const auto& [id, ws] : s.stream->object_schedules) st["objects"][std::to_string(id)] = waypoints_json(ws);
    st["ego"] = waypoints_json(s.stream->ego_schedule);
    root["stream"] = std::move(st);
  }
  return root;
}

}  // namespace

Scenario parse_scenario(const std::string& text, const std::string& origin) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error& e) {
    std::size_t line = 1, col = 1;
    for (std::size_t i = 0; i + 1 < e.byte && i < text.size(); ++i) {
      if (text[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
    throw Error(ErrorCode::kParse, origin + ":" + std::to_string(line) + ":" + std::to_string(col) +
                                       ": syntax error: " + e.what());
  }
  Scenario s;
  try {
    s = from_json(root);
  } catch (const Error& e) {
    throw Error(e.code(), origin + ": " + e.what());
  }
  try {
    validate(s);
  } catch (const Error& e) {
    throw Error(e.code(), origin + ": " + e.what());
  }
  return s;
}

Scenario load_scenario(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIo, "cannot open scenario file " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  auto s = parse_scenario(buf.str(), path.string());
  if (s.id.empty()) s.id = path.stem().string();
  return s;
}

std::vector<Scenario> load_scenario_dir(const std::filesystem::path& dir, std::vector<std::string>* errors) {
  namespace fs = std::filesystem;
  if (!fs::is_directory(dir)) throw Error(ErrorCode::kIo, "scenario directory not found: " + dir.string());
  std::vector<fs::path> files;
  for (const auto& e : fs::directory_iterator(dir)) {
    if (e.is_regular_file() && e.path().extension() == ".json") files.push_back(e.path());
  }
  std::sort(files.begin(), files.end());
  std::vector<Scenario> out;
  for (const auto& f : files) {
    try {
      out.push_back(load_scenario(f));
    } catch (const std::exception& e) {
      if (!errors) throw;
      errors->push_back(f.filename().string() + ": " + e.what());
    }
  }
  return out;
}

std::string dump_scenario(const Scenario& scenario) { return to_json(scenario).dump(2); }

void save_scenario(const Scenario& scenario, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::kIo, "cannot write scenario file " + path.string());
  out << dump_scenario(scenario) << '\n';
  if (!out) throw Error(ErrorCode::kIo, "write failed for " + path.string());
}

}  // namespace psv
