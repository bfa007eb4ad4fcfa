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

#include "psv/stack_io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "json.hpp"

#include "psv/error.hpp"

namespace psv {

using nlohmann::json;

namespace {

std::filesystem::path strip_sidecar(const std::filesystem::path& p) {
  if (p.extension() == ".json") return p.parent_path() / p.stem();
  return p;
}

std::string channel_file(const std::filesystem::path& prefix, std::size_t i) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "_%02zu.png", i);
  return prefix.filename().string() + buf;
}

}  // namespace

std::filesystem::path sidecar_path(const std::filesystem::path& prefix) {
  auto p = strip_sidecar(prefix);
  p += ".json";
  return p;
}

void save_stack(const std::filesystem::path& prefix_in, std::span<const Image> channels, const StackMeta& meta) {
  const auto prefix = strip_sidecar(prefix_in);
  if (prefix.has_parent_path()) std::filesystem::create_directories(prefix.parent_path());
  json files = json::array();
  for (std::size_t i = 0; i < channels.size(); ++i) {
    const auto name = channel_file(prefix, i);
    save_png16(channels[i], prefix.parent_path() / name);
    files.push_back(name);
  }
  const auto& vp = meta.viewport;
  const auto& sq = meta.square;
  json root{{"kind", meta.kind},
            {"frame", meta.frame == Frame::kSquare ? "square" : "viewport"},
            {"scenario_id", meta.scenario_id},
            {"timestamp", meta.timestamp},
            {"channels", meta.channel_names},
            {"files", files},
            {"viewport",
             {{"origin", {vp.origin.x, vp.origin.y}},
              {"rotation", vp.rotation},
              {"meters_per_pixel", vp.meters_per_pixel},
              {"width_px", vp.width_px},
              {"height_px", vp.height_px}}},
            {"square",
             {{"rotation", sq.rotation},
              {"scale", sq.scale},
              {"src_width", sq.src_width},
              {"src_height", sq.src_height},
              {"size", sq.size}}}};
  std::ofstream out(sidecar_path(prefix));
  if (!out) throw Error(ErrorCode::kIo, "cannot write sidecar " + sidecar_path(prefix).string());
  out << root.dump(2) << '\n';
}

ImageStack load_stack(const std::filesystem::path& prefix_or_sidecar) {
  const auto prefix = strip_sidecar(prefix_or_sidecar);
  const auto sidecar = sidecar_path(prefix);
  std::ifstream in(sidecar);
  if (!in) throw Error(ErrorCode::kIo, "missing sidecar " + sidecar.string());
  std::stringstream buf;
  buf << in.rdbuf();
  ImageStack stack;
  try {
    const json root = json::parse(buf.str());
    auto& m = stack.meta;
    m.kind = root.at("kind").get<std::string>();
    const auto frame = root.at("frame").get<std::string>();
    if (frame != "square" && frame != "viewport") throw Error(ErrorCode::kParse, sidecar.string() + ": unknown frame " + frame);
    m.frame = frame == "square" ? Frame::kSquare : Frame::kViewport;
    m.scenario_id = root.value("scenario_id", std::string{});
    m.timestamp = root.value("timestamp", 0.0);
    m.channel_names = root.value("channels", std::vector<std::string>{});
    const auto& vp = root.at("viewport");
    m.viewport.origin = {vp.at("origin").at(0).get<double>(), vp.at("origin").at(1).get<double>()};
    m.viewport.rotation = vp.at("rotation").get<double>();
    m.viewport.meters_per_pixel = vp.at("meters_per_pixel").get<double>();
    m.viewport.width_px = vp.at("width_px").get<int>();
    m.viewport.height_px = vp.at("height_px").get<int>();
    const auto& sq = root.at("square");
    m.square.rotation = sq.at("rotation").get<double>();
    m.square.scale = sq.at("scale").get<double>();
    m.square.src_width = sq.at("src_width").get<int>();
    m.square.src_height = sq.at("src_height").get<int>();
    m.square.size = sq.at("size").get<int>();
    for (const auto& f : root.at("files")) {
      stack.channels.push_back(load_png16(prefix.parent_path() / f.get<std::string>()));
    }
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kParse, sidecar.string() + ": " + e.what());
  }
  return stack;
}

}  // namespace psv
