// Copyright 2026 The socnav Authors
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

#include <filesystem>
#include <fstream>
#include <nlohmann/json.hpp>
#include <sstream>

#include "socnav/error.hpp"
#include "socnav/policy/trainer.hpp"

namespace socnav::policy {
namespace {

using json = nlohmann::ordered_json;

json config_json(const NetworkConfig& c) {
  json tasks = json::array();
  for (Task t : c.tasks) tasks.push_back(std::string(to_string(t)));
  return {{"rays", c.rays},
          {"visual_dim", c.visual_dim},
          {"pose_dim", c.pose_dim},
          {"belief_dim", c.belief_dim},
          {"action_embed_dim", c.action_embed_dim},
          {"sectors", c.sectors},
          {"horizon", c.horizon},
          {"tasks", tasks}};
}

NetworkConfig config_of(const json& j) {
  NetworkConfig c;
  for (const auto& [key, value] : j.items()) {
    if (key == "rays") c.rays = value.get<int>();
    else if (key == "visual_dim") c.visual_dim = value.get<int>();
    else if (key == "pose_dim") c.pose_dim = value.get<int>();
    else if (key == "belief_dim") c.belief_dim = value.get<int>();
    else if (key == "action_embed_dim") c.action_embed_dim = value.get<int>();
    else if (key == "sectors") c.sectors = value.get<int>();
    else if (key == "horizon") c.horizon = value.get<int>();
    else if (key == "tasks") {
      c.tasks.clear();
      for (const auto& t : value) c.tasks.push_back(task_from_string(t.get<std::string>()));
    } else {
      throw InputError("network config: unknown key '" + key + "'");
    }
  }
  c.validate();
  return c;
}

json vector_json(const Vector& v) {
  json a = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v[i]);
  return a;
}

Vector vector_of(const json& a) {
  Vector v(static_cast<Eigen::Index>(a.size()));
  for (std::size_t i = 0; i < a.size(); ++i) v[static_cast<Eigen::Index>(i)] = a[i].get<double>();
  return v;
}

}  // namespace

std::string network_config_to_json(const NetworkConfig& cfg) { return config_json(cfg).dump(); }

NetworkConfig network_config_from_json(std::string_view text) {
  try {
    return config_of(json::parse(text));
  } catch (const json::exception& e) {
    throw InputError(std::string("network config: ") + e.what());
  }
}

std::string checkpoint_to_json(const Checkpoint& ck) {
  const Network shape(ck.network);
  if (static_cast<std::size_t>(ck.params.size()) != shape.layout().total())
    throw InputError("checkpoint: parameter count does not match the network");
  json blocks = json::array();
  for (const Block& b : shape.layout().blocks()) {
    json values = json::array();
    for (std::size_t i = 0; i < b.size(); ++i)
      values.push_back(ck.params[static_cast<Eigen::Index>(b.offset + i)]);
    blocks.push_back({{"name", b.name}, {"rows", b.rows}, {"cols", b.cols}, {"values", values}});
  }
  json j;
  j["format"] = "socnav.checkpoint";
  j["version"] = 1;
  j["network"] = config_json(ck.network);
  j["observation"] = {{"rays", ck.observation.rays},
                      {"fov", ck.observation.fov},
                      {"range", ck.observation.range},
                      {"goal_scale", ck.observation.goal_scale}};
  j["blocks"] = blocks;
  j["optimizer"] = {{"step", ck.adam.step}, {"m", vector_json(ck.adam.m)}, {"v", vector_json(ck.adam.v)}};
  j["trainer"] = {{"updates", ck.updates}, {"seed", ck.seed}};
  return j.dump();
}

Checkpoint checkpoint_from_json(std::string_view text) {
  try {
    const json j = json::parse(text);
    if (j.at("format") != "socnav.checkpoint" || j.at("version") != 1)
      throw InputError("checkpoint: unsupported format or version");
    Checkpoint ck;
    ck.network = config_of(j.at("network"));
    const json& o = j.at("observation");
    ck.observation.rays = o.at("rays").get<int>();
    ck.observation.fov = o.at("fov").get<double>();
    ck.observation.range = o.at("range").get<double>();
    ck.observation.goal_scale = o.at("goal_scale").get<double>();
    ck.observation.validate();
    const Network shape(ck.network);
    const auto& expected = shape.layout().blocks();
    const json& blocks = j.at("blocks");
    if (blocks.size() != expected.size())
      throw InputError("checkpoint: expected " + std::to_string(expected.size()) + " blocks, found " +
                       std::to_string(blocks.size()));
    ck.params = Vector::Zero(static_cast<Eigen::Index>(shape.layout().total()));
    for (std::size_t i = 0; i < expected.size(); ++i) {
      const Block& e = expected[i];
      const json& b = blocks[i];
      if (b.at("name") != e.name || b.at("rows") != e.rows || b.at("cols") != e.cols)
        throw InputError("checkpoint: block " + std::to_string(i) + " should be " + e.name + " " +
                         std::to_string(e.rows) + "x" + std::to_string(e.cols));
      const json& values = b.at("values");
      if (values.size() != e.size()) throw InputError("checkpoint: wrong value count in " + e.name);
      for (std::size_t k = 0; k < e.size(); ++k)
        ck.params[static_cast<Eigen::Index>(e.offset + k)] = values[k].get<double>();
    }
    const json& opt = j.at("optimizer");
    ck.adam.step = opt.at("step").get<std::int64_t>();
    ck.adam.m = vector_of(opt.at("m"));
    ck.adam.v = vector_of(opt.at("v"));
    if (ck.adam.m.size() != 0 && ck.adam.m.size() != ck.params.size())
      throw InputError("checkpoint: optimizer state size mismatch");
    if (ck.adam.v.size() != ck.adam.m.size()) throw InputError("checkpoint: optimizer state size mismatch");
    ck.updates = j.at("trainer").at("updates").get<int>();
    ck.seed = j.at("trainer").at("seed").get<std::uint64_t>();
    return ck;
  } catch (const json::exception& e) {
    throw InputError(std::string("checkpoint: ") + e.what());
  }
}

void save_checkpoint(const std::string& path, const Checkpoint& ckpt) {
  const std::string text = checkpoint_to_json(ckpt);
  const std::filesystem::path target(path);
  std::filesystem::path tmp = target;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw InputError("cannot write checkpoint " + tmp.string());
    out << text << '\n';
    if (!out.flush()) throw InputError("cannot write checkpoint " + tmp.string());
  }
  std::filesystem::rename(tmp, target);
}

Checkpoint load_checkpoint(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open checkpoint " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return checkpoint_from_json(ss.str());
}

Network network_from(const Checkpoint& ckpt) {
  Network net(ckpt.network);
  net.params() = ckpt.params;
  return net;
}

}  // namespace socnav::policy
