// Copyright 2026 The stairgait Authors
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

// Run configuration: robot, stair, boundary, limits, grid and solver settings
// with JSON load/save. The default configuration is the reference scenario
// (Rabbit parameters, 20 cm rise, 40 cm run, 0.5 s steps).

#ifndef STAIRGAIT_CONFIG_HPP_
#define STAIRGAIT_CONFIG_HPP_

#include <cstdint>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>

#include <json.hpp>

#include "stairgait/constraints.hpp"
#include "stairgait/gait.hpp"
#include "stairgait/ik.hpp"
#include "stairgait/model.hpp"
#include "stairgait/optimizer.hpp"

namespace stairgait {

struct ParseError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct BoundaryConfig {
  Configuration q_init;
  Configuration q_final;
  double duration = 0.5;
  // When the stated boundary data fails the geometric consistency check,
  // regenerate it by inverse kinematics instead of aborting.
  bool regenerate_on_mismatch = true;
  std::optional<BoundaryPose> pose;  // absent: pose scaled from the stair

  BoundaryConditions conditions() const { return {q_init, q_final, duration}; }
};

struct OptimizerConfig {
  SQPOptions sqp;
  double perturbation = 0.5;  // multi-start seed spread
};

struct RunConfig {
  RobotModel robot;
  StairGeometry stair;
  BoundaryConfig boundary;
  Limits limits;
  GridSpec grid;
  OptimizerConfig optimizer;
  std::uint64_t seed = 0;
  int multistart = 3;

  void validate() const {
    robot.validate();
    double reach = 0.0;
    for (const auto& lk : robot.links) reach += lk.length;
    stair.validate(reach);
    boundary.conditions().validate();
    limits.validate();
    grid.validate();
    if (multistart < 1) throw std::invalid_argument("RunConfig: multistart must be >= 1");
  }
};

// Reference scenario: Rabbit robot, 20 cm x 40 cm stairs, 0.5 s per step,
// published boundary angles (regenerated automatically when they fail the
// geometric check under this convention).
inline RunConfig default_run_config() {
  RunConfig c;
  c.robot = rabbit_model();
  c.stair = StairGeometry::make(0.2, 0.4);
  c.boundary.q_init << 0.2618, 1.3140, -1.2267, -0.0219, 0.0;
  c.boundary.q_final << 0.1964, 0.0, 0.0219, 1.2267, 1.3140;
  c.boundary.duration = 0.5;
  return c;
}

namespace detail {

using nlohmann::json;

inline const json& at(const json& j, const char* key, const char* section) {
  const auto it = j.find(key);
  if (it == j.end()) {
    throw ParseError(std::string("missing field '") + key + "' in " + section);
  }
  return *it;
}

template <typename T>
T get(const json& j, const char* key, const char* section, const T& fallback) {
  const auto it = j.find(key);
  return it == j.end() ? fallback : it->template get<T>();
}

inline Vec5 vec5_from(const json& j, const char* key, const char* section) {
  const json& a = at(j, key, section);
  if (!a.is_array() || a.size() != 5) {
    throw ParseError(std::string("field '") + key + "' in " + section +
                     " must be an array of 5 numbers");
  }
  Vec5 v;
  for (int i = 0; i < 5; ++i) v[i] = a[i].get<double>();
  return v;
}

inline json to_json(const Vec5& v) { return json{v[0], v[1], v[2], v[3], v[4]}; }

}  // namespace detail

inline nlohmann::json to_json(const RunConfig& c) {
  using nlohmann::json;
  json robot;
  json links = json::array();
  for (const auto& lk : c.robot.links) {
    links.push_back({{"mass", lk.mass},
                     {"inertia_about_com", lk.inertia_about_com},
                     {"length", lk.length},
                     {"com_offset", lk.com_offset}});
  }
  robot["links"] = links;
  robot["gravity"] = c.robot.gravity;

  json boundary = {{"q_init", detail::to_json(c.boundary.q_init)},
                   {"q_final", detail::to_json(c.boundary.q_final)},
                   {"duration", c.boundary.duration},
                   {"regenerate_on_mismatch", c.boundary.regenerate_on_mismatch}};
  if (c.boundary.pose) {
    boundary["pose"] = {{"lean_init", c.boundary.pose->lean_init},
                        {"lean_final", c.boundary.pose->lean_final},
                        {"hip_init", {c.boundary.pose->hip_init.x(), c.boundary.pose->hip_init.y()}},
                        {"hip_final", {c.boundary.pose->hip_final.x(), c.boundary.pose->hip_final.y()}}};
  }

  return json{
      {"robot", robot},
      {"stair",
       {{"rise", c.stair.rise}, {"run", c.stair.run}, {"footprint_offset", c.stair.footprint_offset}}},
      {"boundary", boundary},
      {"limits",
       {{"torque_max", c.limits.torque_max},
        {"velocity_max", c.limits.velocity_max},
        {"friction_max", c.limits.friction_max},
        {"vertical_force_min", c.limits.vertical_force_min},
        {"knee_range", {c.limits.knee_min, c.limits.knee_max}},
        {"clearance_min", c.limits.clearance_min}}},
      {"grid", {{"n_ineq", c.grid.n_ineq}, {"n_zd", c.grid.n_zd}, {"n_quad", c.grid.n_quad}}},
      {"optimizer",
       {{"max_iterations", c.optimizer.sqp.max_iterations},
        {"kkt_tolerance", c.optimizer.sqp.kkt_tolerance},
        {"constraint_tolerance", c.optimizer.sqp.constraint_tolerance},
        {"fd_step", c.optimizer.sqp.fd_step},
        {"merit_penalty_growth", c.optimizer.sqp.merit_penalty_growth},
        {"armijo_constant", c.optimizer.sqp.armijo_constant},
        {"backtrack_ratio", c.optimizer.sqp.backtrack_ratio},
        {"perturbation", c.optimizer.perturbation}}},
      {"seed", c.seed},
      {"multistart", c.multistart}};
}

inline RunConfig config_from_json(const nlohmann::json& j) {
  using detail::at;
  using detail::get;
  RunConfig c = default_run_config();

  if (j.contains("robot")) {
    const auto& r = j["robot"];
    const auto& links = at(r, "links", "robot");
    if (!links.is_array() || links.size() != 5) {
      throw ParseError("robot.links must be an array of 5 link entries");
    }
    for (int i = 0; i < 5; ++i) {
      const auto& lk = links[i];
      c.robot.links[i].mass = at(lk, "mass", "robot.links").get<double>();
      c.robot.links[i].inertia_about_com =
          at(lk, "inertia_about_com", "robot.links").get<double>();
      c.robot.links[i].length = at(lk, "length", "robot.links").get<double>();
      c.robot.links[i].com_offset = at(lk, "com_offset", "robot.links").get<double>();
    }
    c.robot.gravity = get(r, "gravity", "robot", c.robot.gravity);
  }
  if (j.contains("stair")) {
    const auto& s = j["stair"];
    c.stair.rise = at(s, "rise", "stair").get<double>();
    c.stair.run = at(s, "run", "stair").get<double>();
    c.stair.footprint_offset = get(s, "footprint_offset", "stair", c.stair.run / 2.0);
  }
  if (j.contains("boundary")) {
    const auto& b = j["boundary"];
    c.boundary.q_init = detail::vec5_from(b, "q_init", "boundary");
    c.boundary.q_final = detail::vec5_from(b, "q_final", "boundary");
    c.boundary.duration = at(b, "duration", "boundary").get<double>();
    c.boundary.regenerate_on_mismatch =
        get(b, "regenerate_on_mismatch", "boundary", c.boundary.regenerate_on_mismatch);
    if (b.contains("pose")) {
      const auto& p = b["pose"];
      BoundaryPose pose;
      pose.lean_init = at(p, "lean_init", "boundary.pose").get<double>();
      pose.lean_final = at(p, "lean_final", "boundary.pose").get<double>();
      const auto& hi = at(p, "hip_init", "boundary.pose");
      const auto& hf = at(p, "hip_final", "boundary.pose");
      pose.hip_init = Vec2(hi[0].get<double>(), hi[1].get<double>());
      pose.hip_final = Vec2(hf[0].get<double>(), hf[1].get<double>());
      c.boundary.pose = pose;
    }
  }
  if (j.contains("limits")) {
    const auto& l = j["limits"];
    c.limits.torque_max = get(l, "torque_max", "limits", c.limits.torque_max);
    c.limits.velocity_max = get(l, "velocity_max", "limits", c.limits.velocity_max);
    c.limits.friction_max = get(l, "friction_max", "limits", c.limits.friction_max);
    c.limits.vertical_force_min =
        get(l, "vertical_force_min", "limits", c.limits.vertical_force_min);
    c.limits.clearance_min = get(l, "clearance_min", "limits", c.limits.clearance_min);
    if (l.contains("knee_range")) {
      const auto& kr = l["knee_range"];
      if (!kr.is_array() || kr.size() != 2) {
        throw ParseError("limits.knee_range must be [min, max]");
      }
      c.limits.knee_min = kr[0].get<double>();
      c.limits.knee_max = kr[1].get<double>();
    }
  }
  if (j.contains("grid")) {
    const auto& g = j["grid"];
    c.grid.n_ineq = get(g, "n_ineq", "grid", c.grid.n_ineq);
    c.grid.n_zd = get(g, "n_zd", "grid", c.grid.n_zd);
    c.grid.n_quad = get(g, "n_quad", "grid", c.grid.n_quad);
  }
  if (j.contains("optimizer")) {
    const auto& o = j["optimizer"];
    auto& s = c.optimizer.sqp;
    s.max_iterations = get(o, "max_iterations", "optimizer", s.max_iterations);
    s.kkt_tolerance = get(o, "kkt_tolerance", "optimizer", s.kkt_tolerance);
    s.constraint_tolerance = get(o, "constraint_tolerance", "optimizer", s.constraint_tolerance);
    s.fd_step = get(o, "fd_step", "optimizer", s.fd_step);
    s.merit_penalty_growth = get(o, "merit_penalty_growth", "optimizer", s.merit_penalty_growth);
    s.armijo_constant = get(o, "armijo_constant", "optimizer", s.armijo_constant);
    s.backtrack_ratio = get(o, "backtrack_ratio", "optimizer", s.backtrack_ratio);
    c.optimizer.perturbation = get(o, "perturbation", "optimizer", c.optimizer.perturbation);
  }
  c.seed = get(j, "seed", "config", c.seed);
  c.multistart = get(j, "multistart", "config", c.multistart);

  c.validate();
  return c;
}

inline RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open config file: " + path);
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(std::string("config parse error: ") + e.what());
  }
  try {
    return config_from_json(j);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("config field error: ") + e.what());
  }
}

inline void save_config(const RunConfig& c, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write config file: " + path);
  out << to_json(c).dump(2) << "\n";
}

// FNV-1a over the canonical (key-sorted) JSON text; ties a gait file to the
// exact configuration that produced it.
inline std::string config_hash(const RunConfig& c) {
  const std::string text = to_json(c).dump();
  std::uint64_t h = 1469598103934665603ULL;
  for (const unsigned char ch : text) {
    h ^= ch;
    h *= 1099511628211ULL;
  }
  std::ostringstream os;
  os << std::hex << h;
  return os.str();
}

}  // namespace stairgait

#endif  // STAIRGAIT_CONFIG_HPP_
