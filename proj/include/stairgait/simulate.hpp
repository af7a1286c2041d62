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

// Hybrid open-loop simulation: integrate the pinned single-support dynamics
// under a replayed torque signal, watch the touchdown guard (swing foot
// reaches the next tread beyond the riser), and apply the impact map.

#ifndef STAIRGAIT_SIMULATE_HPP_
#define STAIRGAIT_SIMULATE_HPP_

#include <functional>
#include <vector>

#include "stairgait/dynamics.hpp"
#include "stairgait/gait.hpp"
#include "stairgait/integrate.hpp"
#include "stairgait/model.hpp"

namespace stairgait {

struct ImpactEvent {
  double time;
  State pre;
  State post;  // relabeled
};

struct HybridTrajectory {
  std::vector<double> times;
  std::vector<State> states;
  std::vector<Vec5> applied_forces;  // generalized force at each sample
  std::vector<ImpactEvent> events;

  const State& back_state() const { return states.back(); }
};

struct SimulateOptions {
  double rel_tol = 1e-10;
  double abs_tol = 1e-12;
  double horizon = -1.0;          // default: gait duration
  bool detect_impact = true;
  double event_time_tol = 1e-9;
  double x0_tol = 1e-6;           // allowed mismatch between x0 and gait start
};

namespace detail {

inline VecX pack(const State& s) {
  VecX y(10);
  y << s.q, s.qd;
  return y;
}

inline State unpack(const VecX& y) {
  State s;
  s.q = y.head<5>();
  s.qd = y.tail<5>();
  return s;
}

}  // namespace detail

// Core loop shared by the replay and test paths: the applied generalized
// force is an arbitrary function of time.
inline HybridTrajectory simulate_forced(
    const RobotModel& model, const std::function<Vec5(double)>& force, const State& x0,
    double t_end, const StairGeometry& stair, const SimulateOptions& opts,
    const RelabelMap& map = RelabelMap::standard()) {
  const auto rhs = [&](double t, const VecX& y) -> VecX {
    const State s = detail::unpack(y);
    const Mat55 M = mass_matrix(model, s.q);
    const Vec5 bias = inverse_dynamics(model, s.q, s.qd, Vec5::Zero());
    const Vec5 qdd = M.llt().solve(force(t) - bias);
    VecX dy(10);
    dy << s.qd, qdd;
    return dy;
  };

  // Touchdown guard: swing-foot clearance to the next tread, armed only once
  // the foot is horizontally past the riser. Positive while clear.
  std::function<double(double, const VecX&)> guard;
  if (opts.detect_impact) {
    guard = [&](double, const VecX& y) -> double {
      const State s = detail::unpack(y);
      const Vec2 p = swing_foot(model, s.q).position;
      if (p.x() <= stair.footprint_offset) return 1.0;
      return p.y() - stair.rise;
    };
  }

  IntegrateOptions iopts;
  iopts.rel_tol = opts.rel_tol;
  iopts.abs_tol = opts.abs_tol;
  iopts.event_time_tol = opts.event_time_tol;

  const IntegrationResult raw = integrate_adaptive(rhs, 0.0, detail::pack(x0), t_end, iopts, guard);

  HybridTrajectory traj;
  traj.times = raw.times;
  traj.states.reserve(raw.states.size());
  traj.applied_forces.reserve(raw.states.size());
  for (size_t i = 0; i < raw.states.size(); ++i) {
    traj.states.push_back(detail::unpack(raw.states[i]));
    traj.applied_forces.push_back(force(raw.times[i]));
  }

  if (raw.event_hit) {
    ImpactEvent ev;
    ev.time = raw.event_time;
    ev.pre = detail::unpack(raw.event_state);
    ev.post = impact_map(model, ev.pre, stair, map);
    traj.events.push_back(ev);
  }
  return traj;
}

// Open-loop replay: apply the torque history the gait demands (computed from
// the gait's own samples, not from the simulated state) and integrate the
// true dynamics from x0.
inline HybridTrajectory simulate_open_loop(const RobotModel& model, const PolynomialGait& gait,
                                           const State& x0, const StairGeometry& stair,
                                           const SimulateOptions& opts = {}) {
  gait.validate();
  const GaitSample s0 = gait.eval(0.0);
  if ((s0.q - x0.q).cwiseAbs().maxCoeff() > opts.x0_tol ||
      (s0.qd - x0.qd).cwiseAbs().maxCoeff() > opts.x0_tol) {
    throw std::invalid_argument("simulate_open_loop: x0 inconsistent with gait at t = 0");
  }

  const Mat54 B = InputMap::standard().B;
  const auto replay = [&, B](double t) -> Vec5 {
    const GaitSample g = gait.eval_extrapolated(t);
    const SplitTorques st = split_torques(model, g.q, g.qd, g.qdd);
    return B * st.u;
  };

  const double horizon = opts.horizon > 0.0 ? opts.horizon : gait.duration;
  return simulate_forced(model, replay, x0, horizon, stair, opts);
}

}  // namespace stairgait

#endif  // STAIRGAIT_SIMULATE_HPP_
