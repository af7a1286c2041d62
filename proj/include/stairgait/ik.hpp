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

// Inverse kinematics helpers: leg IK and regeneration of step boundary
// configurations from stair geometry.

#ifndef STAIRGAIT_IK_HPP_
#define STAIRGAIT_IK_HPP_

#include <cmath>
#include <stdexcept>

#include "stairgait/linalg.hpp"
#include "stairgait/model.hpp"

namespace stairgait {

// Knee point for a two-link leg from `hip` to `foot`, lengths la (hip side)
// and lb (foot side). Picks the branch with the knee ahead (+x), the
// human-like bend for travel toward +x.
inline Vec2 two_link_knee(const Vec2& hip, const Vec2& foot, double la, double lb) {
  const Vec2 d = foot - hip;
  const double dist = d.norm();
  if (!(dist < la + lb - 1e-9) || !(dist > std::abs(la - lb) + 1e-12)) {
    throw std::invalid_argument("two_link_knee: target out of reach");
  }
  const double a = (la * la - lb * lb + dist * dist) / (2.0 * dist);
  const double h = std::sqrt(std::max(la * la - a * a, 0.0));
  const Vec2 dn = d / dist;
  const Vec2 perp(-dn.y(), dn.x());
  const Vec2 k1 = hip + a * dn + h * perp;
  const Vec2 k2 = hip + a * dn - h * perp;
  return (k1.x() >= k2.x()) ? k1 : k2;
}

namespace detail {

// Absolute angle (CCW from vertical) of a link whose axis points "up" along
// unit vector u, i.e. the inverse of link_dir().
inline double angle_from_up(const Vec2& u) { return std::atan2(-u.x(), u.y()); }

}  // namespace detail

// Configuration with the stance foot at the origin, hip at `hip`, torso at
// absolute angle `lean`, and the swing foot at `swing_target`.
inline Configuration configuration_from_targets(const RobotModel& model, double lean,
                                                const Vec2& hip, const Vec2& swing_target) {
  const auto& L = model.links;
  const Vec2 stance_knee = two_link_knee(hip, Vec2::Zero(), L[1].length, L[0].length);
  const double phi_thigh = detail::angle_from_up((hip - stance_knee) / L[1].length);
  const double phi_shin = detail::angle_from_up(stance_knee / L[0].length);

  const Vec2 swing_knee = two_link_knee(hip, swing_target, L[3].length, L[4].length);
  // Swing links run downward from the hip; their "up" axis points back to it.
  const double phi_sw_thigh = detail::angle_from_up((hip - swing_knee) / L[3].length);
  const double phi_sw_shin = detail::angle_from_up((swing_knee - swing_target) / L[4].length);

  Configuration q;
  q << lean, phi_thigh - lean, phi_shin - phi_thigh, phi_sw_thigh - lean,
      phi_sw_shin - phi_sw_thigh;
  return q;
}

// Hip/lean targets describing the step's start and end poses. The defaults
// scale with the stair rise and were tuned so the resulting boundary data
// leaves wide margins against the torque, velocity and friction limits.
struct BoundaryPose {
  double lean_init;
  double lean_final;
  Vec2 hip_init;
  Vec2 hip_final;

  static BoundaryPose defaults(const StairGeometry& stair) {
    BoundaryPose p;
    p.lean_init = p.lean_final = -0.10 - 0.25 * stair.rise;
    p.hip_init = Vec2(0.0, 0.64 + 0.1 * stair.rise);
    p.hip_final = Vec2(0.18 + 0.1 * stair.rise, 0.61 + 0.55 * stair.rise);
    return p;
  }
};

struct BoundaryConfigurations {
  Configuration q_init;
  Configuration q_final;
};

// Regenerate step boundary configurations for the given stairs: the swing
// foot starts beside the stance foot on the current tread and lands one
// tread ahead, so its displacement over the step is exactly (run, rise).
inline BoundaryConfigurations regenerate_boundary(const RobotModel& model,
                                                  const StairGeometry& stair,
                                                  const BoundaryPose& pose) {
  BoundaryConfigurations bc;
  bc.q_init = configuration_from_targets(model, pose.lean_init, pose.hip_init, Vec2::Zero());
  bc.q_final = configuration_from_targets(model, pose.lean_final, pose.hip_final,
                                          Vec2(stair.run, stair.rise));
  return bc;
}

inline BoundaryConfigurations regenerate_boundary(const RobotModel& model,
                                                  const StairGeometry& stair) {
  return regenerate_boundary(model, stair, BoundaryPose::defaults(stair));
}

}  // namespace stairgait

#endif  // STAIRGAIT_IK_HPP_
