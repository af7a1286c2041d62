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

// Planar five-link biped: parameters, coordinate conventions, forward
// kinematics, stair geometry and leg relabeling.
//
// Coordinate convention (all angles in radians, counter-clockwise positive,
// measured from the world vertical):
//   q1  absolute torso angle
//   q2  stance hip   (stance thigh relative to torso)
//   q3  stance knee  (stance shin relative to stance thigh)
//   q4  swing hip    (swing thigh relative to torso)
//   q5  swing knee   (swing shin relative to swing thigh)
//
// The stance foot is pinned at the origin. The zero configuration stacks all
// links vertically: stance shin and thigh point up to the hip, the torso
// continues upward, and the swing leg hangs back down so the swing foot
// coincides with the stance foot. Travel is toward +x; with CCW-positive
// angles a forward torso lean is a negative q1 and a human-like knee bend is
// a negative knee coordinate.

#ifndef STAIRGAIT_MODEL_HPP_
#define STAIRGAIT_MODEL_HPP_

#include <array>
#include <cmath>
#include <stdexcept>

#include "stairgait/linalg.hpp"

namespace stairgait {

struct LinkParams {
  double mass = 0.0;              // kg
  double inertia_about_com = 0.0; // kg m^2
  double length = 0.0;            // m
  double com_offset = 0.0;        // m, proximal joint -> center of mass

  void validate() const {
    if (!(mass > 0.0) || !(inertia_about_com > 0.0) || !(length > 0.0) ||
        !(com_offset > 0.0)) {
      throw std::invalid_argument("LinkParams: all fields must be positive");
    }
    if (com_offset > length) {
      throw std::invalid_argument("LinkParams: com_offset exceeds length");
    }
  }
};

// Chain order: stance shin, stance thigh, torso, swing thigh, swing shin.
// Leg links are proximal at the hip/knee nearest the torso, so a symmetric
// robot has links[0] == links[4] and links[1] == links[3].
struct RobotModel {
  std::array<LinkParams, 5> links;
  double gravity = 9.81;

  double total_mass() const {
    double s = 0.0;
    for (const auto& lk : links) s += lk.mass;
    return s;
  }

  void validate() const {
    for (const auto& lk : links) lk.validate();
    if (!(gravity >= 0.0)) {
      throw std::invalid_argument("RobotModel: gravity must be >= 0");
    }
  }
};

// Five-link testbed parameters (Rabbit robot).
inline RobotModel rabbit_model() {
  RobotModel m;
  m.links[0] = {3.2, 0.93, 0.4, 0.128};   // shin
  m.links[1] = {6.8, 1.08, 0.4, 0.163};   // thigh
  m.links[2] = {20.0, 2.22, 0.625, 0.2};  // torso
  m.links[3] = m.links[1];
  m.links[4] = m.links[0];
  return m;
}

using Configuration = Vec5;

struct State {
  Configuration q;
  Vec5 qd;
};

// Staircase profile. `rise` is signed (negative descends); the riser to the
// next tread sits `footprint_offset` ahead of the stance foot, so the default
// run/2 puts the stance foot mid-tread.
struct StairGeometry {
  double rise = 0.2;
  double run = 0.4;
  double footprint_offset = 0.2;

  static StairGeometry make(double rise, double run) {
    return StairGeometry{rise, run, run / 2.0};
  }

  void validate(double max_reach = 0.0) const {
    if (!(run > 0.0)) throw std::invalid_argument("StairGeometry: run must be > 0");
    if (max_reach > 0.0 && !(std::abs(rise) < max_reach)) {
      throw std::invalid_argument("StairGeometry: |rise| unreachable for leg length");
    }
  }
};

struct LinkPoses {
  // Stance foot, stance knee, hip (duplicated: stance side then swing side),
  // swing knee, swing foot.
  std::array<Vec2, 6> joint_positions;
  std::array<Vec2, 5> com_positions;
  Vec2 torso_tip;

  const Vec2& stance_foot() const { return joint_positions[0]; }
  const Vec2& hip() const { return joint_positions[2]; }
  const Vec2& swing_foot() const { return joint_positions[5]; }
};

namespace detail {

// Absolute link angles are affine in q: phi = kAngleMap * q, rows in chain
// order (stance shin, stance thigh, torso, swing thigh, swing shin).
inline const Mat55& angle_map() {
  static const Mat55 a = [] {
    Mat55 m;
    m << 1, 1, 1, 0, 0,
         1, 1, 0, 0, 0,
         1, 0, 0, 0, 0,
         1, 0, 0, 1, 0,
         1, 0, 0, 1, 1;
    return m;
  }();
  return a;
}

// Unit vector along a link at absolute angle phi, pointing away from the
// stance foot for leg links below the hip the sign is applied by the caller.
inline Vec2 link_dir(double phi) { return Vec2(-std::sin(phi), std::cos(phi)); }
inline Vec2 link_dir_deriv(double phi) { return Vec2(-std::cos(phi), -std::sin(phi)); }

// Coefficients k such that a chain point equals sum_j k[j] * link_dir(phi_j).
// Rows: per-link COM points. Separate vector: swing foot.
inline Mat55 com_coeffs(const RobotModel& m) {
  const auto& L = m.links;
  Mat55 k = Mat55::Zero();
  k(0, 0) = L[0].length - L[0].com_offset;
  k(1, 0) = L[0].length;
  k(1, 1) = L[1].length - L[1].com_offset;
  k(2, 0) = L[0].length;
  k(2, 1) = L[1].length;
  k(2, 2) = L[2].com_offset;
  k(3, 0) = L[0].length;
  k(3, 1) = L[1].length;
  k(3, 3) = -L[3].com_offset;
  k(4, 0) = L[0].length;
  k(4, 1) = L[1].length;
  k(4, 3) = -L[3].length;
  k(4, 4) = -L[4].com_offset;
  return k;
}

inline Vec5 swing_foot_coeffs(const RobotModel& m) {
  const auto& L = m.links;
  Vec5 k;
  k << L[0].length, L[1].length, 0.0, -L[3].length, -L[4].length;
  return k;
}

}  // namespace detail

inline LinkPoses forward_kinematics(const RobotModel& model, const Configuration& q) {
  const Vec5 phi = detail::angle_map() * q;
  const auto& L = model.links;

  LinkPoses out;
  const Vec2 foot = Vec2::Zero();
  const Vec2 knee = foot + L[0].length * detail::link_dir(phi[0]);
  const Vec2 hip = knee + L[1].length * detail::link_dir(phi[1]);
  const Vec2 swing_knee = hip - L[3].length * detail::link_dir(phi[3]);
  const Vec2 swing_foot = swing_knee - L[4].length * detail::link_dir(phi[4]);
  out.joint_positions = {foot, knee, hip, hip, swing_knee, swing_foot};
  out.torso_tip = hip + L[2].length * detail::link_dir(phi[2]);

  const Mat55 k = detail::com_coeffs(model);
  for (int i = 0; i < 5; ++i) {
    Vec2 c = Vec2::Zero();
    for (int j = 0; j < 5; ++j) c += k(i, j) * detail::link_dir(phi[j]);
    out.com_positions[i] = c;
  }
  return out;
}

struct SwingFoot {
  Vec2 position;
  Mat25 jacobian;  // d position / d q
};

inline SwingFoot swing_foot(const RobotModel& model, const Configuration& q) {
  const Mat55& A = detail::angle_map();
  const Vec5 phi = A * q;
  const Vec5 k = detail::swing_foot_coeffs(model);

  SwingFoot out;
  out.position.setZero();
  out.jacobian.setZero();
  for (int j = 0; j < 5; ++j) {
    out.position += k[j] * detail::link_dir(phi[j]);
    out.jacobian += k[j] * detail::link_dir_deriv(phi[j]) * A.row(j);
  }
  return out;
}

struct CenterOfMass {
  Vec2 position;
  double total_mass;
};

inline CenterOfMass com(const RobotModel& model, const Configuration& q) {
  const Vec5 phi = detail::angle_map() * q;
  const Mat55 k = detail::com_coeffs(model);
  Vec2 weighted = Vec2::Zero();
  double mtot = 0.0;
  for (int i = 0; i < 5; ++i) {
    const double mi = model.links[i].mass;
    mtot += mi;
    for (int j = 0; j < 5; ++j) weighted += mi * k(i, j) * detail::link_dir(phi[j]);
  }
  return {weighted / mtot, mtot};
}

// Leg exchange at touchdown: q+ = matrix * q- + q1_correction * e1, and
// velocities transform by the same linear map. The matrix must be a signed
// permutation.
struct RelabelMap {
  Mat55 matrix = Mat55::Identity();
  double q1_correction = 0.0;

  // Swap hips and knees between legs; q1 is an absolute angle and passes
  // through unchanged.
  static RelabelMap standard() {
    RelabelMap m;
    m.matrix.setZero();
    m.matrix(0, 0) = 1.0;
    m.matrix(1, 3) = 1.0;  // new stance hip <- old swing hip
    m.matrix(2, 4) = 1.0;  // new stance knee <- old swing knee
    m.matrix(3, 1) = 1.0;
    m.matrix(4, 2) = 1.0;
    return m;
  }

  static RelabelMap identity() { return RelabelMap{}; }

  void validate() const {
    for (int i = 0; i < 5; ++i) {
      int row_nonzero = 0;
      int col_nonzero = 0;
      for (int j = 0; j < 5; ++j) {
        const double rij = matrix(i, j);
        const double cji = matrix(j, i);
        if (rij != 0.0) {
          ++row_nonzero;
          if (std::abs(rij) != 1.0) {
            throw std::invalid_argument("RelabelMap: entries must be 0 or +/-1");
          }
        }
        if (cji != 0.0) ++col_nonzero;
      }
      if (row_nonzero != 1 || col_nonzero != 1) {
        throw std::invalid_argument("RelabelMap: matrix is not a signed permutation");
      }
    }
  }
};

inline State relabel(const State& s, const RelabelMap& map) {
  map.validate();
  State out;
  out.q = map.matrix * s.q;
  out.q[0] += map.q1_correction;
  out.qd = map.matrix * s.qd;
  return out;
}

// Height of the stair surface below horizontal position x. Treads ascend in
// the travel direction (+x) for positive rise and descend for negative rise;
// the riser to the next tread is at x = footprint_offset.
inline double stair_surface_height(const StairGeometry& stair, double x) {
  return stair.rise * std::ceil((x - stair.footprint_offset) / stair.run);
}

// Signed vertical distance from a point to the stair surface directly below
// it (positive above the surface).
inline double stair_clearance(const StairGeometry& stair, const Vec2& point) {
  return point.y() - stair_surface_height(stair, point.x());
}

}  // namespace stairgait

#endif  // STAIRGAIT_MODEL_HPP_
