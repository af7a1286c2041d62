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

// Rigid-body dynamics of the pinned single-support phase:
//
//   M(q) qdd + C(q, qd) qd + G(q) = B u
//
// with the stance foot modeled as a frictionless pin at the origin, plus the
// rigid plastic impact map on the 7-DOF extended model (joints + free stance
// foot) used at swing-foot touchdown.
//
// All quantities follow from the affine link-angle map phi = A q and the
// chain-point representation p = sum_j k_j * dir(phi_j), which gives closed
// forms for link Jacobians, their derivatives, and the energy functions.

#ifndef STAIRGAIT_DYNAMICS_HPP_
#define STAIRGAIT_DYNAMICS_HPP_

#include <cmath>
#include <stdexcept>

#include "stairgait/linalg.hpp"
#include "stairgait/model.hpp"

namespace stairgait {

struct DynamicsTerms {
  Mat55 mass_matrix;    // M(q)
  Vec5 bias;            // C(q,qd) qd + G(q)
  Vec5 gravity_vector;  // G(q)
};

// Actuation map: no torque on q1 (point foot, no ankle), direct drive on the
// four joints q2..q5.
struct InputMap {
  Mat54 B;

  static InputMap standard() {
    InputMap m;
    m.B.setZero();
    m.B.block<4, 4>(1, 0).setIdentity();
    return m;
  }

  void validate() const {
    Eigen::FullPivLU<MatX> lu(B);
    if (lu.rank() != 4) throw std::invalid_argument("InputMap: B must have column rank 4");
    int zero_rows = 0;
    for (int i = 0; i < 5; ++i) {
      if (B.row(i).cwiseAbs().maxCoeff() == 0.0) ++zero_rows;
    }
    if (zero_rows != 1) {
      throw std::invalid_argument("InputMap: exactly one unactuated row required");
    }
  }
};

struct ContactForces {
  double horizontal;  // F_h, N
  double vertical;    // F_v, N
};

// Friction coefficient required to support the given contact force.
inline double required_friction(const ContactForces& f) {
  return std::abs(f.horizontal) / f.vertical;
}

namespace detail {

struct LinkKinematics {
  Vec5 phi;
  Vec5 rates;                    // phi_dot = A qd
  std::array<Vec2, 5> dir;       // dir(phi_j)
  std::array<Vec2, 5> dir_grad;  // d dir / d phi
};

inline LinkKinematics link_kinematics(const Configuration& q, const Vec5& qd) {
  LinkKinematics k;
  const Mat55& A = angle_map();
  k.phi = A * q;
  k.rates = A * qd;
  for (int j = 0; j < 5; ++j) {
    k.dir[j] = link_dir(k.phi[j]);
    k.dir_grad[j] = link_dir_deriv(k.phi[j]);
  }
  return k;
}

// COM Jacobian of link i (2x5).
inline Mat25 com_jacobian(const Mat55& coeffs, const LinkKinematics& k, int i) {
  const Mat55& A = angle_map();
  Mat25 J = Mat25::Zero();
  for (int j = 0; j < 5; ++j) {
    if (coeffs(i, j) != 0.0) J += coeffs(i, j) * k.dir_grad[j] * A.row(j);
  }
  return J;
}

// COM acceleration of link i given joint accelerations (includes the
// centripetal dJ/dt * qd part).
inline Vec2 com_acceleration(const Mat55& coeffs, const LinkKinematics& k, int i,
                             const Vec5& racc) {
  Vec2 a = Vec2::Zero();
  for (int j = 0; j < 5; ++j) {
    if (coeffs(i, j) != 0.0) {
      a += coeffs(i, j) *
           (-k.dir[j] * k.rates[j] * k.rates[j] + k.dir_grad[j] * racc[j]);
    }
  }
  return a;
}

}  // namespace detail

inline Vec5 inverse_dynamics(const RobotModel& model, const Configuration& q,
                             const Vec5& qd, const Vec5& qdd) {
  const Mat55& A = detail::angle_map();
  const Mat55 coeffs = detail::com_coeffs(model);
  const auto k = detail::link_kinematics(q, qd);
  const Vec5 racc = A * qdd;

  Vec5 tau = Vec5::Zero();
  for (int i = 0; i < 5; ++i) {
    const auto& link = model.links[i];
    const Mat25 J = detail::com_jacobian(coeffs, k, i);
    const Vec2 a = detail::com_acceleration(coeffs, k, i, racc);
    tau += link.mass * (J.transpose() * a);
    tau += link.inertia_about_com * racc[i] * A.row(i).transpose();
    tau += link.mass * model.gravity * J.row(1).transpose();
  }
  return tau;
}

inline Mat55 mass_matrix(const RobotModel& model, const Configuration& q) {
  const Mat55& A = detail::angle_map();
  const Mat55 coeffs = detail::com_coeffs(model);
  const auto k = detail::link_kinematics(q, Vec5::Zero());

  Mat55 M = Mat55::Zero();
  for (int i = 0; i < 5; ++i) {
    const Mat25 J = detail::com_jacobian(coeffs, k, i);
    M += model.links[i].mass * J.transpose() * J;
    M += model.links[i].inertia_about_com * A.row(i).transpose() * A.row(i);
  }
  return M;
}

inline Vec5 gravity_vector(const RobotModel& model, const Configuration& q) {
  return inverse_dynamics(model, q, Vec5::Zero(), Vec5::Zero());
}

inline DynamicsTerms dynamics_terms(const RobotModel& model, const Configuration& q,
                                    const Vec5& qd) {
  DynamicsTerms t;
  t.mass_matrix = mass_matrix(model, q);
  t.gravity_vector = gravity_vector(model, q);
  t.bias = inverse_dynamics(model, q, qd, Vec5::Zero());
  return t;
}

inline Vec5 forward_dynamics(const RobotModel& model, const Configuration& q,
                             const Vec5& qd, const Vec4& u) {
  if (!q.allFinite() || !qd.allFinite() || !u.allFinite()) {
    throw std::runtime_error("forward_dynamics: non-finite input");
  }
  const Mat55 M = mass_matrix(model, q);
  const Vec5 bias = inverse_dynamics(model, q, qd, Vec5::Zero());
  const Vec5 rhs = InputMap::standard().B * u - bias;
  return M.llt().solve(rhs);
}

struct SplitTorques {
  Vec4 u;        // actuated joint torques (q2..q5)
  double tau_v;  // residual on the unactuated q1 equation
};

// Generalized forces required by (q, qd, qdd), separated into the actuated
// torques and the zero-dynamics residual: B u + tau_v e1 = M qdd + C qd + G.
inline SplitTorques split_torques(const RobotModel& model, const Configuration& q,
                                  const Vec5& qd, const Vec5& qdd) {
  const Vec5 f = inverse_dynamics(model, q, qd, qdd);
  return {f.tail<4>(), f[0]};
}

// Ground reaction force at the stance pin from whole-body COM acceleration:
// F_h = m a_x, F_v = m (a_y + g).
inline ContactForces contact_forces(const RobotModel& model, const Configuration& q,
                                    const Vec5& qd, const Vec5& qdd) {
  const Mat55& A = detail::angle_map();
  const Mat55 coeffs = detail::com_coeffs(model);
  const auto k = detail::link_kinematics(q, qd);
  const Vec5 racc = A * qdd;

  Vec2 acc = Vec2::Zero();
  double mtot = 0.0;
  for (int i = 0; i < 5; ++i) {
    const double mi = model.links[i].mass;
    acc += mi * detail::com_acceleration(coeffs, k, i, racc);
    mtot += mi;
  }
  acc /= mtot;
  return {mtot * acc.x(), mtot * (acc.y() + model.gravity)};
}

inline double kinetic_energy(const RobotModel& model, const State& s) {
  return 0.5 * s.qd.dot(mass_matrix(model, s.q) * s.qd);
}

inline double potential_energy(const RobotModel& model, const Configuration& q) {
  const auto poses = forward_kinematics(model, q);
  double v = 0.0;
  for (int i = 0; i < 5; ++i) {
    v += model.links[i].mass * model.gravity * poses.com_positions[i].y();
  }
  return v;
}

inline double total_energy(const RobotModel& model, const State& s) {
  return kinetic_energy(model, s) + potential_energy(model, s.q);
}

// --- Impact -----------------------------------------------------------------

// 7-DOF extended state: joints plus the stance-foot position, used only
// across the impact where the contact switches feet.
struct ExtendedState {
  Vec7 q_e;
  Vec7 qd_e;
};

// Extended mass matrix [[M, Jm^T], [Jm, m I2]] where Jm = sum_i m_i J_i maps
// joint rates to total linear momentum.
inline Mat77 extended_mass_matrix(const RobotModel& model, const Configuration& q) {
  const Mat55 coeffs = detail::com_coeffs(model);
  const auto k = detail::link_kinematics(q, Vec5::Zero());

  Mat25 momentum_jac = Mat25::Zero();
  double mtot = 0.0;
  for (int i = 0; i < 5; ++i) {
    momentum_jac += model.links[i].mass * detail::com_jacobian(coeffs, k, i);
    mtot += model.links[i].mass;
  }

  Mat77 Me;
  Me.topLeftCorner<5, 5>() = mass_matrix(model, q);
  Me.topRightCorner<5, 2>() = momentum_jac.transpose();
  Me.bottomLeftCorner<2, 5>() = momentum_jac;
  Me.bottomRightCorner<2, 2>() = mtot * Eigen::Matrix2d::Identity();
  return Me;
}

struct ImpactVelocities {
  Vec5 qd_post;        // joint rates after touchdown (labels unchanged)
  Vec2 root_velocity;  // old stance foot velocity after touchdown
  Vec2 impulse;        // contact impulse at the swing foot
};

// Rigid plastic (no slip, no rebound) touchdown of the swing foot, solved on
// the extended model:
//   [M_e  -J^T] [qd_e+]   [M_e qd_e-]
//   [J      0 ] [ Lam ] = [    0    ]
// The configuration is continuous across the impact; only velocities jump.
inline ImpactVelocities impact_velocity_map(const RobotModel& model, const State& pre) {
  if (!pre.q.allFinite() || !pre.qd.allFinite()) {
    throw std::runtime_error("impact_velocity_map: non-finite state");
  }
  const Mat77 Me = extended_mass_matrix(model, pre.q);
  Mat27 J;
  J.leftCols<5>() = swing_foot(model, pre.q).jacobian;
  J.rightCols<2>().setIdentity();

  Eigen::Matrix<double, 9, 9> kkt = Eigen::Matrix<double, 9, 9>::Zero();
  kkt.topLeftCorner<7, 7>() = Me;
  kkt.topRightCorner<7, 2>() = -J.transpose();
  kkt.bottomLeftCorner<2, 7>() = J;

  Vec7 qd_e_pre;
  qd_e_pre << pre.qd, 0.0, 0.0;  // stance foot was pinned
  Eigen::Matrix<double, 9, 1> rhs;
  rhs << Me * qd_e_pre, 0.0, 0.0;

  Eigen::FullPivLU<Eigen::Matrix<double, 9, 9>> lu(kkt);
  if (!lu.isInvertible()) {
    throw std::runtime_error("impact_velocity_map: singular impact system");
  }
  const Eigen::Matrix<double, 9, 1> sol = lu.solve(rhs);

  ImpactVelocities out;
  out.qd_post = sol.head<5>();
  out.root_velocity = sol.segment<2>(5);
  out.impulse = sol.tail<2>();
  return out;
}

// Full reset map: plastic touchdown followed by leg relabeling. The stair
// argument fixes the interface shared with the hybrid simulation; the
// velocity jump itself is translation invariant.
inline State impact_map(const RobotModel& model, const State& pre,
                        const StairGeometry& /*stair*/, const RelabelMap& map) {
  const ImpactVelocities v = impact_velocity_map(model, pre);
  return relabel(State{pre.q, v.qd_post}, map);
}

}  // namespace stairgait

#endif  // STAIRGAIT_DYNAMICS_HPP_
