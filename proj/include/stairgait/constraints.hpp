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

// Assembly of the gait NLP: integrated squared-torque cost, zero-dynamics
// equality residuals on a coarse collocation grid, and the inequality blocks
// (torque, velocity, friction, contact, swing clearance, knee range), all as
// functions of the 15 free polynomial coefficients.

#ifndef STAIRGAIT_CONSTRAINTS_HPP_
#define STAIRGAIT_CONSTRAINTS_HPP_

#include <cmath>
#include <functional>
#include <numbers>
#include <stdexcept>

#include "stairgait/dynamics.hpp"
#include "stairgait/gait.hpp"
#include "stairgait/model.hpp"
#include "stairgait/optimizer.hpp"

namespace stairgait {

struct Limits {
  double torque_max = 150.0;      // N m
  double velocity_max = 10.0;     // rad/s
  double friction_max = 0.69;
  double vertical_force_min = 5.0;  // N
  // Knee coordinate range; flexion is negative under the sign convention, so
  // the default allows bends between 0.05 and 2 rad.
  double knee_min = -2.0;
  double knee_max = -0.05;
  double clearance_min = 0.01;    // m, peak of the swing clearance envelope

  void validate() const {
    if (!(torque_max > 0.0) || !(velocity_max > 0.0) || !(friction_max > 0.0) ||
        !(vertical_force_min > 0.0) || !(clearance_min > 0.0)) {
      throw std::invalid_argument("Limits: maxima must be positive");
    }
    if (!(knee_min < knee_max)) {
      throw std::invalid_argument("Limits: knee range is degenerate");
    }
  }
};

struct GridSpec {
  int n_ineq = 50;   // uniform midpoint samples for inequality blocks
  int n_zd = 11;     // uniform samples (endpoints included) for equalities
  int n_quad = 101;  // Simpson quadrature points for the cost

  void validate() const {
    if (n_zd > kNumFreeParams) {
      throw std::invalid_argument("GridSpec: n_zd exceeds the free-parameter budget");
    }
    if (n_ineq < 10) throw std::invalid_argument("GridSpec: n_ineq must be >= 10");
    if (n_quad < 3 || n_quad % 2 == 0) {
      throw std::invalid_argument("GridSpec: n_quad must be odd and >= 3");
    }
  }
};

// Integral of the squared actuated torques along the gait, by composite
// Simpson quadrature of a caller-provided torque signal.
inline double torque_cost_quadrature(const std::function<Vec4(double)>& torques, double duration,
                                     int n_quad) {
  const double h = duration / (n_quad - 1);
  double sum = 0.0;
  for (int i = 0; i < n_quad; ++i) {
    const double w = (i == 0 || i == n_quad - 1) ? 1.0 : (i % 2 == 1 ? 4.0 : 2.0);
    sum += w * torques(i * h).squaredNorm();
  }
  return sum * h / 3.0;
}

inline double cost(const RobotModel& model, const PolynomialGait& gait, const GridSpec& grid) {
  return torque_cost_quadrature(
      [&](double t) {
        const GaitSample s = gait.eval_extrapolated(t);
        return split_torques(model, s.q, s.qd, s.qdd).u;
      },
      gait.duration, grid.n_quad);
}

// Residual of the unactuated (q1) equation at n_zd uniform times; these are
// the equality constraints of the NLP.
inline VecX zero_dynamics_residuals(const RobotModel& model, const PolynomialGait& gait,
                                    const GridSpec& grid) {
  VecX r(grid.n_zd);
  for (int j = 0; j < grid.n_zd; ++j) {
    const double t = gait.duration * j / (grid.n_zd - 1);
    const GaitSample s = gait.eval_extrapolated(t);
    r[j] = split_torques(model, s.q, s.qd, s.qdd).tau_v;
  }
  return r;
}

// Swing clearance envelope: zero at both ends of the step (where the foot is
// on a tread by construction) and clearance_min at midstep.
inline double clearance_envelope(double t, double duration, double clearance_min) {
  return clearance_min * std::sin(std::numbers::pi * t / duration);
}

// Inequality residuals, <= 0 feasible, sampled at n_ineq midpoint times.
struct InequalityBlocks {
  VecX torque;     // |u_i| - torque_max            (4 per sample)
  VecX velocity;   // |qd_k| - velocity_max         (5 per sample)
  VecX friction;   // |F_h| - friction_max * F_v    (1 per sample)
  VecX contact;    // vertical_force_min - F_v      (1 per sample)
  VecX clearance;  // envelope - swing clearance    (1 per sample)
  VecX knee;       // knee range violations          (4 per sample)

  VecX concatenated() const {
    VecX out(torque.size() + velocity.size() + friction.size() + contact.size() +
             clearance.size() + knee.size());
    out << torque, velocity, friction, contact, clearance, knee;
    return out;
  }

  double max_violation() const {
    const VecX all = concatenated();
    return all.size() ? std::max(0.0, all.maxCoeff()) : 0.0;
  }
};

struct ResidualBundle {
  double cost = 0.0;
  VecX eq;
  InequalityBlocks ineq;
};

inline std::vector<double> inequality_sample_times(double duration, int n_ineq) {
  std::vector<double> ts(n_ineq);
  for (int j = 0; j < n_ineq; ++j) ts[j] = duration * (j + 0.5) / n_ineq;
  return ts;
}

inline InequalityBlocks inequality_residuals(const RobotModel& model, const PolynomialGait& gait,
                                             const StairGeometry& stair, const Limits& limits,
                                             const GridSpec& grid) {
  const int n = grid.n_ineq;
  InequalityBlocks blocks;
  blocks.torque.resize(4 * n);
  blocks.velocity.resize(5 * n);
  blocks.friction.resize(n);
  blocks.contact.resize(n);
  blocks.clearance.resize(n);
  blocks.knee.resize(4 * n);

  const auto times = inequality_sample_times(gait.duration, n);
  for (int j = 0; j < n; ++j) {
    const double t = times[j];
    const GaitSample s = gait.eval_extrapolated(t);
    const SplitTorques st = split_torques(model, s.q, s.qd, s.qdd);
    const ContactForces f = contact_forces(model, s.q, s.qd, s.qdd);

    blocks.torque.segment<4>(4 * j) = st.u.cwiseAbs().array() - limits.torque_max;
    blocks.velocity.segment<5>(5 * j) = s.qd.cwiseAbs().array() - limits.velocity_max;
    blocks.friction[j] = std::abs(f.horizontal) - limits.friction_max * f.vertical;
    blocks.contact[j] = limits.vertical_force_min - f.vertical;

    const Vec2 foot = swing_foot(model, s.q).position;
    blocks.clearance[j] =
        clearance_envelope(t, gait.duration, limits.clearance_min) - stair_clearance(stair, foot);

    blocks.knee[4 * j + 0] = limits.knee_min - s.q[2];
    blocks.knee[4 * j + 1] = s.q[2] - limits.knee_max;
    blocks.knee[4 * j + 2] = limits.knee_min - s.q[4];
    blocks.knee[4 * j + 3] = s.q[4] - limits.knee_max;
  }
  return blocks;
}

inline ResidualBundle residual_bundle(const RobotModel& model, const PolynomialGait& gait,
                                      const StairGeometry& stair, const Limits& limits,
                                      const GridSpec& grid) {
  ResidualBundle b;
  b.cost = cost(model, gait, grid);
  b.eq = zero_dynamics_residuals(model, gait, grid);
  b.ineq = inequality_residuals(model, gait, stair, limits, grid);
  return b;
}

// Closures over the free parameters for the solver. All captured inputs are
// copied; evaluations at distinct theta are independent.
inline NLPProblem assemble(const RobotModel& model, const StairGeometry& stair,
                           const BoundaryConditions& bc, const Limits& limits,
                           const GridSpec& grid) {
  model.validate();
  stair.validate();
  bc.validate();
  limits.validate();
  grid.validate();

  NLPProblem p;
  p.dimension = kNumFreeParams;
  p.n_eq = grid.n_zd;
  p.n_ineq = grid.n_ineq * (4 + 5 + 1 + 1 + 1 + 4);
  p.objective = [model, bc, grid](const VecX& theta) {
    return cost(model, embed(FreeParams(theta), bc), grid);
  };
  p.eq_constraints = [model, bc, grid](const VecX& theta) {
    return zero_dynamics_residuals(model, embed(FreeParams(theta), bc), grid);
  };
  p.ineq_constraints = [model, stair, bc, limits, grid](const VecX& theta) {
    return inequality_residuals(model, embed(FreeParams(theta), bc), stair, limits, grid)
        .concatenated();
  };
  return p;
}

}  // namespace stairgait

#endif  // STAIRGAIT_CONSTRAINTS_HPP_
