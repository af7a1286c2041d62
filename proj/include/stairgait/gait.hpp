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

// Degree-4 polynomial joint trajectories q_k(t) = sum_i alpha(k,i) t^i and
// the affine embedding of the 15 free coefficients between fixed boundary
// configurations.

#ifndef STAIRGAIT_GAIT_HPP_
#define STAIRGAIT_GAIT_HPP_

#include <random>
#include <stdexcept>

#include "stairgait/linalg.hpp"
#include "stairgait/model.hpp"

namespace stairgait {

constexpr int kFreeParamsPerJoint = 3;  // alpha_{k,1..3}
constexpr int kNumFreeParams = 5 * kFreeParamsPerJoint;

using FreeParams = Eigen::Matrix<double, kNumFreeParams, 1>;

struct GaitSample {
  Vec5 q;
  Vec5 qd;
  Vec5 qdd;
};

struct PolynomialGait {
  Mat55 alpha;      // row k = joint, column i = coefficient of t^i
  double duration;  // T, s

  void validate() const {
    if (!(duration > 0.0)) throw std::invalid_argument("PolynomialGait: duration must be > 0");
    if (!alpha.allFinite()) throw std::invalid_argument("PolynomialGait: non-finite coefficients");
  }

  // Horner evaluation of q and its analytic first and second derivatives.
  // No domain check; used by the simulator when an event overshoots T.
  GaitSample eval_extrapolated(double t) const {
    GaitSample s;
    for (int k = 0; k < 5; ++k) {
      double p = alpha(k, 4);
      double d = 0.0;
      double dd = 0.0;
      for (int i = 3; i >= 0; --i) {
        dd = dd * t + 2.0 * d;
        d = d * t + p;
        p = p * t + alpha(k, i);
      }
      s.q[k] = p;
      s.qd[k] = d;
      s.qdd[k] = dd;
    }
    return s;
  }

  GaitSample eval(double t) const {
    if (t < 0.0 || t > duration) {
      throw std::domain_error("PolynomialGait::eval: t outside [0, duration]");
    }
    return eval_extrapolated(t);
  }
};

struct BoundaryConditions {
  Configuration q_init;
  Configuration q_final;
  double duration;

  void validate() const {
    if (!(duration > 0.0)) throw std::invalid_argument("BoundaryConditions: duration must be > 0");
    if (!q_init.allFinite() || !q_final.allFinite()) {
      throw std::invalid_argument("BoundaryConditions: non-finite configuration");
    }
  }
};

// Boundary conditions consume alpha_{k,0} and alpha_{k,4}; the three middle
// coefficients per joint are the free parameters, so theta -> gait is affine
// and q(0) = q_init, q(T) = q_final hold by construction.
inline PolynomialGait embed(const FreeParams& theta, const BoundaryConditions& bc) {
  bc.validate();
  const double T = bc.duration;
  PolynomialGait g;
  g.duration = T;
  for (int k = 0; k < 5; ++k) {
    g.alpha(k, 0) = bc.q_init[k];
    for (int i = 1; i <= 3; ++i) g.alpha(k, i) = theta[k * kFreeParamsPerJoint + i - 1];
    double partial = 0.0;
    double tp = 1.0;
    for (int i = 0; i <= 3; ++i) {
      partial += g.alpha(k, i) * tp;
      tp *= T;
    }
    g.alpha(k, 4) = (bc.q_final[k] - partial) / (tp);  // tp == T^4
  }
  return g;
}

inline FreeParams extract(const PolynomialGait& gait) {
  FreeParams theta;
  for (int k = 0; k < 5; ++k) {
    for (int i = 1; i <= 3; ++i) theta[k * kFreeParamsPerJoint + i - 1] = gait.alpha(k, i);
  }
  return theta;
}

// Straight-line seed: constant joint rates between the boundary
// configurations (which zeroes the quartic coefficient as well).
inline FreeParams initial_guess(const BoundaryConditions& bc) {
  bc.validate();
  FreeParams theta = FreeParams::Zero();
  for (int k = 0; k < 5; ++k) {
    theta[k * kFreeParamsPerJoint] = (bc.q_final[k] - bc.q_init[k]) / bc.duration;
  }
  return theta;
}

// Seeded perturbation used for multi-start.
inline FreeParams perturb(const FreeParams& theta, double magnitude, std::mt19937_64& rng) {
  std::normal_distribution<double> n(0.0, magnitude);
  FreeParams out = theta;
  for (int i = 0; i < kNumFreeParams; ++i) out[i] += n(rng);
  return out;
}

}  // namespace stairgait

#endif  // STAIRGAIT_GAIT_HPP_
