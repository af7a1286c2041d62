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

// Adaptive Dormand-Prince 5(4) integrator with event localization by
// bisection. Generic over the state dimension; the hybrid simulation drives
// it with the 10-dimensional (q, qd) state.

#ifndef STAIRGAIT_INTEGRATE_HPP_
#define STAIRGAIT_INTEGRATE_HPP_

#include <cmath>
#include <functional>
#include <stdexcept>
#include <vector>

#include "stairgait/linalg.hpp"

namespace stairgait {

struct IntegrateOptions {
  double rel_tol = 1e-10;
  double abs_tol = 1e-12;
  double initial_step = 1e-4;
  double max_step = 1e-2;
  double min_step = 1e-14;
  double event_time_tol = 1e-9;  // bisection width for event localization
};

struct DivergenceError : std::runtime_error {
  double time;
  explicit DivergenceError(double t)
      : std::runtime_error("integration diverged (non-finite state) at t = " +
                           std::to_string(t)),
        time(t) {}
};

namespace detail {

// Dormand-Prince coefficients (RK5(4)7M).
struct Dopri5 {
  static constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
  static constexpr double a21 = 1.0 / 5;
  static constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
  static constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
  static constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187,
                          a53 = 64448.0 / 6561, a54 = -212.0 / 729;
  static constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                          a64 = 49.0 / 176, a65 = -5103.0 / 18656;
  static constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192,
                          b5 = -2187.0 / 6784, b6 = 11.0 / 84;
  // 4th order weights for the error estimate.
  static constexpr double e1 = 5179.0 / 57600, e3 = 7571.0 / 16695, e4 = 393.0 / 640,
                          e5 = -92097.0 / 339200, e6 = 187.0 / 2100, e7 = 1.0 / 40;
};

}  // namespace detail

// One DP5 step; fills y_new and the embedded error estimate, returns f(t+h)
// via the FSAL stage.
template <typename Rhs>
void dopri5_step(const Rhs& f, double t, const VecX& y, const VecX& k1, double h,
                 VecX& y_new, VecX& k_new, VecX& err) {
  using D = detail::Dopri5;
  const VecX k2 = f(t + D::c2 * h, y + h * (D::a21 * k1));
  const VecX k3 = f(t + D::c3 * h, y + h * (D::a31 * k1 + D::a32 * k2));
  const VecX k4 = f(t + D::c4 * h, y + h * (D::a41 * k1 + D::a42 * k2 + D::a43 * k3));
  const VecX k5 =
      f(t + D::c5 * h, y + h * (D::a51 * k1 + D::a52 * k2 + D::a53 * k3 + D::a54 * k4));
  const VecX k6 = f(t + h, y + h * (D::a61 * k1 + D::a62 * k2 + D::a63 * k3 +
                                    D::a64 * k4 + D::a65 * k5));
  y_new = y + h * (D::b1 * k1 + D::b3 * k3 + D::b4 * k4 + D::b5 * k5 + D::b6 * k6);
  k_new = f(t + h, y_new);  // FSAL
  const VecX y4 = y + h * (D::e1 * k1 + D::e3 * k3 + D::e4 * k4 + D::e5 * k5 +
                           D::e6 * k6 + D::e7 * k_new);
  err = y_new - y4;
}

struct IntegrationResult {
  std::vector<double> times;
  std::vector<VecX> states;
  bool event_hit = false;
  double event_time = 0.0;
  VecX event_state;
};

// Integrate y' = f(t, y) from (t0, y0) to t_end with adaptive step control.
// If `event` is supplied, stops at the first sign change of the event
// function from > 0 to <= 0, localized by bisection to event_time_tol.
template <typename Rhs>
IntegrationResult integrate_adaptive(
    const Rhs& f, double t0, const VecX& y0, double t_end, const IntegrateOptions& opts,
    const std::function<double(double, const VecX&)>& event = nullptr) {
  IntegrationResult res;
  double t = t0;
  VecX y = y0;
  VecX k1 = f(t, y);
  res.times.push_back(t);
  res.states.push_back(y);

  double h = std::min(opts.initial_step, t_end - t0);
  double g_prev = event ? event(t, y) : 1.0;

  VecX y_new, k_new, err;
  while (t < t_end) {
    h = std::min(h, t_end - t);
    dopri5_step(f, t, y, k1, h, y_new, k_new, err);
    if (!y_new.allFinite()) throw DivergenceError(t);

    double norm = 0.0;
    for (int i = 0; i < y.size(); ++i) {
      const double sc = opts.abs_tol + opts.rel_tol * std::max(std::abs(y[i]), std::abs(y_new[i]));
      norm = std::max(norm, std::abs(err[i]) / sc);
    }

    if (norm <= 1.0) {
      const double t_new = t + h;
      if (event) {
        const double g_new = event(t_new, y_new);
        if (g_prev > 0.0 && g_new <= 0.0) {
          // Bisect within [t, t_new]; each probe takes one fixed step from
          // the accepted left endpoint, accurate to O(width^5).
          double lo = t, hi = t_new;
          VecX y_lo = y, k_lo = k1, y_probe, k_probe, e_probe;
          while (hi - lo > opts.event_time_tol) {
            const double mid = 0.5 * (lo + hi);
            dopri5_step(f, lo, y_lo, k_lo, mid - lo, y_probe, k_probe, e_probe);
            if (event(mid, y_probe) <= 0.0) {
              hi = mid;
            } else {
              lo = mid;
              y_lo = y_probe;
              k_lo = k_probe;
            }
          }
          dopri5_step(f, lo, y_lo, k_lo, hi - lo, y_probe, k_probe, e_probe);
          res.event_hit = true;
          res.event_time = hi;
          res.event_state = y_probe;
          res.times.push_back(hi);
          res.states.push_back(y_probe);
          return res;
        }
        g_prev = g_new;
      }
      t = t_new;
      y = y_new;
      k1 = k_new;
      res.times.push_back(t);
      res.states.push_back(y);
      h *= std::min(5.0, std::max(0.2, 0.9 * std::pow(norm > 0 ? norm : 1e-10, -0.2)));
      h = std::min(h, opts.max_step);
    } else {
      h *= std::max(0.2, 0.9 * std::pow(norm, -0.2));
    }
    if (h < opts.min_step) {
      throw std::runtime_error("integrate_adaptive: step size underflow at t = " +
                               std::to_string(t));
    }
  }
  return res;
}

}  // namespace stairgait

#endif  // STAIRGAIT_INTEGRATE_HPP_
