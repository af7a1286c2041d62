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

// Sequential quadratic programming for small dense nonlinear programs:
// central finite-difference derivatives, damped BFGS approximation of the
// Lagrangian Hessian, a dual active-set solver for the QP subproblem, and a
// backtracking line search on an L1 exact-penalty merit function. Infeasible
// subproblems are retried with elastic variables on the offending rows.

#ifndef STAIRGAIT_OPTIMIZER_HPP_
#define STAIRGAIT_OPTIMIZER_HPP_

#include <cmath>
#include <functional>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "stairgait/linalg.hpp"

namespace stairgait {

struct NLPProblem {
  int dimension = 0;
  std::function<double(const VecX&)> objective;
  std::function<VecX(const VecX&)> eq_constraints;    // == 0 feasible
  std::function<VecX(const VecX&)> ineq_constraints;  // <= 0 feasible
  int n_eq = 0;
  int n_ineq = 0;
  VecX lower_bounds;  // optional box bounds; size 0 disables
  VecX upper_bounds;
};

struct SQPOptions {
  int max_iterations = 300;
  double kkt_tolerance = 1e-6;
  double constraint_tolerance = 1e-6;
  double fd_step = 1e-6;
  double merit_penalty_growth = 2.0;
  double armijo_constant = 1e-4;
  double backtrack_ratio = 0.5;
  int max_backtracks = 30;
  std::function<void(const std::string&)> log;  // line-oriented iteration log
};

enum class SQPStatus { kConverged, kMaxIterations, kLineSearchFailure, kQPFailure };

inline const char* to_string(SQPStatus s) {
  switch (s) {
    case SQPStatus::kConverged: return "converged";
    case SQPStatus::kMaxIterations: return "max-iterations";
    case SQPStatus::kLineSearchFailure: return "line-search-failure";
    case SQPStatus::kQPFailure: return "qp-failure";
  }
  return "unknown";
}

struct SQPIteration {
  double objective;
  double eq_violation;
  double ineq_violation;
  double merit_before;  // at the step's own penalty
  double merit_after;
  double penalty;
  double step_norm;
};

struct SQPResult {
  VecX theta_star;
  SQPStatus status = SQPStatus::kMaxIterations;
  int iterations = 0;
  double objective = std::numeric_limits<double>::quiet_NaN();
  double max_eq_violation = 0.0;
  double max_ineq_violation = 0.0;
  double kkt_residual = std::numeric_limits<double>::infinity();
  VecX eq_multipliers;    // estimates at theta_star
  VecX ineq_multipliers;
  std::vector<SQPIteration> history;

  bool feasible(double tol) const {
    return max_eq_violation <= tol && max_ineq_violation <= tol;
  }
};

// --- Finite differences ------------------------------------------------------

// Central-difference Jacobian, column j = (f(x+h e_j) - f(x-h e_j)) / (2h).
template <typename F>
MatX fd_jacobian(const F& f, const VecX& x, double step) {
  VecX xp = x;
  MatX J;
  for (int j = 0; j < x.size(); ++j) {
    xp[j] = x[j] + step;
    const VecX fp = f(xp);
    xp[j] = x[j] - step;
    const VecX fm = f(xp);
    xp[j] = x[j];
    if (!fp.allFinite() || !fm.allFinite()) {
      throw std::runtime_error("fd_jacobian: non-finite function value at column " +
                               std::to_string(j));
    }
    if (J.size() == 0) J.resize(fp.size(), x.size());
    J.col(j) = (fp - fm) / (2.0 * step);
  }
  return J;
}

template <typename F>
VecX fd_gradient(const F& f, const VecX& x, double step) {
  VecX g(x.size());
  VecX xp = x;
  for (int j = 0; j < x.size(); ++j) {
    xp[j] = x[j] + step;
    const double fp = f(xp);
    xp[j] = x[j] - step;
    const double fm = f(xp);
    xp[j] = x[j];
    if (!std::isfinite(fp) || !std::isfinite(fm)) {
      throw std::runtime_error("fd_gradient: non-finite function value at column " +
                               std::to_string(j));
    }
    g[j] = (fp - fm) / (2.0 * step);
  }
  return g;
}

// --- Quadratic programming ---------------------------------------------------

struct QPResult {
  VecX x;
  VecX eq_multipliers;    // lambda, sign per L = f + lambda' c_eq + mu' c_ineq
  VecX ineq_multipliers;  // mu >= 0
  bool feasible = false;
};

// Strictly convex QP:  min 1/2 x'H x + g'x  s.t.  A x = b,  C x <= d.
// Dual active-set method (Goldfarb-Idnani): start at the unconstrained
// optimum, add violated constraints one at a time, dropping blocking active
// inequalities along partial dual steps. Returns feasible=false when the
// constraints are inconsistent.
inline QPResult qp_solve(const MatX& H, const VecX& g, const MatX& A, const VecX& b,
                         const MatX& C, const VecX& d) {
  const int n = static_cast<int>(g.size());
  const int me = static_cast<int>(b.size());
  const int mi = static_cast<int>(d.size());

  QPResult res;
  res.eq_multipliers = VecX::Zero(me);
  res.ineq_multipliers = VecX::Zero(mi);

  Eigen::LLT<MatX> hchol(H);
  if (hchol.info() != Eigen::Success) {
    throw std::invalid_argument("qp_solve: Hessian is not positive definite");
  }

  // All constraints in n'x >= bv form: equalities first (never dropped,
  // multipliers free), then inequalities as -C x >= -d.
  const int m = me + mi;
  std::vector<VecX> normals(m);
  VecX bv(m);
  for (int i = 0; i < me; ++i) {
    normals[i] = A.row(i).transpose();
    bv[i] = b[i];
  }
  for (int i = 0; i < mi; ++i) {
    normals[me + i] = -C.row(i).transpose();
    bv[me + i] = -d[i];
  }

  VecX x = hchol.solve(-g);
  std::vector<int> active;
  VecX u(0);  // multipliers of active constraints, aligned with `active`

  const double scale = std::max({1.0, g.lpNorm<Eigen::Infinity>(),
                                 bv.size() ? bv.cwiseAbs().maxCoeff() : 0.0});
  const double feas_tol = 1e-10 * scale;

  // Step directions for candidate constraint `p` given the active set:
  // z moves x without disturbing active constraints, r is the rate at which
  // active multipliers must change.
  const auto directions = [&](int p, VecX& z, VecX& r) {
    const VecX hi_n = hchol.solve(normals[p]);
    const int a = static_cast<int>(active.size());
    if (a == 0) {
      z = hi_n;
      r.resize(0);
      return;
    }
    MatX N(a, n);
    for (int k = 0; k < a; ++k) N.row(k) = normals[active[k]].transpose();
    const MatX NHin = N * hchol.solve(N.transpose());  // S = N H^-1 N'
    r = NHin.ldlt().solve(N * hi_n);
    z = hi_n - hchol.solve(N.transpose() * r);
  };

  const auto slack = [&](int p) { return normals[p].dot(x) - bv[p]; };

  const int max_pivots = 50 * (n + m + 1);
  int pivots = 0;

  // Phase 1: equalities.
  for (int p = 0; p < me; ++p) {
    VecX z, r;
    directions(p, z, r);
    const double ztn = z.dot(normals[p]);
    const double s = slack(p);
    if (std::abs(ztn) < 1e-14 * (1.0 + normals[p].norm())) {
      if (std::abs(s) > feas_tol) return res;  // inconsistent equalities
      active.push_back(p);
      u.conservativeResize(u.size() + 1);
      u[u.size() - 1] = 0.0;
      continue;
    }
    const double t = -s / ztn;
    x += t * z;
    if (u.size() > 0) u -= t * r;
    active.push_back(p);
    u.conservativeResize(u.size() + 1);
    u[u.size() - 1] = t;
  }

  // Phase 2: inequalities.
  while (pivots++ < max_pivots) {
    int worst = -1;
    double worst_slack = -feas_tol;
    for (int p = me; p < m; ++p) {
      bool is_active = false;
      for (int k : active) {
        if (k == p) { is_active = true; break; }
      }
      if (is_active) continue;
      const double s = slack(p);
      if (s < worst_slack) {
        worst_slack = s;
        worst = p;
      }
    }
    if (worst < 0) break;  // primal feasible: done

    double u_plus = 0.0;
    while (pivots++ < max_pivots) {
      VecX z, r;
      directions(worst, z, r);
      const double ztn = z.dot(normals[worst]);
      const bool z_zero = ztn < 1e-14 * (1.0 + normals[worst].squaredNorm());

      // Max dual step before an active inequality multiplier hits zero.
      double t1 = std::numeric_limits<double>::infinity();
      int drop = -1;
      for (int k = 0; k < static_cast<int>(active.size()); ++k) {
        if (active[k] < me) continue;  // equalities are never dropped
        if (r.size() > k && r[k] > 1e-14) {
          const double cand = u[k] / r[k];
          if (cand < t1) {
            t1 = cand;
            drop = k;
          }
        }
      }
      const double t2 = z_zero ? std::numeric_limits<double>::infinity()
                               : -slack(worst) / ztn;
      const double t = std::min(t1, t2);
      if (!std::isfinite(t)) return res;  // infeasible: no primal or dual step

      if (!z_zero) x += t * z;
      if (u.size() > 0 && r.size() > 0) u.head(r.size()) -= t * r;
      u_plus += t;

      if (t == t2 && !z_zero) {
        active.push_back(worst);
        u.conservativeResize(u.size() + 1);
        u[u.size() - 1] = u_plus;
        break;  // constraint satisfied and added; back to violation scan
      }
      // Partial step: drop the blocking constraint and retry.
      if (drop < 0) return res;
      active.erase(active.begin() + drop);
      VecX u2(u.size() - 1);
      int w = 0;
      for (int k = 0; k < u.size(); ++k) {
        if (k != drop) u2[w++] = u[k];
      }
      u = u2;
    }
  }
  if (pivots >= max_pivots) return res;

  res.x = x;
  res.feasible = true;
  for (int k = 0; k < static_cast<int>(active.size()); ++k) {
    const int p = active[k];
    if (p < me) {
      res.eq_multipliers[p] = -u[k];
    } else {
      res.ineq_multipliers[p - me] = u[k];
    }
  }
  return res;
}

// --- SQP ----------------------------------------------------------------------

namespace detail {

// Damped BFGS update (Powell damping keeps B positive definite).
inline void damped_bfgs_update(MatX& B, const VecX& s, const VecX& y) {
  const VecX Bs = B * s;
  const double sBs = s.dot(Bs);
  double sy = s.dot(y);
  VecX r = y;
  if (sBs <= 0.0) return;
  if (sy < 0.2 * sBs) {
    const double theta = 0.8 * sBs / (sBs - sy);
    r = theta * y + (1.0 - theta) * Bs;
    sy = s.dot(r);
  }
  if (sy < 1e-14 * sBs) return;
  B += r * r.transpose() / sy - Bs * Bs.transpose() / sBs;
}

// Retry an infeasible QP with elastic variables on all equalities and on the
// inequality rows violated at p = 0, penalized in the objective.
inline QPResult qp_solve_elastic(const MatX& B, const VecX& g, const MatX& Je,
                                 const VecX& ce, const MatX& Ji, const VecX& ci,
                                 double penalty) {
  const int n = static_cast<int>(g.size());
  const int me = static_cast<int>(ce.size());
  const int mi = static_cast<int>(ci.size());

  std::vector<int> elastic_rows;
  for (int i = 0; i < mi; ++i) {
    if (ci[i] > 0.0) elastic_rows.push_back(i);
  }
  const int ne = me + static_cast<int>(elastic_rows.size());
  const int dim = n + ne;

  MatX H = MatX::Zero(dim, dim);
  H.topLeftCorner(n, n) = B;
  H.bottomRightCorner(ne, ne) = (1e-8 * penalty) * MatX::Identity(ne, ne);
  VecX gx = VecX::Zero(dim);
  gx.head(n) = g;
  gx.tail(ne).setConstant(penalty);

  // |Je p + ce| <= s_eq, elastic inequalities, and s >= 0.
  const int rows = 2 * me + mi + ne;
  MatX C = MatX::Zero(rows, dim);
  VecX d = VecX::Zero(rows);
  int r = 0;
  for (int i = 0; i < me; ++i, r += 2) {
    C.block(r, 0, 1, n) = Je.row(i);
    C(r, n + i) = -1.0;
    d[r] = -ce[i];
    C.block(r + 1, 0, 1, n) = -Je.row(i);
    C(r + 1, n + i) = -1.0;
    d[r + 1] = ce[i];
  }
  int el = 0;
  for (int i = 0; i < mi; ++i, ++r) {
    C.block(r, 0, 1, n) = Ji.row(i);
    d[r] = -ci[i];
    if (el < static_cast<int>(elastic_rows.size()) && elastic_rows[el] == i) {
      C(r, n + me + el) = -1.0;
      ++el;
    }
  }
  for (int i = 0; i < ne; ++i, ++r) C(r, n + i) = -1.0;

  QPResult raw = qp_solve(H, gx, MatX(0, dim), VecX(0), C, d);
  QPResult out;
  out.feasible = raw.feasible;
  if (!raw.feasible) return out;
  out.x = raw.x.head(n);
  out.eq_multipliers = VecX::Zero(me);
  out.ineq_multipliers = VecX::Zero(mi);
  for (int i = 0; i < me; ++i) {
    out.eq_multipliers[i] = raw.ineq_multipliers[2 * i] - raw.ineq_multipliers[2 * i + 1];
  }
  for (int i = 0; i < mi; ++i) {
    out.ineq_multipliers[i] = raw.ineq_multipliers[2 * me + i];
  }
  return out;
}

}  // namespace detail

inline SQPResult minimize(const NLPProblem& problem, const VecX& theta0,
                          const SQPOptions& opts = {}) {
  if (theta0.size() != problem.dimension || !theta0.allFinite()) {
    throw std::invalid_argument("minimize: theta0 has wrong size or non-finite entries");
  }

  const bool has_bounds = problem.lower_bounds.size() > 0 || problem.upper_bounds.size() > 0;
  const auto eval_eq = [&](const VecX& x) -> VecX {
    return problem.eq_constraints ? problem.eq_constraints(x) : VecX(0);
  };
  const auto eval_ineq = [&](const VecX& x) -> VecX {
    VecX c = problem.ineq_constraints ? problem.ineq_constraints(x) : VecX(0);
    if (!has_bounds) return c;
    const int n = problem.dimension;
    VecX out(c.size() + 2 * n);
    out.head(c.size()) = c;
    for (int j = 0; j < n; ++j) {
      out[c.size() + j] =
          problem.lower_bounds.size() ? problem.lower_bounds[j] - x[j]
                                      : -std::numeric_limits<double>::infinity();
      out[c.size() + n + j] =
          problem.upper_bounds.size() ? x[j] - problem.upper_bounds[j]
                                      : -std::numeric_limits<double>::infinity();
    }
    return out;
  };

  VecX theta = theta0;
  double f = problem.objective(theta);
  if (!std::isfinite(f)) {
    throw std::invalid_argument("minimize: objective non-finite at theta0");
  }
  VecX ce = eval_eq(theta);
  VecX ci = eval_ineq(theta);

  const double f_scale = std::max(1.0, std::abs(f));
  VecX grad = fd_gradient(problem.objective, theta, opts.fd_step);
  MatX Je = ce.size() ? fd_jacobian(eval_eq, theta, opts.fd_step) : MatX(0, theta.size());
  MatX Ji = ci.size() ? fd_jacobian(eval_ineq, theta, opts.fd_step) : MatX(0, theta.size());

  MatX B = MatX::Identity(theta.size(), theta.size()) * f_scale;
  bool rescale_hessian = true;
  double penalty = 1.0;

  const auto viol = [](const VecX& e, const VecX& i) {
    double v = 0.0;
    if (e.size()) v = e.cwiseAbs().maxCoeff();
    if (i.size()) v = std::max(v, i.maxCoeff());
    return std::max(v, 0.0);
  };
  const auto l1_infeas = [](const VecX& e, const VecX& i) {
    double s = e.size() ? e.cwiseAbs().sum() : 0.0;
    if (i.size()) s += i.cwiseMax(0.0).sum();
    return s;
  };

  SQPResult result;
  result.status = SQPStatus::kMaxIterations;
  int iter = 0;
  for (; iter < opts.max_iterations; ++iter) {
    QPResult qp = qp_solve(B, grad, Je, ce.size() ? VecX(-ce) : VecX(0), Ji,
                           ci.size() ? VecX(-ci) : VecX(0));
    if (!qp.feasible) {
      qp = detail::qp_solve_elastic(B, grad, Je, ce, Ji, ci,
                                    1e4 * std::max(1.0, grad.lpNorm<Eigen::Infinity>()));
      if (!qp.feasible) {
        result.status = SQPStatus::kQPFailure;
        break;
      }
    }
    const VecX p = qp.x;

    VecX kkt = grad;
    if (Je.rows()) kkt += Je.transpose() * qp.eq_multipliers;
    if (Ji.rows()) kkt += Ji.transpose() * qp.ineq_multipliers;
    const double kkt_res = kkt.lpNorm<Eigen::Infinity>() / std::max(1.0, grad.lpNorm<Eigen::Infinity>());
    const double cur_viol = viol(ce, ci);

    if (opts.log) {
      opts.log("iter " + std::to_string(iter) + "  f " + std::to_string(f) + "  viol " +
               std::to_string(cur_viol) + "  kkt " + std::to_string(kkt_res) + "  step " +
               std::to_string(p.norm()));
    }

    if (kkt_res <= opts.kkt_tolerance && cur_viol <= opts.constraint_tolerance) {
      result.status = SQPStatus::kConverged;
      break;
    }

    double mult_norm = 0.0;
    if (qp.eq_multipliers.size()) {
      mult_norm = qp.eq_multipliers.cwiseAbs().maxCoeff();
    }
    if (qp.ineq_multipliers.size()) {
      mult_norm = std::max(mult_norm, qp.ineq_multipliers.maxCoeff());
    }
    if (penalty < 1.1 * mult_norm) {
      penalty = std::max(opts.merit_penalty_growth * penalty, 1.1 * mult_norm);
    }

    const double merit0 = f + penalty * l1_infeas(ce, ci);
    const double descent = grad.dot(p) - penalty * l1_infeas(ce, ci);

    double step = 1.0;
    bool accepted = false;
    double f_new = f;
    VecX ce_new, ci_new, theta_new;
    for (int bt = 0; bt < opts.max_backtracks; ++bt) {
      theta_new = theta + step * p;
      f_new = problem.objective(theta_new);
      ce_new = eval_eq(theta_new);
      ci_new = eval_ineq(theta_new);
      if (std::isfinite(f_new) && ce_new.allFinite() && ci_new.allFinite()) {
        const double merit_new = f_new + penalty * l1_infeas(ce_new, ci_new);
        if (merit_new <= merit0 + opts.armijo_constant * step * descent) {
          accepted = true;
          break;
        }
      }
      step *= opts.backtrack_ratio;
    }
    if (!accepted) {
      result.status = SQPStatus::kLineSearchFailure;
      break;
    }

    SQPIteration rec;
    rec.objective = f_new;
    rec.eq_violation = ce_new.size() ? ce_new.cwiseAbs().maxCoeff() : 0.0;
    rec.ineq_violation = ci_new.size() ? std::max(0.0, ci_new.maxCoeff()) : 0.0;
    rec.merit_before = merit0;
    rec.merit_after = f_new + penalty * l1_infeas(ce_new, ci_new);
    rec.penalty = penalty;
    rec.step_norm = step * p.norm();
    result.history.push_back(rec);

    const VecX grad_new = fd_gradient(problem.objective, theta_new, opts.fd_step);
    const MatX Je_new =
        ce.size() ? fd_jacobian(eval_eq, theta_new, opts.fd_step) : MatX(0, theta.size());
    const MatX Ji_new =
        ci.size() ? fd_jacobian(eval_ineq, theta_new, opts.fd_step) : MatX(0, theta.size());

    VecX dL_old = grad, dL_new = grad_new;
    if (Je.rows()) {
      dL_old += Je.transpose() * qp.eq_multipliers;
      dL_new += Je_new.transpose() * qp.eq_multipliers;
    }
    if (Ji.rows()) {
      dL_old += Ji.transpose() * qp.ineq_multipliers;
      dL_new += Ji_new.transpose() * qp.ineq_multipliers;
    }
    const VecX s = theta_new - theta;
    const VecX y = dL_new - dL_old;
    if (rescale_hessian) {
      const double sy = s.dot(y);
      if (sy > 0.0) {
        B = MatX::Identity(theta.size(), theta.size()) * (y.squaredNorm() / sy);
      }
      rescale_hessian = false;
    }
    detail::damped_bfgs_update(B, s, y);

    theta = theta_new;
    f = f_new;
    grad = grad_new;
    ce = ce_new;
    ci = ci_new;
    Je = Je_new;
    Ji = Ji_new;
  }

  // Fresh evaluation at the final iterate; never report cached values.
  result.theta_star = theta;
  result.iterations = iter;
  result.objective = problem.objective(theta);
  const VecX ce_fin = eval_eq(theta);
  const VecX ci_fin = eval_ineq(theta);
  result.max_eq_violation = ce_fin.size() ? ce_fin.cwiseAbs().maxCoeff() : 0.0;
  result.max_ineq_violation = ci_fin.size() ? std::max(0.0, ci_fin.maxCoeff()) : 0.0;
  {
    const QPResult qp = qp_solve(B, grad, Je, ce_fin.size() ? VecX(-ce_fin) : VecX(0), Ji,
                                 ci_fin.size() ? VecX(-ci_fin) : VecX(0));
    if (qp.feasible) {
      VecX kkt = grad;
      if (Je.rows()) kkt += Je.transpose() * qp.eq_multipliers;
      if (Ji.rows()) kkt += Ji.transpose() * qp.ineq_multipliers;
      result.kkt_residual =
          kkt.lpNorm<Eigen::Infinity>() / std::max(1.0, grad.lpNorm<Eigen::Infinity>());
      result.eq_multipliers = qp.eq_multipliers;
      result.ineq_multipliers = qp.ineq_multipliers;
    }
  }
  return result;
}

}  // namespace stairgait

#endif  // STAIRGAIT_OPTIMIZER_HPP_
