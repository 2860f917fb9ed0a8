/******************************************************************************
 * Copyright 2026 The Platoon Tuner Authors. All Rights Reserved.
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 * http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 *****************************************************************************/

/**
 * @file sdp_feas.hpp
 * @brief Strict feasibility of small dense affine LMI systems.
 *
 * The question "is there y with F0_j + sum_k y_k F_jk < 0 for every j" is
 * answered through the eigenvalue-margin program
 *
 *     maximize t  s.t.  F0_j + sum_k y_k F_jk + t I <= 0  for every j,
 *
 * solved with a primal log-barrier path-following method (damped Newton on
 * the centering problem, barrier weight increased geometrically). Two extra
 * safeguards keep the program bounded: t <= t_cap and |y_k| <= y_bound.
 *
 * A point is only ever reported Feasible after an independent dense
 * eigen-decomposition of every constraint at that point.
 */
#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "platoon/errors.hpp"

namespace platoon::sdp {

/// One constraint F0 + sum_k y_k F_k < 0. All matrices symmetric, same size.
struct AffineLmi {
  Eigen::MatrixXd F0;
  std::vector<Eigen::MatrixXd> F;

  Eigen::Index size() const { return F0.rows(); }

  Eigen::MatrixXd evaluate(const Eigen::VectorXd& y) const {
    Eigen::MatrixXd out = F0;
    for (std::size_t k = 0; k < F.size(); ++k) {
      if (y[static_cast<Eigen::Index>(k)] != 0.0) {
        out.noalias() += y[static_cast<Eigen::Index>(k)] * F[k];
      }
    }
    return out;
  }
};

struct AffineLmiSystem {
  int n_vars = 0;
  std::vector<AffineLmi> constraints;

  void validate() const {
    if (n_vars < 1) {
      throw ParameterError("LMI system needs at least one decision variable");
    }
    for (const auto& c : constraints) {
      const auto n = c.F0.rows();
      if (c.F0.cols() != n || static_cast<int>(c.F.size()) != n_vars) {
        throw ParameterError("malformed LMI constraint");
      }
      for (const auto& f : c.F) {
        if (f.rows() != n || f.cols() != n) {
          throw ParameterError("LMI coefficient dimension mismatch");
        }
      }
    }
  }
};

enum class FeasibilityStatus { Feasible, Infeasible, NumericalFailure };

inline std::string_view to_string(FeasibilityStatus s) {
  switch (s) {
    case FeasibilityStatus::Feasible:
      return "feasible";
    case FeasibilityStatus::Infeasible:
      return "infeasible";
    case FeasibilityStatus::NumericalFailure:
      return "numerical_failure";
  }
  return "unknown";
}

struct FeasibilityResult {
  FeasibilityStatus status = FeasibilityStatus::NumericalFailure;
  Eigen::VectorXd y;  ///< best iterate; meaningful as a witness only when Feasible
  double t_star = -std::numeric_limits<double>::infinity();
  double t_upper = std::numeric_limits<double>::infinity();  ///< duality-gap bound on the optimum
  double verified_margin = -std::numeric_limits<double>::infinity();  ///< min_j -lambda_max(F_j(y))
  int newton_steps = 0;
  bool converged = false;

  bool feasible() const { return status == FeasibilityStatus::Feasible; }
};

struct SolverOptions {
  double tol_feas = 1e-7;
  int max_iter = 400;  ///< Newton steps over the whole path
  std::optional<Eigen::VectorXd> initial;
  double t_cap = 1.0;
  double y_bound = 1e6;
  double gap_tol = 1e-9;
  double barrier_growth = 30.0;
  /// Stop as soon as the gap bound proves t* < tol_feas.
  bool stop_when_infeasible = true;
  /// Stop at the first centered iterate that verifies as feasible.
  bool stop_when_feasible = false;
};

/// Minimum over constraints of -lambda_max(F_j(y)), by dense eigen-decomposition.
inline double verified_margin(const AffineLmiSystem& sys, const Eigen::VectorXd& y) {
  double margin = std::numeric_limits<double>::infinity();
  for (const auto& c : sys.constraints) {
    const Eigen::MatrixXd m = c.evaluate(y);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (m + m.transpose()), Eigen::EigenvaluesOnly);
    if (es.info() != Eigen::Success) {
      return -std::numeric_limits<double>::infinity();
    }
    margin = std::min(margin, -es.eigenvalues().maxCoeff());
  }
  return margin;
}

namespace detail {

class BarrierSolver {
 public:
  BarrierSolver(const AffineLmiSystem& sys, const SolverOptions& opt) : sys_(sys), opt_(opt) {
    n_ = sys.n_vars;
    nu_ = 1.0 + 2.0 * n_;
    nonzero_.resize(sys.constraints.size());
    for (std::size_t j = 0; j < sys.constraints.size(); ++j) {
      const auto& c = sys.constraints[j];
      nu_ += static_cast<double>(c.size());
      for (int k = 0; k < n_; ++k) {
        if (c.F[k].cwiseAbs().maxCoeff() > 0.0) {
          nonzero_[j].push_back(k);
        }
      }
    }
  }

  FeasibilityResult run() {
    FeasibilityResult res;
    Eigen::VectorXd y = opt_.initial ? *opt_.initial : Eigen::VectorXd::Zero(n_);
    if (y.size() != n_) {
      throw ParameterError("initial point has wrong dimension");
    }
    y = y.cwiseMax(-0.5 * opt_.y_bound).cwiseMin(0.5 * opt_.y_bound);
    const double m0 = verified_margin(sys_, y);
    if (!std::isfinite(m0)) {
      return res;
    }
    double t = std::min(m0 - 1.0, opt_.t_cap - 1.0);
    z_.resize(n_ + 1);
    z_.head(n_) = y;
    z_[n_] = t;

    double s = 1.0 / std::max(1.0, std::abs(t));
    int steps = 0;
    bool converged = false;
    bool centered = false;
    while (steps < opt_.max_iter) {
      centered = center(s, steps);
      if (!centered) {
        break;
      }
      const double gap = nu_ / s;
      res.t_upper = z_[n_] + gap;
      if (opt_.stop_when_infeasible && res.t_upper < opt_.tol_feas) {
        converged = true;
        break;
      }
      if (opt_.stop_when_feasible && z_[n_] >= opt_.tol_feas &&
          verified_margin(sys_, z_.head(n_)) >= opt_.tol_feas) {
        converged = true;
        break;
      }
      if (gap < opt_.gap_tol) {
        converged = true;
        break;
      }
      s *= opt_.barrier_growth;
    }

    res.newton_steps = steps;
    res.converged = converged;
    res.y = z_.head(n_);
    res.t_star = z_[n_];
    res.verified_margin = verified_margin(sys_, res.y);
    if (res.t_star >= opt_.tol_feas && res.verified_margin >= opt_.tol_feas) {
      res.status = FeasibilityStatus::Feasible;
    } else if (converged && res.t_upper < opt_.tol_feas) {
      res.status = FeasibilityStatus::Infeasible;
    } else {
      res.status = FeasibilityStatus::NumericalFailure;
    }
    return res;
  }

 private:
  // Barrier value at z, or +inf outside the domain. Fills inverse slacks.
  double barrier(const Eigen::VectorXd& z, double s, bool keep_inverses) {
    const double t = z[n_];
    if (!(t < opt_.t_cap)) {
      return std::numeric_limits<double>::infinity();
    }
    double phi = -s * t - std::log(opt_.t_cap - t);
    for (int k = 0; k < n_; ++k) {
      const double yk = z[k];
      if (!(std::abs(yk) < opt_.y_bound)) {
        return std::numeric_limits<double>::infinity();
      }
      phi -= std::log(opt_.y_bound - yk) + std::log(opt_.y_bound + yk);
    }
    if (keep_inverses) {
      sinv_.resize(sys_.constraints.size());
    }
    for (std::size_t j = 0; j < sys_.constraints.size(); ++j) {
      const auto& c = sys_.constraints[j];
      Eigen::MatrixXd slack = -c.F0;
      for (int k : nonzero_[j]) {
        slack.noalias() -= z[k] * c.F[k];
      }
      slack.diagonal().array() -= t;
      Eigen::LLT<Eigen::MatrixXd> llt(slack);
      if (llt.info() != Eigen::Success) {
        return std::numeric_limits<double>::infinity();
      }
      const auto& l = llt.matrixLLT();
      double logdet = 0.0;
      for (Eigen::Index i = 0; i < l.rows(); ++i) {
        const double d = l(i, i);
        if (!(d > 0.0)) {
          return std::numeric_limits<double>::infinity();
        }
        logdet += 2.0 * std::log(d);
      }
      phi -= logdet;
      if (keep_inverses) {
        sinv_[j] = llt.solve(Eigen::MatrixXd::Identity(slack.rows(), slack.cols()));
      }
    }
    return phi;
  }

  // Damped Newton on the centering problem for weight s.
  bool center(double s, int& steps) {
    const int dim = n_ + 1;
    double phi = barrier(z_, s, true);
    if (!std::isfinite(phi)) {
      return false;
    }
    Eigen::VectorXd g(dim);
    Eigen::MatrixXd H(dim, dim);
    std::vector<Eigen::MatrixXd> w;
    for (int inner = 0; inner < 100 && steps < opt_.max_iter; ++inner) {
      g.setZero();
      H.setZero();
      const double t = z_[n_];
      g[n_] = -s + 1.0 / (opt_.t_cap - t);
      H(n_, n_) = 1.0 / ((opt_.t_cap - t) * (opt_.t_cap - t));
      for (int k = 0; k < n_; ++k) {
        const double a = 1.0 / (opt_.y_bound - z_[k]);
        const double b = 1.0 / (opt_.y_bound + z_[k]);
        g[k] += a - b;
        H(k, k) += a * a + b * b;
      }
      for (std::size_t j = 0; j < sys_.constraints.size(); ++j) {
        const auto& c = sys_.constraints[j];
        const Eigen::MatrixXd& si = sinv_[j];
        const auto& idx = nonzero_[j];
        w.resize(idx.size());
        for (std::size_t a = 0; a < idx.size(); ++a) {
          w[a].noalias() = si * c.F[idx[a]];
          g[idx[a]] += w[a].trace();
        }
        g[n_] += si.trace();
        H(n_, n_) += (si.array() * si.transpose().array()).sum();
        for (std::size_t a = 0; a < idx.size(); ++a) {
          const double ht = (w[a].array() * si.transpose().array()).sum();
          H(idx[a], n_) += ht;
          H(n_, idx[a]) += ht;
          for (std::size_t b = a; b < idx.size(); ++b) {
            const double hab = (w[a].array() * w[b].transpose().array()).sum();
            H(idx[a], idx[b]) += hab;
            if (b != a) {
              H(idx[b], idx[a]) += hab;
            }
          }
        }
      }
      Eigen::LDLT<Eigen::MatrixXd> ldlt(H);
      if (ldlt.info() != Eigen::Success) {
        return false;
      }
      Eigen::VectorXd dz = ldlt.solve(-g);
      if (!dz.allFinite()) {
        return false;
      }
      const double decrement2 = -g.dot(dz);
      if (decrement2 < 0.0) {
        return false;
      }
      if (0.5 * decrement2 < 1e-10) {
        return true;
      }
      ++steps;
      double alpha = 1.0;
      double next_phi = std::numeric_limits<double>::infinity();
      Eigen::VectorXd trial;
      for (int ls = 0; ls < 60; ++ls) {
        trial = z_ + alpha * dz;
        next_phi = barrier(trial, s, false);
        if (std::isfinite(next_phi) && next_phi <= phi - 0.25 * alpha * decrement2) {
          break;
        }
        alpha *= 0.5;
        next_phi = std::numeric_limits<double>::infinity();
      }
      if (!std::isfinite(next_phi)) {
        // No sufficient decrease: the iterate is as centered as rounding allows.
        return decrement2 < 1e-6;
      }
      z_ = trial;
      phi = barrier(z_, s, true);
    }
    return steps < opt_.max_iter;
  }

  const AffineLmiSystem& sys_;
  const SolverOptions& opt_;
  int n_ = 0;
  double nu_ = 0.0;
  std::vector<std::vector<int>> nonzero_;
  std::vector<Eigen::MatrixXd> sinv_;
  Eigen::VectorXd z_;
};

}  // namespace detail

/**
 * Solve the eigenvalue-margin program. Feasible is returned only if the
 * achieved margin t and the independently recomputed margin are both >=
 * tol_feas; Infeasible only if the path converged and its gap bound proves
 * t* < tol_feas; anything else is NumericalFailure.
 */
inline FeasibilityResult solve_feasibility(const AffineLmiSystem& system, const SolverOptions& options) {
  system.validate();
  if (!(options.tol_feas > 0.0)) {
    throw ParameterError("tol_feas must be > 0");
  }
  if (system.constraints.empty()) {
    FeasibilityResult r;
    r.status = FeasibilityStatus::Feasible;
    r.y = options.initial ? *options.initial : Eigen::VectorXd::Zero(system.n_vars);
    r.t_star = r.t_upper = r.verified_margin = std::numeric_limits<double>::infinity();
    r.converged = true;
    return r;
  }
  detail::BarrierSolver solver(system, options);
  return solver.run();
}

inline FeasibilityResult solve_feasibility(const AffineLmiSystem& system, double tol_feas = 1e-7,
                                           int max_iter = 400) {
  SolverOptions opt;
  opt.tol_feas = tol_feas;
  opt.max_iter = max_iter;
  return solve_feasibility(system, opt);
}

}  // namespace platoon::sdp
